#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature for real or complex integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace kurastab::quad {

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    bool converged = true;
};

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5, 7 of the Kronrod set.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kronrod = fc * kronrod_weights[7];
    T gauss = fc * gauss_weights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kronrod_nodes[i];
        const T sum = f(c - dx) + f(c + dx);
        kronrod += sum * kronrod_weights[i];
        if (i % 2 == 1) gauss += sum * gauss_weights[i / 2];
    }
    const T value = kronrod * h;
    const double err = magnitude((kronrod - gauss) * h);
    return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over [a, b], splitting first at the sorted interior `breaks`.
template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {},
                    std::span<const double> breaks = {}) {
    using Seg = detail::Segment<T>;
    std::priority_queue<Seg> heap;
    std::vector<double> pts{a};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        Seg s = detail::gk15<T>(f, pts[i], pts[i + 1]);
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    int count = static_cast<int>(heap.size());
    while (!heap.empty()) {
        const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total));
        if (err <= tol) break;
        if (count >= opt.max_intervals) return {total, err, false};
        Seg worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) return {total, err, false};
        heap.pop();
        Seg left = detail::gk15<T>(f, worst.a, mid);
        Seg right = detail::gk15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    return {total, err, true};
}

/// Integrates f over [a, +inf) through the map x = a + s/(1-s).
template <class T, class F>
Result<T> integrate_to_infinity(F&& f, double a, const Options& opt = {},
                                std::span<const double> breaks = {}) {
    auto g = [&](double s) -> T {
        if (s >= 1.0) return T{};
        const double one_minus = 1.0 - s;
        const double x = a + s / one_minus;
        return f(x) * (1.0 / (one_minus * one_minus));
    };
    std::vector<double> mapped;
    for (double p : breaks)
        if (p > a) mapped.push_back((p - a) / (1.0 + (p - a)));
    return integrate<T>(g, 0.0, 1.0, opt, mapped);
}

}  // namespace kurastab::quad
