#include "kurastab/linstab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "kurastab/errors.hpp"
#include "kurastab/quadrature.hpp"

namespace kurastab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inconclusive_margin = 1e-6;

// Smallest Y such that |(K/2) L(iy)| < 0.5 for |y| >= Y, from a sampled scan.
double adaptive_extent(const FrequencyMarginal& g, double K) {
    if (K == 0.0) return 1.0;
    auto big = [&](double y) { return std::abs(0.5 * K * g.laplace(cplx(0.0, y))) >= 0.5; };
    double ymax = std::max(1.0, 4.0 * g.frequency_scale());
    // Grow the window until its outer half is quiet.
    for (int it = 0; it < 40; ++it) {
        bool quiet = true;
        for (int i = 0; i <= 200 && quiet; ++i) {
            const double y = ymax * (0.5 + 0.5 * i / 200.0);
            quiet = !big(y) && !big(-y);
        }
        if (quiet) break;
        ymax *= 2.0;
    }
    double last = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double y = ymax * i / n;
        if (big(y) || big(-y)) last = y;
    }
    return std::max(1.0, 1.25 * last + 0.1);
}

double wrapped(double a) {
    while (a > pi) a -= 2 * pi;
    while (a <= -pi) a += 2 * pi;
    return a;
}

}  // namespace

cplx dispersion(const FrequencyMarginal& g, double K, cplx z) {
    if (K == 0.0) return 1.0;
    return 1.0 - 0.5 * K * g.laplace(z);
}

WindingScan scan_imaginary_axis(const FrequencyMarginal& g, double K, const ContourOptions& opt) {
    WindingScan out;
    out.extent = adaptive_extent(g, K) * opt.extent_scale;
    const double Y = out.extent;
    const int n = std::max(16, opt.base_samples);
    auto D = [&](double y) { return dispersion(g, K, cplx(0.0, y)); };

    double margin = std::numeric_limits<double>::infinity();
    double angle = 0.0;

    struct Node {
        double y;
        cplx d;
    };
    // Walk downward from +Y to -Y, refining where the argument turns fast or
    // |D| is small compared with the sample spacing.
    Node prev{Y, D(Y)};
    margin = std::min(margin, std::abs(prev.d));
    const cplx start = prev.d;
    std::vector<Node> stack;
    for (int i = 1; i <= n; ++i) {
        const double y_next = Y - 2.0 * Y * i / n;
        stack.push_back({y_next, D(y_next)});
        while (!stack.empty()) {
            Node next = stack.back();
            const double dphi = wrapped(std::arg(next.d) - std::arg(prev.d));
            const double len = prev.y - next.y;
            const double small = std::min(std::abs(prev.d), std::abs(next.d));
            const bool refine = (std::abs(dphi) > pi / 8 || len > 0.25 * small) &&
                                len > 1e-14 * std::max(1.0, std::abs(prev.y));
            if (refine) {
                const double ym = 0.5 * (prev.y + next.y);
                stack.push_back({ym, D(ym)});
                continue;
            }
            angle += dphi;
            margin = std::min(margin, std::abs(next.d));
            prev = next;
            stack.pop_back();
        }
    }
    // Outside [-Y, Y] the image stays in the disc |D - 1| < 1/2.
    angle += std::arg(start);
    angle -= std::arg(prev.d);
    out.winding = static_cast<int>(std::lround(angle / (2 * pi)));
    out.margin = margin;
    return out;
}

std::vector<cplx> locate_unstable_roots(const FrequencyMarginal& g, double K, int expected,
                                        double extent) {
    std::vector<cplx> roots;
    if (expected <= 0 || K <= 0.0) return roots;
    const double xmax = 0.5 * K;  // |L(z)| <= 1/Re(z)
    const std::vector<double> xs = {0.01, 0.05, 0.15, 0.3, 0.5, 0.75, 1.0};
    const int ny = 41;
    for (double xf : xs) {
        for (int j = 0; j < ny; ++j) {
            cplx z(xf * xmax, -extent + 2.0 * extent * j / (ny - 1));
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                if (!g.laplace_admissible(z)) break;
                const cplx d = dispersion(g, K, z);
                const cplx dd = -0.5 * K * g.laplace_derivative(z);
                if (std::abs(dd) == 0.0) break;
                const cplx step = d / dd;
                z -= step;
                if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) {
                    ok = true;
                    break;
                }
            }
            if (!ok || !g.laplace_admissible(z) || z.real() <= 0.0) continue;
            if (std::abs(dispersion(g, K, z)) > 1e-10) continue;
            const bool dup = std::any_of(roots.begin(), roots.end(),
                                         [&](cplx r) { return std::abs(r - z) < 1e-8; });
            if (!dup) roots.push_back(z);
            if (static_cast<int>(roots.size()) >= expected) break;
        }
        if (static_cast<int>(roots.size()) >= expected) break;
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
    });
    return roots;
}

DispersionReport check_homog_stability(const FrequencyMarginal& g, double K, const ContourOptions& opt) {
    DispersionReport rep;
    rep.K = K;
    const auto scan = scan_imaginary_axis(g, K, opt);
    rep.winding_number = scan.winding;
    rep.boundary_margin = scan.margin;
    rep.contour_extent = scan.extent;
    if (scan.margin < inconclusive_margin) {
        std::ostringstream msg;
        msg << "homogeneous stability at K = " << K << " is inconclusive: boundary margin "
            << scan.margin << " < " << inconclusive_margin;
        throw InconclusiveError(msg.str());
    }
    if (scan.winding != 0) rep.unstable_roots = locate_unstable_roots(g, K, scan.winding, scan.extent);
    rep.stable = scan.winding == 0 && rep.unstable_roots.empty();
    return rep;
}

double critical_coupling_bisection(const FrequencyMarginal& g, double K_max, double tolerance) {
    auto unstable = [&](double K) { return scan_imaginary_axis(g, K, {1.0, 800}).winding > 0; };
    double lo = 0.0;
    double hi = -1.0;
    const double step = 0.02;
    for (double K = step; K <= K_max + 1e-12; K += (K < 10.0 ? step : 0.25)) {
        if (unstable(K)) {
            hi = K;
            break;
        }
        lo = K;
    }
    if (hi < 0.0) throw NotFoundError("homogeneous state is stable up to K_max = " + std::to_string(K_max));
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double critical_coupling(const FrequencyMarginal& g) {
    if (g.is_symmetric_unimodal()) return 2.0 / (pi * g.density(0.0));
    return critical_coupling_bisection(g);
}

double penrose_integral(const FrequencyMarginal& g, double Omega) {
    auto f = [&](double w) { return (g.density(Omega - w) - g.density(Omega + w)) / w; };
    std::vector<double> br;
    for (double p : g.feature_points()) {
        const double d = std::abs(p - Omega);
        if (d > 0.0) br.push_back(d);
    }
    std::sort(br.begin(), br.end());
    const double B = std::max(1.0, 2.0 * (std::abs(Omega) + g.frequency_scale()));
    const quad::Options opt{1e-14, 1e-11, 8000};
    return quad::integrate<double>(f, 0.0, B, opt, br).value +
           quad::integrate_to_infinity<double>(f, B, opt).value;
}

std::vector<double> penrose_critical_frequencies(const FrequencyMarginal& g) {
    if (!g.has_density()) throw UnsupportedKind("penrose criterion needs a density");
    const double W = 3.0 * g.frequency_scale();
    const int n = 600;  // even: Omega = 0 is a grid point
    std::vector<double> om(n + 1), P(n + 1);
    for (int i = 0; i <= n; ++i) {
        om[i] = -W + 2.0 * W * i / n;
        P[i] = penrose_integral(g, om[i]);
    }
    std::vector<double> out;
    const double zero_tol = 1e-12;
    for (int i = 0; i <= n; ++i)
        if (std::abs(P[i]) < zero_tol) out.push_back(om[i]);
    for (int i = 0; i < n; ++i) {
        if (std::abs(P[i]) < zero_tol || std::abs(P[i + 1]) < zero_tol) continue;
        if ((P[i] > 0) == (P[i + 1] > 0)) continue;
        boost::uintmax_t iters = 100;
        auto [a, b] = boost::math::tools::toms748_solve(
            [&](double x) { return penrose_integral(g, x); }, om[i], om[i + 1], P[i], P[i + 1],
            boost::math::tools::eps_tolerance<double>(40), iters);
        out.push_back(0.5 * (a + b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool penrose_criterion(const FrequencyMarginal& g, double K) {
    for (double Om : penrose_critical_frequencies(g))
        if (!(K < 2.0 / (pi * g.density(Om)))) return false;
    return true;
}

double principal_value_shifted(const FrequencyMarginal& g, double Omega) {
    if (!g.has_density()) throw UnsupportedKind("principal value needs a density");
    auto excised = [&](double eps) {
        auto f = [&](double w) { return (g.density(w - Omega) - g.density(-w - Omega)) / w; };
        std::vector<double> br;
        for (double p : g.feature_points()) {
            const double d = std::abs(p + Omega);
            if (d > eps) br.push_back(d);
        }
        std::sort(br.begin(), br.end());
        const double B = std::max(1.0, 2.0 * (std::abs(Omega) + g.frequency_scale()));
        const quad::Options opt{1e-15, 1e-13, 8000};
        return quad::integrate<double>(f, eps, B, opt, br).value +
               quad::integrate_to_infinity<double>(f, B, opt).value;
    };
    const double e = 1e-2;
    const double i1 = excised(e), i2 = excised(e / 2), i3 = excised(e / 4);
    const double r1 = 2.0 * i2 - i1;
    const double r2 = 2.0 * i3 - i2;
    return (4.0 * r2 - r1) / 3.0;
}

cplx f0_limit(const FrequencyMarginal& g, double Omega, double K) {
    return 0.5 * K * cplx(pi * g.density(-Omega), principal_value_shifted(g, Omega));
}

double uniform_decay_threshold(const FrequencyMarginal& g) {
    auto f = [&](double t) { return std::abs(g.fourier(t)); };
    const quad::Options opt{1e-13, 1e-10, 20000};
    double norm = 0.0;
    if (g.kind() == FrequencyMarginal::Kind::Tabulated) {
        norm = quad::integrate<double>(f, 0.0, g.table_extent(), opt).value;
    } else {
        const double span = g.kind() == FrequencyMarginal::Kind::Gaussian ? 10.0 / g.sigma()
                                                                          : 40.0 / g.fourier_decay_rate();
        std::vector<double> br;
        for (int i = 1; i < 64; ++i) br.push_back(span * i / 64.0);
        norm = quad::integrate<double>(f, 0.0, span, opt, br).value;
        if (g.kind() == FrequencyMarginal::Kind::CauchyMixture)
            norm += quad::integrate_to_infinity<double>(f, span, opt).value;
    }
    return 2.0 / norm;
}

}  // namespace kurastab
