#include "kurastab/oa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kurastab/errors.hpp"
#include "kurastab/parallel.hpp"

namespace kurastab {

namespace {

std::size_t pair_index(int n, int m, int n_max) {
    // Rows n = 1..n_max hold m = n..n_max.
    std::size_t idx = 0;
    for (int i = 1; i < n; ++i) idx += static_cast<std::size_t>(n_max - i + 1);
    return idx + static_cast<std::size_t>(m - n);
}

// (f * h)(tau_k) on a symmetric grid, zero outside it.
std::vector<cplx> convolve(const cplx* f, const cplx* h, int nodes, int origin, double dtau) {
    std::vector<cplx> out(nodes, cplx(0.0));
    for (int k = 0; k < nodes; ++k) {
        const int lo = std::max(0, k + origin - (nodes - 1));
        const int hi = std::min(nodes - 1, k + origin);
        cplx acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += f[k - j + origin] * h[j];
        out[k] = acc * dtau;
    }
    return out;
}

void check_cauchy(const FrequencyMarginal& g) {
    if (g.kind() != FrequencyMarginal::Kind::CauchyMixture)
        throw UnsupportedKind("manifold states need a Cauchy mixture, got " + g.kind_name());
}

}  // namespace

const std::vector<cplx>& OADeviation::pair(int n, int m) const {
    if (n > m) std::swap(n, m);
    return w.at(pair_index(n, m, n_max));
}

OADeviation deviation(const SpectralState& s, double a, int n_max) {
    if (s.origin == 0 || s.origin * 2 + 1 != s.nodes)
        throw MismatchedGrid("the deviation functional needs a symmetric full-line grid");
    if (n_max < 1 || 2 * n_max > s.L) throw ValidationError("deviation needs 1 <= n_max and 2 n_max <= L");
    const double tau_max = s.tau(s.nodes - 1);
    if (a * tau_max > 30.0) {
        std::ostringstream msg;
        msg << "weight e^{a tau} saturates: a tau_max = " << a * tau_max << " > 30";
        throw OverflowError(msg.str());
    }
    OADeviation d;
    d.n_max = n_max;
    d.a = a;
    d.tau.resize(s.nodes);
    for (int k = 0; k < s.nodes; ++k) d.tau[k] = s.tau(k);
    std::vector<std::pair<int, int>> pairs;
    for (int n = 1; n <= n_max; ++n)
        for (int m = n; m <= n_max; ++m) pairs.emplace_back(n, m);
    d.w.resize(pairs.size());
    const cplx* g = s.W.data();
    auto row = [&](int l) { return s.W.data() + static_cast<std::size_t>(l) * s.nodes; };
    parallel_for(pairs.size(), [&](std::size_t i) {
        const auto [n, m] = pairs[i];
        auto lhs = convolve(row(n + m), g, s.nodes, s.origin, s.dtau);
        const auto rhs = convolve(row(n), row(m), s.nodes, s.origin, s.dtau);
        for (int k = 0; k < s.nodes; ++k) lhs[k] -= rhs[k];
        d.w[i] = std::move(lhs);
    });

    double total = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [n, m] = pairs[i];
        const double mult = (n == m ? 1.0 : 2.0) / (n * m);
        const auto& w = d.w[i];
        double acc = 0.0;
        for (int k = 0; k < s.nodes; ++k) {
            cplx der;
            if (k == 0) der = (w[1] - w[0]) / s.dtau;
            else if (k == s.nodes - 1) der = (w[k] - w[k - 1]) / s.dtau;
            else der = (w[k + 1] - w[k - 1]) / (2.0 * s.dtau);
            const double wt = (k == 0 || k == s.nodes - 1) ? 0.5 : 1.0;
            acc += wt * std::exp(2.0 * a * d.tau[k]) * (std::norm(w[k]) + std::norm(der));
        }
        total += mult * acc * s.dtau;
    }
    d.norm = std::sqrt(total);
    return d;
}

DecayCheck decay_check(const std::vector<double>& times, const std::vector<double>& norms, double a) {
    if (times.size() != norms.size()) throw MismatchedGrid("decay_check: times and norms differ in length");
    if (times.size() < 10) throw ValidationError("decay_check needs at least 10 samples");
    DecayCheck out;
    if (std::all_of(norms.begin(), norms.end(), [](double v) { return v < 1e-7; })) {
        out.vacuous = true;
        out.passed = true;
        return out;
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(norms[i] > 0.0)) continue;
        const double y = std::log(norms[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++n;
    }
    if (n < 2) return out;
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    out.rate = -slope;
    out.passed = out.rate >= 0.9 * a;
    return out;
}

cplx manifold_mode(const std::vector<CauchyComponent>& poles, const std::vector<cplx>& amplitudes, int l,
                   double tau) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
        const auto& c = poles[j];
        sum += c.weight * std::pow(amplitudes[j], l) *
               std::exp(-cplx(c.half_width, c.center) * tau);
    }
    return sum;
}

SpectralState manifold_state(const FrequencyMarginal& g, const std::vector<cplx>& amplitudes, double K,
                             const SpectralGrid& grid) {
    check_cauchy(g);
    const auto& poles = g.components();
    if (amplitudes.size() != poles.size())
        throw ValidationError("manifold_state needs one amplitude per Cauchy component");
    for (const auto& al : amplitudes)
        if (std::abs(al) > 1.0) throw ValidationError("manifold amplitudes must satisfy |alpha| <= 1");
    if (grid.full_line && poles.size() != 1)
        throw UnsupportedKind("full-line manifold states are only built for a single Cauchy component");
    SpectralState s = blank_state(g, K, grid);
    for (int l = 0; l <= s.L; ++l) {
        for (int k = 0; k < s.nodes; ++k) {
            const double tau = s.tau(k);
            s.at(l, k) = grid.full_line ? std::pow(amplitudes[0], l) * s.marginal[k]
                                        : manifold_mode(poles, amplitudes, l, tau);
        }
    }
    std::copy(s.marginal.begin(), s.marginal.end(), s.W.begin());
    return s;
}

std::vector<cplx> pls_amplitudes(const FrequencyMarginal& g, double K, double r, double Omega) {
    check_cauchy(g);
    std::vector<cplx> out;
    for (const auto& c : g.components()) out.push_back(beta(cplx(c.center + Omega, -c.half_width) / (K * r)));
    return out;
}

SpectralState pls_state(const FrequencyMarginal& g, double K, const PLSBranchPoint& pls, const SpectralGrid& grid) {
    check_cauchy(g);
    if (grid.full_line) throw UnsupportedKind("PLS states are built on the half-line grid");
    auto comps = g.components();
    for (auto& c : comps) c.center += pls.omega;
    const auto shifted = FrequencyMarginal::cauchy_mixture(comps);
    return manifold_state(shifted, pls_amplitudes(g, K, pls.r, pls.omega), K, grid);
}

cplx ReducedOA::order_parameter() const {
    cplx rho = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) rho += poles[j].weight * alpha[j];
    return std::conj(rho);
}

std::vector<cplx> reduced_rhs(const ReducedOA& s) {
    const cplx rho = std::conj(s.order_parameter());
    std::vector<cplx> d(s.alpha.size());
    for (std::size_t j = 0; j < s.alpha.size(); ++j) {
        const auto& c = s.poles[j];
        const cplx a = s.alpha[j];
        d[j] = -cplx(c.half_width, c.center) * a + 0.5 * s.K * (rho - std::conj(rho) * a * a);
    }
    return d;
}

TrajectoryRecord integrate_reduced(ReducedOA& s, double T, double dt, int sample_every) {
    if (!(T > 0.0) || !(dt > 0.0)) throw ValidationError("reduced integration needs T > 0 and dt > 0");
    if (s.alpha.size() != s.poles.size()) throw ValidationError("one amplitude per pole is required");
    const long n = static_cast<long>(std::ceil(T / dt - 1e-9));
    const double h = T / n;
    const double t0 = s.t;
    TrajectoryRecord rec;
    rec.times.push_back(s.t);
    rec.r_values.push_back(s.order_parameter());
    const std::size_t m = s.alpha.size();
    for (long i = 1; i <= n; ++i) {
        const auto base = s.alpha;
        auto stage = [&](const std::vector<cplx>& k, double c) {
            for (std::size_t j = 0; j < m; ++j) s.alpha[j] = base[j] + c * k[j];
            return reduced_rhs(s);
        };
        s.alpha = base;
        const auto k1 = reduced_rhs(s);
        const auto k2 = stage(k1, 0.5 * h);
        const auto k3 = stage(k2, 0.5 * h);
        const auto k4 = stage(k3, h);
        for (std::size_t j = 0; j < m; ++j)
            s.alpha[j] = base[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        s.t = i == n ? t0 + T : s.t + h;
        if (i % std::max(1, sample_every) == 0 || i == n) {
            rec.times.push_back(s.t);
            rec.r_values.push_back(s.order_parameter());
        }
    }
    return rec;
}

}  // namespace kurastab
