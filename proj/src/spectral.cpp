#include "kurastab/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kurastab/errors.hpp"

namespace kurastab {

namespace {

constexpr double blowup_bound = 1.0 + 1e-6;

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

cplx clipped(cplx v, const std::array<cplx, 4>& st) {
    double rlo = st[0].real(), rhi = rlo, ilo = st[0].imag(), ihi = ilo;
    for (const auto& c : st) {
        rlo = std::min(rlo, c.real());
        rhi = std::max(rhi, c.real());
        ilo = std::min(ilo, c.imag());
        ihi = std::max(ihi, c.imag());
    }
    return {clip(v.real(), rlo, rhi), clip(v.imag(), ilo, ihi)};
}

// Lagrange weights for nodes x0..x0+3 at offset x from node x0.
std::array<double, 4> lagrange4(double x) {
    return {-(x - 1) * (x - 2) * (x - 3) / 6.0, x * (x - 2) * (x - 3) / 2.0,
            -x * (x - 1) * (x - 3) / 2.0, x * (x - 1) * (x - 2) / 6.0};
}

// u(tau) <- u(tau + shift); zero inflow past the right end.
void transport_row(cplx* row, int n, double shift_nodes, std::vector<cplx>& tmp) {
    if (shift_nodes == 0.0) return;
    tmp.assign(row, row + n);
    auto val = [&](long k) -> cplx { return k < n ? tmp[k] : cplx(0.0); };
    const long whole = static_cast<long>(std::floor(shift_nodes));
    const double frac = shift_nodes - whole;
    const auto w_mid = lagrange4(1.0 + frac);
    const auto w_edge = lagrange4(frac);
    for (long i = 0; i < n; ++i) {
        const long j = i + whole;
        if (frac == 0.0) {
            row[i] = val(j);
            continue;
        }
        const long start = j >= 1 ? j - 1 : 0;
        const auto& w = j >= 1 ? w_mid : w_edge;
        std::array<cplx, 4> st{val(start), val(start + 1), val(start + 2), val(start + 3)};
        const cplx v = w[0] * st[0] + w[1] * st[1] + w[2] * st[2] + w[3] * st[3];
        row[i] = clipped(v, st);
    }
}

void transport(SpectralState& s, double h) {
    std::vector<cplx> tmp;
    for (int l = 1; l <= s.L; ++l)
        transport_row(&s.W[static_cast<std::size_t>(l) * s.nodes], s.nodes, l * h / s.dtau, tmp);
}

void coupling_rhs(const SpectralState& s, const cplx* W, cplx* out) {
    const int n = s.nodes;
    const int L = s.L;
    std::fill(out, out + n, cplx(0.0));  // mode 0 is frozen
    if (s.mode == CouplingMode::Nonlinear) {
        const cplx x = W[n + s.origin];
        const cplx xb = std::conj(x);
        const double half_k = 0.5 * s.K;
        for (int l = 1; l <= L; ++l) {
            const cplx a = half_k * l * x;
            const cplx b = half_k * l * xb;
            const cplx* lo = W + static_cast<std::size_t>(l - 1) * n;
            const cplx* hi = l < L ? W + static_cast<std::size_t>(l + 1) * n : nullptr;
            cplx* o = out + static_cast<std::size_t>(l) * n;
            for (int k = 0; k < n; ++k) o[k] = a * lo[k] - (hi ? b * hi[k] : cplx(0.0));
        }
    } else {
        const double c = s.fixed_coupling;
        for (int l = 1; l <= L; ++l) {
            const cplx* lo = W + static_cast<std::size_t>(l - 1) * n;
            const cplx* hi = l < L ? W + static_cast<std::size_t>(l + 1) * n : nullptr;
            cplx* o = out + static_cast<std::size_t>(l) * n;
            for (int k = 0; k < n; ++k) o[k] = (c * l) * (lo[k] - (hi ? hi[k] : cplx(0.0)));
        }
    }
}

void coupling(SpectralState& s, double h) {
    if (s.mode == CouplingMode::Nonlinear ? s.K == 0.0 : s.fixed_coupling == 0.0) return;
    const std::size_t m = s.W.size();
    std::vector<cplx> k1(m), k2(m), k3(m), k4(m), tmp(m);
    auto axpy = [&](const std::vector<cplx>& k, double c) {
        for (std::size_t i = 0; i < m; ++i) tmp[i] = s.W[i] + c * k[i];
    };
    coupling_rhs(s, s.W.data(), k1.data());
    axpy(k1, 0.5 * h);
    coupling_rhs(s, tmp.data(), k2.data());
    axpy(k2, 0.5 * h);
    coupling_rhs(s, tmp.data(), k3.data());
    axpy(k3, h);
    coupling_rhs(s, tmp.data(), k4.data());
    for (std::size_t i = 0; i < m; ++i) s.W[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

SpectralState blank_state(const FrequencyMarginal& g, double K, const SpectralGrid& grid) {
    if (grid.L < 2) throw ValidationError("spectral grid: L must be >= 2");
    if (grid.N < 64) throw ValidationError("spectral grid: N must be >= 64");
    if (grid.tau_max < 10.0) throw ValidationError("spectral grid: tau_max must be >= 10");
    SpectralState s;
    s.L = grid.L;
    s.K = K;
    s.dtau = grid.tau_max / (grid.N - 1);
    if (grid.full_line) {
        s.nodes = 2 * grid.N - 1;
        s.tau0 = -grid.tau_max;
        s.origin = grid.N - 1;
    } else {
        s.nodes = grid.N;
        s.tau0 = 0.0;
        s.origin = 0;
    }
    s.W.assign(static_cast<std::size_t>(s.L + 1) * s.nodes, cplx(0.0));
    s.marginal.resize(s.nodes);
    for (int k = 0; k < s.nodes; ++k) {
        const double tau = k == s.origin ? 0.0 : s.tau(k);
        s.marginal[k] = g.fourier(tau);
    }
    return s;
}

SpectralState init_state(const FrequencyMarginal& g, double K, const SpectralGrid& grid,
                         const std::vector<Perturbation>& perturbations) {
    SpectralState s = blank_state(g, K, grid);
    std::copy(s.marginal.begin(), s.marginal.end(), s.W.begin());
    for (const auto& p : perturbations) {
        if (p.mode < 1 || p.mode > s.L) {
            std::ostringstream msg;
            msg << "perturbation mode " << p.mode << " outside 1.." << s.L;
            throw ValidationError(msg.str());
        }
        for (int k = 0; k < s.nodes; ++k) {
            const double tau = s.tau(k);
            const double shape = p.profile == Perturbation::Profile::Bump ? std::exp(-std::abs(tau)) : 1.0;
            s.at(p.mode, k) += p.amplitude * shape * s.marginal[k];
        }
    }
    for (int l = 1; l <= s.L; ++l)
        for (int k = 0; k < s.nodes; ++k)
            if (std::abs(s.at(l, k)) > 1.0) {
                std::ostringstream msg;
                msg << "perturbation makes |W_" << l << "| exceed 1 at tau = " << s.tau(k);
                throw ValidationError(msg.str());
            }
    return s;
}

void step(SpectralState& s, double dt) {
    if (!(dt > 0.0)) throw ValidationError("time step must be positive");
    if (dt > s.dtau * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "time step " << dt << " exceeds the grid step " << s.dtau;
        throw ValidationError(msg.str());
    }
    transport(s, 0.5 * dt);
    coupling(s, dt);
    transport(s, 0.5 * dt);
    s.t += dt;
    if (s.mode == CouplingMode::Nonlinear) {
        for (std::size_t i = static_cast<std::size_t>(s.nodes); i < s.W.size(); ++i) {
            if (!(std::abs(s.W[i]) <= blowup_bound)) {
                std::ostringstream msg;
                msg << "mode " << i / s.nodes << " left the unit disc at t = " << s.t;
                throw BlowUpError(msg.str());
            }
        }
    }
}

TrajectoryRecord run(SpectralState& s, double T, double dt, const RunOptions& opt) {
    if (!(T > 0.0)) throw ValidationError("run horizon must be positive");
    if (!(dt > 0.0)) throw ValidationError("time step must be positive");
    const long n = static_cast<long>(std::ceil(T / dt - 1e-9));
    const double h = T / n;
    const double t0 = s.t;
    TrajectoryRecord rec;
    auto sample = [&] {
        rec.times.push_back(s.t);
        rec.r_values.push_back(s.order_parameter());
        if (opt.norm_weight) rec.norms.push_back(weighted_state_norm(s, *opt.norm_weight, opt.reference));
    };
    sample();
    const int every = std::max(1, opt.sample_every);
    for (long i = 1; i <= n; ++i) {
        step(s, h);
        if (i == n) s.t = t0 + T;
        if (i % every == 0 || i == n) sample();
    }
    return rec;
}

std::vector<cplx> homogeneous_reference(const SpectralState& s) {
    std::vector<cplx> ref(s.W.size(), cplx(0.0));
    std::copy(s.marginal.begin(), s.marginal.end(), ref.begin());
    return ref;
}

double weighted_state_norm(const SpectralState& s, const WeightSpec& w, const std::vector<cplx>* reference) {
    if (reference && reference->size() != s.W.size())
        throw MismatchedGrid("norm reference does not match the state grid");
    const int n = s.nodes;
    const int first = s.origin;
    const int count = n - first;
    std::vector<double> phi2(count);
    for (int k = 0; k < count; ++k) {
        const double p = w(s.tau(first + k));
        if (!std::isfinite(p)) throw OverflowError("weight overflows on the state grid");
        phi2[k] = p * p;
    }
    auto u = [&](int l, int k) {
        const std::size_t i = static_cast<std::size_t>(l) * n + k;
        cplx v = s.W[i];
        if (reference) v -= (*reference)[i];
        else if (l == 0) v -= s.marginal[k];
        return v;
    };
    double total = 0.0;
    for (int l = 0; l <= s.L; ++l) {
        for (int j = 0; j < count; ++j) {
            const int k = first + j;
            cplx d;
            if (k == 0) d = (u(l, 1) - u(l, 0)) / s.dtau;
            else if (k == n - 1) d = (u(l, k) - u(l, k - 1)) / s.dtau;
            else d = (u(l, k + 1) - u(l, k - 1)) / (2.0 * s.dtau);
            const double wt = (j == 0 || j == count - 1) ? 0.5 : 1.0;
            total += wt * phi2[j] * (std::norm(u(l, k)) + std::norm(d));
        }
    }
    return std::sqrt(total * s.dtau);
}

}  // namespace kurastab
