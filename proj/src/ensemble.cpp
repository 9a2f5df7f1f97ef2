#include "kurastab/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <span>

#include <boost/math/distributions/normal.hpp>

#include "kurastab/errors.hpp"

namespace kurastab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

cplx pairwise_sum(std::span<const cplx> v) {
    if (v.size() <= 64) {
        cplx s = 0.0;
        for (const auto& x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

cplx mean_field(std::span<const double> theta, std::vector<cplx>& buf) {
    buf.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) buf[i] = std::polar(1.0, theta[i]);
    return pairwise_sum(buf) / static_cast<double>(theta.size());
}

double wrap(double th) {
    th = std::fmod(th, two_pi);
    if (th < 0.0) th += two_pi;
    if (th >= two_pi) th = 0.0;
    return th;
}

// Inverse of the CDF (theta + eps sin theta) / (2 pi) on [0, 2 pi).
double bump_phase(double u, double eps) {
    const double target = two_pi * u;
    double th = target;
    for (int it = 0; it < 60; ++it) {
        const double f = th + eps * std::sin(th) - target;
        const double step = f / (1.0 + eps * std::cos(th));
        th = std::clamp(th - step, 0.0, two_pi);
        if (std::abs(step) < 1e-15) break;
    }
    return th;
}

}  // namespace

cplx OscillatorEnsemble::order_parameter() const {
    std::vector<cplx> buf;
    return mean_field(theta, buf);
}

OscillatorEnsemble sample_ensemble(const FrequencyMarginal& g, std::size_t N, std::uint64_t seed,
                                   const PhaseInit& init, double K) {
    if (N < 2) throw ValidationError("ensemble size must be at least 2");
    if (g.kind() == FrequencyMarginal::Kind::Tabulated)
        throw UnsupportedKind("ensemble sampling needs a Cauchy mixture or Gaussian marginal");
    if (init.kind == PhaseInit::Kind::Bump && !(std::abs(init.epsilon) <= 1.0))
        throw ValidationError("bump amplitude must satisfy |epsilon| <= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto open_unit = [&] {
        double u = unif(rng);
        while (u <= 0.0) u = unif(rng);
        return u;
    };

    OscillatorEnsemble e;
    e.K = K;
    e.omega.resize(N);
    e.theta.resize(N);
    if (g.kind() == FrequencyMarginal::Kind::Gaussian) {
        const boost::math::normal_distribution<double> nd(0.0, g.sigma());
        for (auto& w : e.omega) w = boost::math::quantile(nd, open_unit());
    } else {
        const auto& comps = g.components();
        std::vector<double> cum;
        double acc = 0.0;
        for (const auto& c : comps) cum.push_back(acc += c.weight);
        for (auto& w : e.omega) {
            const double pick = unif(rng) * acc;
            std::size_t j = 0;
            while (j + 1 < comps.size() && pick >= cum[j]) ++j;
            w = comps[j].center + comps[j].half_width * std::tan(std::numbers::pi * (open_unit() - 0.5));
        }
    }
    for (auto& th : e.theta) {
        const double u = unif(rng);
        th = init.kind == PhaseInit::Kind::Uniform ? two_pi * u : wrap(bump_phase(u, init.epsilon));
    }
    return e;
}

TrajectoryRecord integrate_ensemble(OscillatorEnsemble& e, double T, double dt, int sample_every) {
    if (!(T > 0.0)) throw ValidationError("ensemble horizon must be positive");
    if (!(dt > 0.0) || dt > 0.01 / std::max(1.0, e.K) * (1.0 + 1e-12))
        throw ValidationError("ensemble step must satisfy 0 < dt <= 0.01 / max(1, K)");
    const std::size_t n = e.size();
    const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
    const double h = T / steps;
    const double t0 = e.t;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::vector<cplx> buf;

    auto rhs = [&](const std::vector<double>& th, std::vector<double>& out) {
        const cplx r = mean_field(th, buf);
        for (std::size_t i = 0; i < n; ++i) out[i] = e.omega[i] + e.K * std::imag(r * std::conj(buf[i]));
    };
    TrajectoryRecord rec;
    auto sample = [&] {
        rec.times.push_back(e.t);
        rec.r_values.push_back(mean_field(e.theta, buf));
    };
    sample();
    const int every = std::max(1, sample_every);
    for (long s = 1; s <= steps; ++s) {
        rhs(e.theta, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = e.theta[i] + 0.5 * h * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = e.theta[i] + 0.5 * h * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = e.theta[i] + h * k3[i];
        rhs(tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            e.theta[i] = wrap(e.theta[i] + (h / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]));
        e.t = s == steps ? t0 + T : e.t + h;
        if (s % every == 0 || s == steps) sample();
    }
    return rec;
}

double compare_to_continuum(const TrajectoryRecord& ensemble, const TrajectoryRecord& pde, double horizon) {
    if (ensemble.times.size() != pde.times.size())
        throw MismatchedGrid("trajectories have different sample counts");
    double worst = 0.0;
    for (std::size_t i = 0; i < ensemble.times.size(); ++i) {
        if (std::abs(ensemble.times[i] - pde.times[i]) > 1e-9 * std::max(1.0, std::abs(pde.times[i])))
            throw MismatchedGrid("trajectories have different sample times");
        if (ensemble.times[i] > horizon + 1e-12) break;
        worst = std::max(worst, std::abs(ensemble.r_values[i] - pde.r_values[i]));
    }
    return worst;
}

}  // namespace kurastab
