#include <cmath>

#include "doctest.h"
#include "kurastab/errors.hpp"
#include "kurastab/spectral.hpp"

using namespace kurastab;

namespace {

const SpectralGrid small_grid{8, 512, 20.0, false};

Perturbation harmonic(int mode, cplx amp) {
    Perturbation p;
    p.mode = mode;
    p.amplitude = amp;
    p.profile = Perturbation::Profile::Harmonic;
    return p;
}

}  // namespace

TEST_CASE("grid layout") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    const auto half = blank_state(g, 1.0, small_grid);
    CHECK(half.nodes == 512);
    CHECK(half.origin == 0);
    CHECK(half.tau(511) == doctest::Approx(20.0));
    const auto full = blank_state(g, 1.0, {8, 512, 20.0, true});
    CHECK(full.nodes == 1023);
    CHECK(full.origin == 511);
    CHECK(full.tau(0) == doctest::Approx(-20.0));
    CHECK(std::abs(full.marginal[full.origin] - cplx(1.0)) < 1e-15);
}

TEST_CASE("free transport is an exact shift") {
    // K = 0: W_l(t, tau) = W_l(0, tau + l t)
    const auto g = FrequencyMarginal::cauchy(1.0);
    Perturbation p;
    p.mode = 2;
    p.amplitude = 0.1;
    auto s = init_state(g, 0.0, small_grid, {p});
    const double T = 1.3;
    run(s, T, 0.5 * s.dtau);
    double worst = 0.0;
    for (int k = 0; k < s.nodes; ++k) {
        const double x = s.tau(k) + 2 * T;
        const cplx want = x <= 20.0 ? 0.1 * std::exp(-x) * g.fourier(x) : cplx(0.0);
        worst = std::max(worst, std::abs(s.at(2, k) - want));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("linear response of a harmonic perturbation") {
    // x(t) = eps e^{-t} + (K/2) int_0^t e^{-(t-s)} x(s) ds  =>  x = eps e^{(K/2 - 1) t}
    const auto g = FrequencyMarginal::cauchy(1.0);
    for (double K : {1.0, 3.0}) {
        const double eps = 1e-5;
        auto s = init_state(g, K, small_grid, {harmonic(1, eps)});
        const auto rec = run(s, 4.0, 0.5 * s.dtau, {20});
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            const double want = eps * std::exp((K / 2 - 1) * rec.times[i]);
            CHECK(std::abs(rec.r_values[i] - want) < 1e-4 * want);
        }
    }
}

TEST_CASE("conservation and bounds") {
    const auto g = FrequencyMarginal::tri_cauchy(0.1, 0.55, 0.17);
    auto s = init_state(g, 3.0, small_grid, {harmonic(1, cplx(0.1, 0.05)), harmonic(3, 0.02)});
    const std::vector<cplx> w0(s.W.begin(), s.W.begin() + s.nodes);
    const auto rec = run(s, 10.0, 0.5 * s.dtau, {5});
    for (int k = 0; k < s.nodes; ++k) CHECK(s.at(0, k) == w0[k]);
    for (const cplx& r : rec.r_values) CHECK(std::abs(r) <= 1.0 + 1e-6);
}

TEST_CASE("step validation") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    auto s = init_state(g, 1.0, small_grid);
    CHECK_THROWS_AS(step(s, 2.0 * s.dtau), ValidationError);
    CHECK_THROWS_AS(init_state(g, 1.0, small_grid, {harmonic(1, 2.0)}), ValidationError);
}

TEST_CASE("weighted norm of the homogeneous state") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    auto s = init_state(g, 1.0, small_grid);
    CHECK(weighted_state_norm(s, WeightSpec::exponential(0.5)) == 0.0);
    auto p = init_state(g, 1.0, small_grid, {harmonic(1, 1e-3)});
    // |u_1|^2 + |u_1'|^2 = 2e-6 e^{-2 tau}, weight e^{tau}: integral of 2e-6 e^{-tau}
    CHECK(weighted_state_norm(p, WeightSpec::exponential(0.5)) ==
          doctest::Approx(std::sqrt(2e-6 * (1 - std::exp(-20.0)))).epsilon(1e-3));
}
