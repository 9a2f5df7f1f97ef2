#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kurastab/ensemble.hpp"
#include "kurastab/errors.hpp"

using namespace kurastab;
using std::numbers::pi;

TEST_CASE("seeded sampling is reproducible") {
    const auto g = FrequencyMarginal::tri_cauchy(0.1, 0.55, 0.17);
    const auto a = sample_ensemble(g, 5000, 42, {PhaseInit::Kind::Bump, 0.3});
    const auto b = sample_ensemble(g, 5000, 42, {PhaseInit::Kind::Bump, 0.3});
    const auto c = sample_ensemble(g, 5000, 43, {PhaseInit::Kind::Bump, 0.3});
    CHECK(a.theta == b.theta);
    CHECK(a.omega == b.omega);
    CHECK(a.omega != c.omega);
}

TEST_CASE("sample statistics") {
    const std::size_t N = 200000;
    const auto e = sample_ensemble(FrequencyMarginal::cauchy(0.7, 0.2), N, 7, {PhaseInit::Kind::Bump, 0.5});
    auto w = e.omega;
    std::sort(w.begin(), w.end());
    // quartiles of a Cauchy law sit at center -+ half-width
    CHECK(std::abs(w[N / 4] - (0.2 - 0.7)) < 0.02);
    CHECK(std::abs(w[N / 2] - 0.2) < 0.01);
    CHECK(std::abs(w[3 * N / 4] - (0.2 + 0.7)) < 0.02);
    // first Fourier moment of (1 + eps cos) / (2 pi) is eps / 2
    CHECK(std::abs(e.order_parameter() - cplx(0.25)) < 5.0 / std::sqrt(double(N)));
    for (double th : e.theta) REQUIRE((th >= 0.0 && th < 2 * pi));

    const auto gs = sample_ensemble(FrequencyMarginal::gaussian(1.3), N, 7, {});
    double m2 = 0.0;
    for (double x : gs.omega) m2 += x * x;
    CHECK(std::abs(std::sqrt(m2 / N) - 1.3) < 0.01);
    CHECK(std::abs(gs.order_parameter()) < 5.0 / std::sqrt(double(N)));
}

TEST_CASE("two oscillators lock at the analytic phase lag") {
    // phi = theta_1 - theta_2 obeys phi' = (w_1 - w_2) - K sin(phi)
    OscillatorEnsemble e;
    e.theta = {0.0, 0.0};
    e.omega = {0.3, -0.3};
    e.K = 1.0;
    integrate_ensemble(e, 40.0, 0.01);
    double phi = e.theta[0] - e.theta[1];
    phi = std::remainder(phi, 2 * pi);
    CHECK(std::abs(phi - std::asin(0.6)) < 1e-8);
}

TEST_CASE("rotation and galilean equivariance") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    const double K = 2.5, c = 1.1, W = 0.8, T = 3.0, dt = 0.004;
    auto base = sample_ensemble(g, 2000, 3, {PhaseInit::Kind::Bump, 0.4}, K);
    auto rotated = base;
    for (double& th : rotated.theta) th = std::fmod(th + c, 2 * pi);
    auto boosted = base;
    for (double& w : boosted.omega) w += W;

    const auto r0 = integrate_ensemble(base, T, dt, 25);
    const auto r1 = integrate_ensemble(rotated, T, dt, 25);
    const auto r2 = integrate_ensemble(boosted, T, dt, 25);
    double rot = 0.0, gal = 0.0;
    for (std::size_t i = 0; i < r0.times.size(); ++i) {
        rot = std::max(rot, std::abs(r1.r_values[i] - r0.r_values[i] * std::polar(1.0, c)));
        gal = std::max(gal, std::abs(r2.r_values[i] - r0.r_values[i] * std::polar(1.0, W * r0.times[i])));
    }
    CHECK(rot < 1e-10);
    CHECK(gal < 1e-8);
}

TEST_CASE("validation") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    auto e = sample_ensemble(g, 100, 1, {}, 4.0);
    CHECK_THROWS_AS(integrate_ensemble(e, 1.0, 0.01), ValidationError);
    CHECK_THROWS_AS(sample_ensemble(g, 1, 1, {}), ValidationError);
    CHECK_THROWS_AS(sample_ensemble(g, 10, 1, {PhaseInit::Kind::Bump, 1.5}), ValidationError);

    TrajectoryRecord a, b;
    a.times = {0.0, 0.1};
    a.r_values = {0.0, 0.0};
    b.times = {0.0, 0.2};
    b.r_values = {0.0, 0.0};
    CHECK_THROWS_AS(compare_to_continuum(a, b, 1.0), MismatchedGrid);
}
