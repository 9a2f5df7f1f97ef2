#include <cmath>

#include "doctest.h"
#include "kurastab/errors.hpp"
#include "kurastab/volterra.hpp"

using namespace kurastab;

namespace {

// Cauchy K = 1: kernel 0.5 e^{-t}; Laplace algebra gives R = 0.5 e^{-t/2}.
VolterraSystem cauchy_system(double h, double T) {
    const auto g = FrequencyMarginal::cauchy(1.0);
    const auto n = static_cast<std::size_t>(std::llround(T / h)) + 1;
    std::vector<cplx> k(n), f(n);
    for (std::size_t j = 0; j < n; ++j) {
        k[j] = kernel_hom(g, 1.0, j * h);
        f[j] = std::exp(-(j * h));
    }
    return scalar_system(h, k, f);
}

double resolvent_error(double h) {
    const auto sys = resolvent(cauchy_system(h, 20.0));
    double worst = 0.0;
    for (std::size_t j = 0; j < sys.size(); ++j)
        worst = std::max(worst, std::abs(sys.resolvent[j][0] - 0.5 * std::exp(-0.5 * sys.time(j))));
    return worst;
}

}  // namespace

TEST_CASE("scalar solution and resolvent") {
    const auto sol = solve_volterra(cauchy_system(1e-3, 20.0));
    double worst = 0.0;
    for (std::size_t j = 0; j < sol.size(); ++j)
        worst = std::max(worst, std::abs(sol.solution[j][0] - std::exp(-0.5 * sol.time(j))));
    CHECK(worst < 1e-6);
    CHECK(discrete_residual(sol) < 1e-12);

    const double e1 = resolvent_error(1e-3);
    const double e2 = resolvent_error(5e-4);
    CHECK(e1 < 1e-4);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("matrix system decouples on a diagonal kernel") {
    // diag(0.5 e^{-t}, -e^{-t}) has resolvent diag(0.5 e^{-t/2}, -e^{-2t})
    const double h = 2e-3;
    const std::size_t n = 5001;
    VolterraSystem sys;
    sys.dim = 2;
    sys.h = h;
    for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(-(j * h));
        sys.kernel.push_back({0.5 * e, 0.0, 0.0, -e});
        sys.forcing.push_back({e, e});
    }
    const auto r = resolvent(sys, true);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = j * h;
        worst = std::max(worst, std::abs(r.resolvent[j][0] - 0.5 * std::exp(-0.5 * t)));
        worst = std::max(worst, std::abs(r.resolvent[j][3] + std::exp(-2.0 * t)));
        worst = std::max(worst, std::abs(r.resolvent[j][1]) + std::abs(r.resolvent[j][2]));
    }
    CHECK(worst < 1e-5);
    REQUIRE(r.resolvent_constant.has_value());
    // mean of 0.5 e^{-t/2} over the last fifth, [8, 10]
    CHECK(std::abs((*r.resolvent_constant)[0] - 0.5 * (std::exp(-4.0) - std::exp(-5.0))) < 1e-5);

    const auto s = solve_volterra(sys);
    // second component: x - (-e^{-t}) * x = e^{-t}  =>  x = e^{-2t}
    CHECK(std::abs(s.solution[n - 1][1] - std::exp(-2.0 * h * (n - 1))) < 1e-8);
}

TEST_CASE("trapezoidal laplace transform") {
    const double h = 1e-3;
    std::vector<Mat2> samples;
    for (int j = 0; j <= 40000; ++j) {
        const double e = std::exp(-(j * h));
        samples.push_back({e, 2.0 * e, 0.0, e * e});
    }
    for (cplx z : {cplx(0.5), cplx(1.0, 1.0)}) {
        const auto m = laplace_samples(samples, h, z);
        CHECK(std::abs(m[0] - 1.0 / (z + 1.0)) < 1e-6);
        CHECK(std::abs(m[1] - 2.0 / (z + 1.0)) < 2e-6);
        CHECK(std::abs(m[3] - 1.0 / (z + 2.0)) < 1e-6);
    }
}

TEST_CASE("damping rate model selection") {
    std::vector<double> t, ex, alg, rising;
    for (int i = 0; i <= 400; ++i) {
        const double s = 1.0 + i * 0.025;
        t.push_back(s);
        ex.push_back(3.0 * std::exp(-0.7 * s));
        alg.push_back(0.2 * std::pow(s, -2.0));
        rising.push_back(1e-3 * std::exp(s));
    }
    const auto fe = damping_rate(t, ex, 1.0, 11.0);
    CHECK(fe.model == DecayModel::Exponential);
    CHECK(fe.rate == doctest::Approx(0.7).epsilon(1e-9));
    const auto fa = damping_rate(t, alg, 1.0, 11.0);
    CHECK(fa.model == DecayModel::Algebraic);
    CHECK(fa.rate == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(damping_rate(t, rising, 1.0, 11.0), InsufficientDecayError);
    CHECK_THROWS_AS(damping_rate(t, ex, 1.0, 1.2), ValidationError);
}
