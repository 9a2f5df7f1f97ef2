#include <cmath>

#include "doctest.h"
#include "kurastab/errors.hpp"
#include "kurastab/pls.hpp"

using namespace kurastab;

namespace {

cplx ref_beta(double x) {
    if (std::abs(x) <= 1.0) return cplx(std::sqrt(1 - x * x), -x);
    return cplx(0.0, -x + std::copysign(std::sqrt(x * x - 1), x));
}

// Trapezoid on omega = s / (1 - s^2), s in (-1, 1).
template <class F>
cplx line_integral(F&& f, int n = 2'000'000) {
    cplx acc = 0.0;
    const double ds = 2.0 / n;
    for (int i = 1; i < n; ++i) {
        const double s = -1.0 + i * ds;
        const double w = s / (1.0 - s * s);
        acc += f(w) * ((1.0 + s * s) / ((1.0 - s * s) * (1.0 - s * s)));
    }
    return acc * ds;
}

}  // namespace

TEST_CASE("beta on the real line") {
    CHECK(std::abs(beta(0.0) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(beta(1.0) - cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(beta(2.0) - cplx(0.0, -2.0 + std::sqrt(3.0))) < 1e-15);
    CHECK(std::abs(beta(-2.0) - cplx(0.0, 2.0 - std::sqrt(3.0))) < 1e-15);
    for (double x : {-3.0, -0.4, 0.9, 1.5}) {
        CHECK(std::abs(beta(x) - ref_beta(x)) < 1e-15);
        // beta(x) lies on the unit circle inside [-1, 1] and |beta| < 1 outside
        if (std::abs(x) <= 1) CHECK(std::abs(std::abs(beta(x)) - 1.0) < 1e-14);
        else CHECK(std::abs(beta(x)) < 1.0);
    }
    // continuation from below agrees with the real-line branch
    for (double x : {-2.0, 0.3, 1.7})
        CHECK(std::abs(beta(cplx(x, -1e-12)) - ref_beta(x)) < 1e-6);
}

TEST_CASE("self-consistency map") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    const double K = 4.0, r = std::sqrt(0.5);
    auto integrand = [&](double w) { return ref_beta(w / (K * r)) * g.density(w); };
    const cplx brute = line_integral(integrand) / r;
    CHECK(std::abs(self_consistency(g, K, r, 0.0) - brute) < 1e-6);
    CHECK(std::abs(self_consistency(g, K, r, 0.0) - 1.0) < 1e-12);

    const auto tri = FrequencyMarginal::tri_cauchy(0.1, 0.55, 0.17);
    for (auto [rr, W] : {std::pair{0.3, 0.0}, {0.05, 0.4}, {0.6, -0.2}}) {
        const cplx a = self_consistency(tri, 2.0, rr, W);
        const cplx b = self_consistency_quadrature(tri, 2.0, rr, W);
        CHECK(std::abs(a - b) < 1e-8);
    }
}

TEST_CASE("cauchy partially locked state") {
    // Residues give r = sqrt(1 - 2 Delta / K).
    const auto g = FrequencyMarginal::cauchy(1.0);
    for (double K : {3.0, 4.0}) {
        const auto sols = solve_pls(g, K);
        REQUIRE(sols.size() == 1);
        CHECK(std::abs(sols[0].r - std::sqrt(1 - 2 / K)) < 1e-9);
        CHECK(std::abs(sols[0].omega) < 1e-9);
        const auto st = pls_stability(g, K, sols[0]);
        CHECK(st.stability == PlsStability::Stable);
        CHECK(st.det_at_zero < 1e-6);
    }
    CHECK(solve_pls(g, 1.5).empty());
}

TEST_CASE("J integrals against direct quadrature") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    const double K = 4.0, r = std::sqrt(0.5);
    for (cplx z : {cplx(1.0), cplx(0.5, 1.0)}) {
        for (int k : {0, 2}) {
            auto integrand = [&](double w) {
                const cplx b = ref_beta(w / (K * r));
                return std::pow(b, k) / (z + cplx(0.0, w) + K * r * b) * g.density(w);
            };
            const cplx brute = line_integral(integrand);
            CHECK(std::abs(j_integral(g, K, k, z, r) - brute) < 1e-6);
            CHECK(std::abs(j_integral_quadrature(g, K, k, z, r) - brute) < 1e-6);
        }
    }
}

TEST_CASE("determinant has the neutral zero at the origin") {
    const auto tri = FrequencyMarginal::tri_cauchy(0.1, 0.55, 0.17);
    for (const auto& s : solve_pls(tri, 2.4)) {
        CHECK(s.residual < 1e-10);
        CHECK(std::abs(stability_determinant(tri, 2.4, 0.0, s.r, s.omega)) < 1e-6);
    }
}

TEST_CASE("rotating states come in mirror pairs") {
    const auto tri = FrequencyMarginal::tri_cauchy(0.1, 0.55, 0.17);
    const auto sols = solve_pls(tri, 1.8);
    int rotating = 0;
    for (const auto& s : sols) {
        if (std::abs(s.omega) < 1e-6) continue;
        ++rotating;
        bool mirrored = false;
        for (const auto& t : sols)
            mirrored |= std::abs(t.r - s.r) < 1e-6 && std::abs(t.omega + s.omega) < 1e-6;
        CHECK(mirrored);
    }
    CHECK(rotating >= 2);
}

TEST_CASE("invalid arguments") {
    const auto g = FrequencyMarginal::cauchy(1.0);
    CHECK_THROWS_AS(j_integral(g, 4.0, 1, 1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(j_integral(g, 4.0, 0, cplx(-0.1), 0.5), ValidationError);
    PLSBranchPoint p;
    p.r = 0.5;
    CHECK_THROWS_AS(pls_stability(g, 4.0, p), ValidationError);
}
