#pragma once

// Partially locked states: beta(omega), the self-consistency map F_r(Omega),
// the J_k integrals, M(z, r) and the determinant stability test.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kurastab/freqdist.hpp"

namespace kurastab {

enum class PlsStability { Stable, Unstable, Marginal };
std::string to_string(PlsStability s);

struct PLSBranchPoint {
    double K = 0.0;
    double r = 0.0;
    double omega = 0.0;
    /// |F_r(Omega) - 1|.
    double residual = 1.0;
    PlsStability stability = PlsStability::Marginal;
    /// Rightmost nonzero determinant root, when located.
    std::optional<cplx> leading_root;
    /// Diagnostics from pls_stability.
    double det_at_zero = 0.0;
    double det_slope_at_zero = 0.0;
    int unstable_count = 0;
};

struct StabilityMatrix {
    cplx z;
    double r = 0.0;
    /// Row-major: J_0(z), J_2(z), conj J_2(conj z), conj J_0(conj z).
    std::array<cplx, 4> entries{};
};

/// -i x + sqrt(1 - x^2) on the real line, continuous at |x| = 1.
cplx beta(double x);
/// Analytic continuation of beta into Im x < 0 (principal square root).
cplx beta(cplx x);

/// F_r(Omega) = (1/r) int beta((omega + Omega)/(K r)) g(omega) d omega.
/// Residues for Cauchy mixtures, quadrature otherwise.
cplx self_consistency(const FrequencyMarginal& g, double K, double r, double Omega);
/// Always by adaptive quadrature, split at |omega + Omega| = K r.
cplx self_consistency_quadrature(const FrequencyMarginal& g, double K, double r, double Omega);

struct PlsSolveOptions {
    double omega_max = -1.0;  // < 0: 3 (max|Omega_j| + max Delta_j)
    int r_starts = 19;
    int omega_starts = 13;
    int max_iterations = 200;
    double tolerance = 1e-10;
};

/// Damped Newton on F_r(Omega) = 1 from the seeds plus a multi-start grid.
/// Results are deduplicated within 1e-5 and sorted by (r, Omega).
std::vector<PLSBranchPoint> solve_pls(const FrequencyMarginal& g, double K,
                                      const std::vector<std::pair<double, double>>& seeds = {},
                                      const PlsSolveOptions& opt = {});

/// J_k(z, r) in the frame rotating at Omega. Closed form for Cauchy mixtures.
cplx j_integral(const FrequencyMarginal& g, double K, int k, cplx z, double r, double Omega = 0.0);
/// Quadrature route; on Re z = 0 shifts by delta in {1e-5, 1e-6} and extrapolates.
/// Throws SingularIntegrandError if the two shifts disagree beyond 1e-5.
cplx j_integral_quadrature(const FrequencyMarginal& g, double K, int k, cplx z, double r,
                           double Omega = 0.0);

StabilityMatrix stability_matrix(const FrequencyMarginal& g, double K, cplx z, double r,
                                 double Omega = 0.0);
/// det(Id - (K/2) M(z, r)).
cplx stability_determinant(const FrequencyMarginal& g, double K, cplx z, double r,
                           double Omega = 0.0);

/// Classifies a converged PLS by the zeros of the determinant in Re z > 0.
PLSBranchPoint pls_stability(const FrequencyMarginal& g, double K, PLSBranchPoint pls);

}  // namespace kurastab
