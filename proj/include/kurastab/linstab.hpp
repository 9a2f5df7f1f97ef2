#pragma once

// Linear stability of the homogeneous state: dispersion function, winding
// number of its image on the imaginary axis, unstable roots, critical coupling
// and the Penrose-type criterion.

#include <vector>

#include "kurastab/freqdist.hpp"

namespace kurastab {

struct DispersionReport {
    double K = 0.0;
    bool stable = true;
    int winding_number = 0;
    std::vector<cplx> unstable_roots;
    /// min over the scanned contour of |1 - (K/2) Laplace(g_hat)(iy)|.
    double boundary_margin = 0.0;
    /// Contour extent Y used for the scan.
    double contour_extent = 0.0;
};

struct ContourOptions {
    /// Multiplies the adaptive extent Y (robustness checks double it).
    double extent_scale = 1.0;
    /// Number of initial samples on [-Y, Y] before adaptive refinement.
    int base_samples = 2000;
};

/// D(z) = 1 - (K/2) int_0^inf g_hat(tau) e^{-z tau} d tau.
cplx dispersion(const FrequencyMarginal& g, double K, cplx z);

/// Winding count of D(iy) around 0 (y from +Y to -Y) and the minimum |D| seen.
/// Never throws on near-axis roots.
struct WindingScan {
    int winding = 0;
    double margin = 0.0;
    double extent = 0.0;
};
WindingScan scan_imaginary_axis(const FrequencyMarginal& g, double K, const ContourOptions& opt = {});

/// Throws InconclusiveError when the margin is below 1e-6.
DispersionReport check_homog_stability(const FrequencyMarginal& g, double K,
                                       const ContourOptions& opt = {});

/// Newton search for zeros of D in Re z > 0, at most `expected` of them.
std::vector<cplx> locate_unstable_roots(const FrequencyMarginal& g, double K, int expected,
                                        double extent);

/// 2/(pi g(0)) for symmetric unimodal g, otherwise bisection on the onset of
/// instability (tolerance 1e-6). Throws NotFoundError if stable up to K = 100.
double critical_coupling(const FrequencyMarginal& g);
/// Always uses the K-scan plus bisection route.
double critical_coupling_bisection(const FrequencyMarginal& g, double K_max = 100.0,
                                   double tolerance = 1e-6);

/// int_0^inf (g(Omega - w) - g(Omega + w)) / w dw.
double penrose_integral(const FrequencyMarginal& g, double Omega);
/// Zeros of penrose_integral in Omega, sorted.
std::vector<double> penrose_critical_frequencies(const FrequencyMarginal& g);
/// True iff K < 2/(pi g(Omega)) at every critical Omega.
bool penrose_criterion(const FrequencyMarginal& g, double K);

/// PV int g(w - Omega)/w dw by symmetric excision with Richardson extrapolation.
double principal_value_shifted(const FrequencyMarginal& g, double Omega);
/// F_{0+0}(Omega) = (K/2) [pi g(-Omega) + i PV int g(w - Omega)/w dw].
cplx f0_limit(const FrequencyMarginal& g, double Omega, double K);

/// 2 / ||g_hat||_{L1(R+)}; the uniform order-parameter decay threshold.
double uniform_decay_threshold(const FrequencyMarginal& g);

}  // namespace kurastab
