#pragma once

// Ott-Antonsen manifold: deviation functionals w_{n,m}, their decay, states
// built from pole amplitudes, and the reduced amplitude equations.

#include <vector>

#include "kurastab/freqdist.hpp"
#include "kurastab/pls.hpp"
#include "kurastab/spectral.hpp"

namespace kurastab {

struct OADeviation {
    int n_max = 0;
    double a = 0.0;
    std::vector<double> tau;
    /// w_{n,m} samples for 1 <= n <= m <= n_max, in row order of (n, m).
    std::vector<std::vector<cplx>> w;
    double norm = 0.0;

    const std::vector<cplx>& pair(int n, int m) const;
};

/// w_{n,m} = f_hat_{n+m} * g_hat - f_hat_n * f_hat_m by direct convolution on a
/// full-line grid. Needs 2 n_max <= L; throws OverflowError if a tau_max > 30.
OADeviation deviation(const SpectralState& s, double a, int n_max = 4);

struct DecayCheck {
    double rate = 0.0;
    bool passed = false;
    /// Every norm stayed below 1e-7 (the run is on the manifold).
    bool vacuous = false;
};

/// Least-squares exponential rate of the norms; passes iff rate >= 0.9 a.
DecayCheck decay_check(const std::vector<double>& times, const std::vector<double>& norms, double a);

/// W_l(tau) = sum_j c_j alpha_j^l e^{-(Delta_j + i Omega_j) tau} for tau >= 0.
/// On a full-line grid only a single pole is supported (W_l = alpha^l g_hat).
/// Throws ValidationError if some |alpha_j| > 1.
SpectralState manifold_state(const FrequencyMarginal& g, const std::vector<cplx>& amplitudes, double K,
                             const SpectralGrid& grid);

/// Amplitudes beta((Omega_j + Omega - i Delta_j) / (K r)) of the PLS f_s, in
/// the frame rotating with it.
std::vector<cplx> pls_amplitudes(const FrequencyMarginal& g, double K, double r, double Omega);

/// f_s on the grid (rotating frame), built from pls_amplitudes.
SpectralState pls_state(const FrequencyMarginal& g, double K, const PLSBranchPoint& pls,
                        const SpectralGrid& grid);

/// sum_j c_j alpha_j^l e^{-(Delta_j + i Omega_j) tau}, tau >= 0.
cplx manifold_mode(const std::vector<CauchyComponent>& poles, const std::vector<cplx>& amplitudes, int l,
                   double tau);

struct ReducedOA {
    std::vector<CauchyComponent> poles;
    std::vector<cplx> alpha;
    double K = 0.0;
    double t = 0.0;

    /// r = conj(sum_j c_j alpha_j).
    cplx order_parameter() const;
};

/// d alpha_j/dt = -(Delta_j + i Omega_j) alpha_j + (K/2)(rho - conj(rho) alpha_j^2),
/// rho = sum_j c_j alpha_j.
std::vector<cplx> reduced_rhs(const ReducedOA& s);

/// RK4 integration of the reduced system.
TrajectoryRecord integrate_reduced(ReducedOA& s, double T, double dt, int sample_every = 10);

}  // namespace kurastab
