#pragma once

// Volterra equations of the second kind x - K * x = I on a uniform grid
// (trapezoidal product rule), resolvents, and the linearized kernels.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kurastab/freqdist.hpp"
#include "kurastab/pls.hpp"
#include "kurastab/spectral.hpp"

namespace kurastab {

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<cplx, 4>;
using Vec2 = std::array<cplx, 2>;

struct VolterraSystem {
    /// 1 uses only the (0, 0) entry and the first component.
    int dim = 1;
    double h = 1e-3;
    std::vector<Mat2> kernel;
    std::vector<Vec2> forcing;
    std::vector<Vec2> solution;
    std::vector<Mat2> resolvent;
    /// Tail average of the resolvent over the last 20% of the horizon.
    std::optional<Mat2> resolvent_constant;

    std::size_t size() const { return kernel.size(); }
    double time(std::size_t k) const { return h * static_cast<double>(k); }
};

/// Scalar system with kernel samples k(t_j) and forcing f(t_j).
VolterraSystem scalar_system(double h, const std::vector<cplx>& kernel, const std::vector<cplx>& forcing);

/// (K/2) g_hat(t).
cplx kernel_hom(const FrequencyMarginal& g, double K, double t);

struct KernelPlsOptions {
    SpectralGrid grid{32, 2048, 40.0, false};
    /// Upper bound for the simulator step; reduced so that it divides h.
    double max_dt = -1.0;  // < 0: half the grid step
};

/// (K/2) [[a, -b], [-conj b, conj a]] with a, b the (l, tau) = (1, 0) samples of
/// the linearized propagator applied to l (f_s)_{l-1} and l (f_s)_{l+1}.
std::vector<Mat2> kernel_pls(const FrequencyMarginal& g, double K, const PLSBranchPoint& pls, double h,
                             std::size_t samples, const KernelPlsOptions& opt = {});

/// Forward substitution; fills sys.solution.
VolterraSystem solve_volterra(VolterraSystem sys);
/// Max over the grid of |x_k - h sum_j w_kj K_{k-j} x_j - I_k|.
double discrete_residual(const VolterraSystem& sys);

/// Solves R = K + K * R; optionally estimates the constant part C.
VolterraSystem resolvent(VolterraSystem sys, bool fit_constant = false);

/// Trapezoidal Laplace transform of matrix samples, int_0^T K(t) e^{-zt} dt.
Mat2 laplace_samples(const std::vector<Mat2>& samples, double h, cplx z);

enum class DecayModel { Exponential, Algebraic };
std::string to_string(DecayModel m);

struct DampingFit {
    double rate = 0.0;
    DecayModel model = DecayModel::Exponential;
    double residual = 0.0;
};

/// Least-squares fits of log|r| against t and against log t over the window;
/// returns the better one. Throws InsufficientDecayError when |r| rises by more
/// than a factor 10 inside the window.
DampingFit damping_rate(const std::vector<double>& times, const std::vector<double>& magnitudes, double t_begin,
                        double t_end);

}  // namespace kurastab
