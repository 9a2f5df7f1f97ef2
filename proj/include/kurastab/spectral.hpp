#pragma once

// Kuramoto dynamics in double-Fourier variables W_l(tau) = f_hat_l(tau),
// l = 0..L, integrated by Strang splitting of free transport and mode coupling.

#include <optional>
#include <vector>

#include "kurastab/freqdist.hpp"

namespace kurastab {

struct SpectralGrid {
    int L = 32;
    /// Nodes on [0, tau_max]; the full-line grid mirrors them to 2N - 1 nodes.
    int N = 2048;
    double tau_max = 40.0;
    /// Grid on [-tau_max, tau_max] instead of [0, tau_max].
    bool full_line = false;
};

enum class CouplingMode {
    /// (K l / 2)(W_1(0) W_{l-1} - conj(W_1(0)) W_{l+1}).
    Nonlinear,
    /// l c (W_{l-1} - W_{l+1}) with a fixed real c; the linearized PLS propagator.
    LinearFixed,
};

struct SpectralState {
    int L = 0;
    int nodes = 0;
    double tau0 = 0.0;
    double dtau = 0.0;
    /// Index of tau = 0.
    int origin = 0;
    /// Row-major (L + 1) x nodes.
    std::vector<cplx> W;
    double t = 0.0;
    double K = 0.0;
    CouplingMode mode = CouplingMode::Nonlinear;
    double fixed_coupling = 0.0;
    std::vector<cplx> marginal;

    cplx& at(int l, int k) { return W[static_cast<std::size_t>(l) * nodes + k]; }
    cplx at(int l, int k) const { return W[static_cast<std::size_t>(l) * nodes + k]; }
    double tau(int k) const { return tau0 + k * dtau; }
    /// r = conj(W_1(0)).
    cplx order_parameter() const { return std::conj(at(1, origin)); }
};

struct Perturbation {
    enum class Profile { Bump, Harmonic };
    int mode = 1;
    cplx amplitude = 1e-3;
    /// Bump: amplitude e^{-|tau|} g_hat(tau); Harmonic: amplitude g_hat(tau).
    Profile profile = Profile::Bump;
};

/// W_0 = g_hat, W_l = 0 for l >= 1, plus the perturbations.
/// Throws ValidationError if a perturbed mode exceeds modulus 1.
SpectralState init_state(const FrequencyMarginal& g, double K, const SpectralGrid& grid,
                         const std::vector<Perturbation>& perturbations = {});

/// Empty state on the grid (all modes zero, marginal samples filled).
SpectralState blank_state(const FrequencyMarginal& g, double K, const SpectralGrid& grid);

/// One Strang step. Throws ValidationError if dt > dtau and BlowUpError if a
/// mode leaves the unit disc (nonlinear mode only).
void step(SpectralState& s, double dt);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<cplx> r_values;
    std::vector<double> norms;
};

struct RunOptions {
    /// Record every this many steps (the final time is always recorded).
    int sample_every = 10;
    /// Track the weighted H1 norm of W - reference when set.
    std::optional<WeightSpec> norm_weight;
    const std::vector<cplx>* reference = nullptr;
};

/// Advances to s.t + T with a step no larger than dt.
TrajectoryRecord run(SpectralState& s, double T, double dt, const RunOptions& opt = {});

/// (sum_l int_0^tau_max phi^2 (|u_l|^2 + |u_l'|^2))^{1/2} for u = W - reference
/// (reference defaults to f_hat_hom).
double weighted_state_norm(const SpectralState& s, const WeightSpec& w,
                           const std::vector<cplx>* reference = nullptr);

/// Row-major samples of f_hat_hom on the grid of s.
std::vector<cplx> homogeneous_reference(const SpectralState& s);

}  // namespace kurastab
