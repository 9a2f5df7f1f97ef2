#pragma once

// Finite-N Kuramoto model with the mean field written through r.

#include <cstdint>
#include <vector>

#include "kurastab/freqdist.hpp"
#include "kurastab/spectral.hpp"

namespace kurastab {

struct OscillatorEnsemble {
    std::vector<double> theta;
    std::vector<double> omega;
    double K = 0.0;
    double t = 0.0;

    std::size_t size() const { return theta.size(); }
    /// (1/N) sum e^{i theta_j}, pairwise summed.
    cplx order_parameter() const;
};

struct PhaseInit {
    enum class Kind { Uniform, Bump };
    Kind kind = Kind::Uniform;
    /// Density (1 + epsilon cos theta) / (2 pi) for Bump.
    double epsilon = 0.0;
};

/// Frequencies by inverse CDF; phases uniform or first-harmonic bump.
/// Throws UnsupportedKind for tabulated marginals.
OscillatorEnsemble sample_ensemble(const FrequencyMarginal& g, std::size_t N, std::uint64_t seed,
                                   const PhaseInit& init, double K = 0.0);

/// RK4 on d theta_i / dt = omega_i + K Im(r e^{-i theta_i}).
TrajectoryRecord integrate_ensemble(OscillatorEnsemble& e, double T, double dt, int sample_every = 10);

/// max over t <= horizon of |r_N(t) - r_PDE(t)|. Throws MismatchedGrid when the
/// sample times differ.
double compare_to_continuum(const TrajectoryRecord& ensemble, const TrajectoryRecord& pde, double horizon);

}  // namespace kurastab
