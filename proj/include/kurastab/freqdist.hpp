#pragma once

// Frequency marginals g(omega): density, Fourier transform g_hat(tau),
// Laplace transform of g_hat, and weighted norms of g_hat on the half-line.

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace kurastab {

using cplx = std::complex<double>;

struct CauchyComponent {
    double weight = 1.0;      // c_j in (0, 1]
    double center = 0.0;      // Omega_j
    double half_width = 1.0;  // Delta_j > 0
};

/// Weight phi on R+: e^{a tau} or (1 + tau)^b. Both are sub-multiplicative.
class WeightSpec {
public:
    enum class Kind { Exponential, Polynomial };

    static WeightSpec exponential(double a);
    static WeightSpec polynomial(double b);

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    double operator()(double tau) const;
    /// lim ln(phi(t))/t: a for the exponential weight, 0 otherwise.
    double growth_rate() const { return kind_ == Kind::Exponential ? param_ : 0.0; }

private:
    WeightSpec(Kind k, double p) : kind_(k), param_(p) {}
    Kind kind_;
    double param_;
};

enum class NormKind { L1, H1 };

class FrequencyMarginal {
public:
    enum class Kind { CauchyMixture, Gaussian, Tabulated };

    static FrequencyMarginal cauchy(double half_width, double center = 0.0);
    static FrequencyMarginal cauchy_mixture(std::vector<CauchyComponent> components);
    /// g_{Delta,Omega}: equal-weight Cauchy pair centered at +-Omega.
    static FrequencyMarginal bi_cauchy(double half_width, double offset);
    /// (1 - alpha) g_{1,0} + alpha g_{Delta,Omega}.
    static FrequencyMarginal tri_cauchy(double half_width, double offset, double alpha);
    static FrequencyMarginal gaussian(double sigma);
    /// Samples of g_hat at tau_k = k * dtau, k = 0..n-1; zero beyond the last node.
    static FrequencyMarginal tabulated(double dtau, std::vector<cplx> samples);
    /// Rows "tau, re, im" on a uniform grid starting at tau = 0.
    static FrequencyMarginal tabulated_from_csv(std::string_view text);

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    const std::vector<CauchyComponent>& components() const { return components_; }
    double sigma() const { return sigma_; }
    double table_step() const { return dtau_; }
    double table_extent() const;
    const std::vector<cplx>& table() const { return table_; }

    /// g(omega). Throws UnsupportedKind for tabulated marginals.
    double density(double omega) const;
    /// g_hat(tau) = int g(omega) e^{-i tau omega} d omega.
    cplx fourier(double tau) const;
    /// d g_hat / d tau for tau > 0.
    cplx fourier_derivative(double tau) const;
    /// int_0^inf g_hat(tau) e^{-z tau} d tau. Throws DivergenceError outside
    /// the convergence half-plane.
    cplx laplace(cplx z) const;
    /// d/dz of laplace(z).
    cplx laplace_derivative(cplx z) const;
    /// Real parts strictly above this value are admissible for laplace().
    double convergence_abscissa() const;
    bool laplace_admissible(cplx z) const;

    bool has_density() const { return kind_ != Kind::Tabulated; }
    bool is_symmetric() const;
    bool is_symmetric_unimodal() const;
    /// Width of the region where g carries its mass (centers plus widths).
    double frequency_scale() const;
    /// Points where g has narrow features; used to seed quadrature splits.
    std::vector<double> feature_points() const;
    /// Smallest decay rate of |g_hat| (min Delta_j for Cauchy mixtures).
    double fourier_decay_rate() const;

private:
    FrequencyMarginal() = default;
    void validate() const;

    Kind kind_ = Kind::CauchyMixture;
    std::vector<CauchyComponent> components_;
    double sigma_ = 1.0;
    double dtau_ = 0.0;
    std::vector<cplx> table_;
};

double eval_density(const FrequencyMarginal& g, double omega);
cplx eval_fourier(const FrequencyMarginal& g, double tau);
cplx laplace_of_fourier(const FrequencyMarginal& g, cplx z);
/// ||g_hat||_{L1_phi(R+)} or ||g_hat||_{H1_phi(R+)}.
double weighted_norm_g(const FrequencyMarginal& g, const WeightSpec& w, NormKind kind);

}  // namespace kurastab
