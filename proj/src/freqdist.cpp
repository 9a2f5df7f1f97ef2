#include "kurastab/freqdist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kurastab/errors.hpp"
#include "kurastab/quadrature.hpp"

namespace kurastab {

namespace {

constexpr double pi = std::numbers::pi;

// Segment integrals E0 = int_0^h e^{-zs} ds and E1 = int_0^h s e^{-zs} ds.
void segment_moments(cplx z, double h, cplx& e0, cplx& e1) {
    const cplx x = z * h;
    if (std::abs(x) < 0.1) {
        cplx term = 1.0;  // (-x)^n / n!
        cplx s0 = 0.0, s1 = 0.0;
        for (int n = 0; n < 12; ++n) {
            s0 += term / double(n + 1);
            s1 += term / double(n + 2);
            term *= -x / double(n + 1);
        }
        e0 = h * s0;
        e1 = h * h * s1;
        return;
    }
    const cplx ex = std::exp(-x);
    e0 = (1.0 - ex) / z;
    e1 = (1.0 - ex * (1.0 + x)) / (z * z);
}

// Gaussian transforms are negligible past this point (e^{-s^2 t^2/2} < 1e-16).
double gaussian_cutoff(double sigma) { return std::sqrt(2.0 * 36.9) / sigma; }

}  // namespace

WeightSpec WeightSpec::exponential(double a) {
    if (!(a > 0.0)) throw ValidationError("exponential weight requires a > 0");
    return {Kind::Exponential, a};
}

WeightSpec WeightSpec::polynomial(double b) {
    if (!(b > 1.0)) throw ValidationError("polynomial weight requires b > 1");
    return {Kind::Polynomial, b};
}

double WeightSpec::operator()(double tau) const {
    return kind_ == Kind::Exponential ? std::exp(param_ * tau) : std::pow(1.0 + tau, param_);
}

FrequencyMarginal FrequencyMarginal::cauchy(double half_width, double center) {
    return cauchy_mixture({{1.0, center, half_width}});
}

FrequencyMarginal FrequencyMarginal::cauchy_mixture(std::vector<CauchyComponent> components) {
    FrequencyMarginal g;
    g.kind_ = Kind::CauchyMixture;
    g.components_ = std::move(components);
    g.validate();
    return g;
}

FrequencyMarginal FrequencyMarginal::bi_cauchy(double half_width, double offset) {
    return cauchy_mixture({{0.5, offset, half_width}, {0.5, -offset, half_width}});
}

FrequencyMarginal FrequencyMarginal::tri_cauchy(double half_width, double offset, double alpha) {
    return cauchy_mixture({{1.0 - alpha, 0.0, 1.0},
                           {0.5 * alpha, offset, half_width},
                           {0.5 * alpha, -offset, half_width}});
}

FrequencyMarginal FrequencyMarginal::gaussian(double sigma) {
    FrequencyMarginal g;
    g.kind_ = Kind::Gaussian;
    g.sigma_ = sigma;
    g.validate();
    return g;
}

FrequencyMarginal FrequencyMarginal::tabulated(double dtau, std::vector<cplx> samples) {
    FrequencyMarginal g;
    g.kind_ = Kind::Tabulated;
    g.dtau_ = dtau;
    g.table_ = std::move(samples);
    g.validate();
    return g;
}

FrequencyMarginal FrequencyMarginal::tabulated_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<double> taus;
    std::vector<cplx> values;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double tau, re, im;
        if (!(row >> tau >> re >> im)) {
            // Tolerate a single header line.
            if (taus.empty() && values.empty() && lineno == 1) continue;
            throw ValidationError("tabulated marginal: malformed row at line " +
                                  std::to_string(lineno));
        }
        taus.push_back(tau);
        values.emplace_back(re, im);
    }
    if (taus.size() < 2) throw ValidationError("tabulated marginal: need at least two rows");
    const double step = taus[1] - taus[0];
    if (std::abs(taus[0]) > 1e-12 || !(step > 0.0))
        throw ValidationError("tabulated marginal: grid must start at tau = 0 and increase");
    for (std::size_t k = 1; k < taus.size(); ++k) {
        if (std::abs(taus[k] - k * step) > 1e-9 * std::max(1.0, taus[k]))
            throw ValidationError("tabulated marginal: non-uniform grid at row " +
                                  std::to_string(k + 1));
    }
    return tabulated(step, std::move(values));
}

void FrequencyMarginal::validate() const {
    switch (kind_) {
    case Kind::CauchyMixture: {
        if (components_.empty()) throw ValidationError("cauchy mixture: no components");
        double sum = 0.0;
        for (const auto& c : components_) {
            if (!(c.weight > 0.0 && c.weight <= 1.0))
                throw ValidationError("cauchy mixture: weight c must lie in (0, 1]");
            if (!(c.half_width > 0.0))
                throw ValidationError("cauchy mixture: half-width delta must be > 0");
            if (!std::isfinite(c.center))
                throw ValidationError("cauchy mixture: center omega must be finite");
            sum += c.weight;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("cauchy mixture: weights sum to " + std::to_string(sum) +
                                  ", expected 1");
        break;
    }
    case Kind::Gaussian:
        if (!(sigma_ > 0.0)) throw ValidationError("gaussian: sigma must be > 0");
        break;
    case Kind::Tabulated:
        if (!(dtau_ > 0.0)) throw ValidationError("tabulated: dtau must be > 0");
        if (table_.size() < 2) throw ValidationError("tabulated: need at least two samples");
        if (std::abs(table_[0] - cplx(1.0, 0.0)) > 1e-10)
            throw ValidationError("tabulated: g_hat(0) must equal 1");
        break;
    }
}

std::string FrequencyMarginal::kind_name() const {
    switch (kind_) {
    case Kind::CauchyMixture: return "cauchy_mixture";
    case Kind::Gaussian: return "gaussian";
    case Kind::Tabulated: return "tabulated";
    }
    return "unknown";
}

double FrequencyMarginal::table_extent() const {
    return table_.empty() ? 0.0 : dtau_ * double(table_.size() - 1);
}

double FrequencyMarginal::density(double omega) const {
    switch (kind_) {
    case Kind::CauchyMixture: {
        double s = 0.0;
        for (const auto& c : components_) {
            const double d = omega - c.center;
            s += c.weight * c.half_width / (pi * (d * d + c.half_width * c.half_width));
        }
        return s;
    }
    case Kind::Gaussian:
        return std::exp(-0.5 * omega * omega / (sigma_ * sigma_)) /
               (sigma_ * std::sqrt(2.0 * pi));
    case Kind::Tabulated:
        break;
    }
    throw UnsupportedKind("density is not available for tabulated marginals");
}

cplx FrequencyMarginal::fourier(double tau) const {
    switch (kind_) {
    case Kind::CauchyMixture: {
        cplx s = 0.0;
        for (const auto& c : components_)
            s += c.weight * std::exp(cplx(-c.half_width * std::abs(tau), -c.center * tau));
        return s;
    }
    case Kind::Gaussian:
        return std::exp(-0.5 * sigma_ * sigma_ * tau * tau);
    case Kind::Tabulated: {
        const double at = std::abs(tau);
        const double pos = at / dtau_;
        const auto k = static_cast<std::size_t>(pos);
        if (k + 1 >= table_.size()) {
            if (k + 1 == table_.size() && pos - double(k) < 1e-12) {
                return tau >= 0 ? table_.back() : std::conj(table_.back());
            }
            return 0.0;
        }
        const double frac = pos - double(k);
        const cplx v = table_[k] * (1.0 - frac) + table_[k + 1] * frac;
        return tau >= 0 ? v : std::conj(v);
    }
    }
    return 0.0;
}

cplx FrequencyMarginal::fourier_derivative(double tau) const {
    switch (kind_) {
    case Kind::CauchyMixture: {
        cplx s = 0.0;
        for (const auto& c : components_) {
            const cplx rate(-c.half_width, -c.center);
            s += c.weight * rate * std::exp(rate * tau);
        }
        return s;
    }
    case Kind::Gaussian:
        return -sigma_ * sigma_ * tau * std::exp(-0.5 * sigma_ * sigma_ * tau * tau);
    case Kind::Tabulated: {
        const auto k = static_cast<std::size_t>(tau / dtau_);
        if (k + 1 >= table_.size()) return 0.0;
        return (table_[k + 1] - table_[k]) / dtau_;
    }
    }
    return 0.0;
}

double FrequencyMarginal::convergence_abscissa() const {
    if (kind_ == Kind::CauchyMixture) return -fourier_decay_rate();
    return 0.0;
}

bool FrequencyMarginal::laplace_admissible(cplx z) const {
    if (kind_ == Kind::CauchyMixture) return z.real() > convergence_abscissa();
    return z.real() >= 0.0;
}

cplx FrequencyMarginal::laplace(cplx z) const {
    if (!laplace_admissible(z)) {
        std::ostringstream msg;
        msg << "laplace transform of g_hat diverges at z = " << z.real() << (z.imag() < 0 ? "" : "+")
            << z.imag() << "i (abscissa " << convergence_abscissa() << ")";
        throw DivergenceError(msg.str());
    }
    switch (kind_) {
    case Kind::CauchyMixture: {
        cplx s = 0.0;
        for (const auto& c : components_) s += c.weight / (z + cplx(c.half_width, c.center));
        return s;
    }
    case Kind::Gaussian: {
        const double cut = gaussian_cutoff(sigma_);
        auto f = [&](double t) { return cplx(std::exp(-0.5 * sigma_ * sigma_ * t * t)) * std::exp(-z * t); };
        // Resolve oscillations of e^{-i Im(z) t} with a few initial splits.
        const int pieces = std::clamp(int(std::abs(z.imag()) * cut / 4.0), 1, 400);
        std::vector<double> br;
        for (int i = 1; i < pieces; ++i) br.push_back(cut * i / pieces);
        return quad::integrate<cplx>(f, 0.0, cut, {1e-14, 1e-11, 20000}, br).value;
    }
    case Kind::Tabulated: {
        cplx s = 0.0;
        for (std::size_t k = 0; k + 1 < table_.size(); ++k) {
            cplx e0, e1;
            segment_moments(z, dtau_, e0, e1);
            const cplx slope = (table_[k + 1] - table_[k]) / dtau_;
            s += std::exp(-z * (double(k) * dtau_)) * (table_[k] * e0 + slope * e1);
        }
        return s;
    }
    }
    return 0.0;
}

cplx FrequencyMarginal::laplace_derivative(cplx z) const {
    if (kind_ == Kind::CauchyMixture) {
        if (!laplace_admissible(z)) (void)laplace(z);
        cplx s = 0.0;
        for (const auto& c : components_) {
            const cplx d = z + cplx(c.half_width, c.center);
            s -= c.weight / (d * d);
        }
        return s;
    }
    // Analytic in z: a centered difference along the real axis is enough.
    const double h = 1e-5;
    const cplx lo = z.real() - h >= 0.0 ? z - h : z;
    const cplx hi = z + h;
    return (laplace(hi) - laplace(lo)) / (hi - lo);
}

double FrequencyMarginal::fourier_decay_rate() const {
    if (kind_ != Kind::CauchyMixture) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : components_) m = std::min(m, c.half_width);
    return m;
}

double FrequencyMarginal::frequency_scale() const {
    switch (kind_) {
    case Kind::CauchyMixture: {
        double mc = 0.0, md = 0.0;
        for (const auto& c : components_) {
            mc = std::max(mc, std::abs(c.center));
            md = std::max(md, c.half_width);
        }
        return mc + md;
    }
    case Kind::Gaussian: return 2.0 * sigma_;
    case Kind::Tabulated: return pi / dtau_;
    }
    return 1.0;
}

std::vector<double> FrequencyMarginal::feature_points() const {
    std::vector<double> pts;
    if (kind_ == Kind::CauchyMixture) {
        for (const auto& c : components_) {
            pts.push_back(c.center);
            pts.push_back(c.center - 3.0 * c.half_width);
            pts.push_back(c.center + 3.0 * c.half_width);
        }
    } else if (kind_ == Kind::Gaussian) {
        for (int k = -4; k <= 4; ++k) pts.push_back(k * sigma_);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

bool FrequencyMarginal::is_symmetric() const {
    if (kind_ == Kind::Gaussian) return true;
    if (kind_ == Kind::Tabulated) {
        for (const auto& v : table_)
            if (std::abs(v.imag()) > 1e-12) return false;
        return true;
    }
    const double w = 4.0 * frequency_scale();
    for (int i = 1; i <= 400; ++i) {
        const double x = w * i / 400.0;
        const double a = density(x), b = density(-x);
        if (std::abs(a - b) > 1e-12 * std::max(a, b)) return false;
    }
    return true;
}

bool FrequencyMarginal::is_symmetric_unimodal() const {
    if (kind_ == Kind::Tabulated || !is_symmetric()) return false;
    if (kind_ == Kind::Gaussian) return true;
    const double w = 4.0 * frequency_scale();
    double prev = density(0.0);
    for (int i = 1; i <= 4000; ++i) {
        const double v = density(w * i / 4000.0);
        if (v > prev * (1.0 + 1e-14)) return false;
        prev = v;
    }
    return true;
}

double eval_density(const FrequencyMarginal& g, double omega) { return g.density(omega); }

cplx eval_fourier(const FrequencyMarginal& g, double tau) { return g.fourier(tau); }

cplx laplace_of_fourier(const FrequencyMarginal& g, cplx z) { return g.laplace(z); }

double weighted_norm_g(const FrequencyMarginal& g, const WeightSpec& w, NormKind kind) {
    const double growth = w.growth_rate();
    if (g.kind() == FrequencyMarginal::Kind::CauchyMixture && growth >= g.fourier_decay_rate()) {
        throw DivergenceError("weighted norm diverges: weight growth " + std::to_string(growth) +
                              " >= g_hat decay " + std::to_string(g.fourier_decay_rate()));
    }
    auto integrand = [&](double t) -> double {
        const double phi = w(t);
        if (kind == NormKind::L1) return phi * std::abs(g.fourier(t));
        const double a = std::abs(g.fourier(t)), b = std::abs(g.fourier_derivative(t));
        return phi * phi * (a * a + b * b);
    };
    const quad::Options opt{1e-13, 1e-10, 20000};
    quad::Result<double> res;
    switch (g.kind()) {
    case FrequencyMarginal::Kind::CauchyMixture: {
        // Finite pieces covering the decay scale, then a mapped tail.
        const double rate = g.fourier_decay_rate() - growth;
        const double span = 40.0 / rate;
        std::vector<double> br;
        for (int i = 1; i < 64; ++i) br.push_back(span * i / 64.0);
        auto head = quad::integrate<double>(integrand, 0.0, span, opt, br);
        auto tail = quad::integrate_to_infinity<double>(integrand, span, opt);
        res = {head.value + tail.value, head.error + tail.error, head.converged && tail.converged};
        break;
    }
    case FrequencyMarginal::Kind::Gaussian: {
        // Truncate where the integrand falls below 1e-14.
        double cut = gaussian_cutoff(g.sigma());
        while (integrand(cut) > 1e-16) cut *= 1.25;
        std::vector<double> br;
        for (int i = 1; i < 16; ++i) br.push_back(cut * i / 16.0);
        res = quad::integrate<double>(integrand, 0.0, cut, opt, br);
        break;
    }
    case FrequencyMarginal::Kind::Tabulated: {
        std::vector<double> br;
        for (std::size_t k = 1; k + 1 < g.table().size(); ++k) br.push_back(double(k) * g.table_step());
        res = quad::integrate<double>(integrand, 0.0, g.table_extent(), opt, br);
        break;
    }
    }
    if (!res.converged || !std::isfinite(res.value))
        throw DivergenceError("weighted norm quadrature did not converge");
    return kind == NormKind::L1 ? res.value : std::sqrt(res.value);
}

}  // namespace kurastab
