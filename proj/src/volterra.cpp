#include "kurastab/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kurastab/errors.hpp"
#include "kurastab/oa.hpp"

namespace kurastab {

namespace {

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Vec2 mul(const Mat2& a, const Vec2& v) { return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]}; }

Mat2 inverse(const Mat2& a) {
    const cplx det = a[0] * a[3] - a[1] * a[2];
    if (std::abs(det) == 0.0) throw NumericError("singular step matrix in the Volterra solver");
    return {a[3] / det, -a[1] / det, -a[2] / det, a[0] / det};
}

Mat2 step_inverse(const VolterraSystem& sys) {
    const Mat2& k0 = sys.kernel.at(0);
    const double c = 0.5 * sys.h;
    return inverse({1.0 - c * k0[0], -c * k0[1], -c * k0[2], 1.0 - c * k0[3]});
}

void restrict_scalar(VolterraSystem& sys) {
    if (sys.dim != 1) return;
    for (auto& m : sys.kernel) m = {m[0], 0.0, 0.0, 0.0};
    for (auto& v : sys.forcing) v = {v[0], 0.0};
}

}  // namespace

VolterraSystem scalar_system(double h, const std::vector<cplx>& kernel, const std::vector<cplx>& forcing) {
    if (kernel.size() != forcing.size()) throw MismatchedGrid("kernel and forcing samples differ in length");
    VolterraSystem sys;
    sys.dim = 1;
    sys.h = h;
    for (const auto& k : kernel) sys.kernel.push_back({k, 0.0, 0.0, 0.0});
    for (const auto& f : forcing) sys.forcing.push_back({f, 0.0});
    return sys;
}

cplx kernel_hom(const FrequencyMarginal& g, double K, double t) {
    if (t < 0.0) throw ValidationError("kernel_hom needs t >= 0");
    return 0.5 * K * g.fourier(t);
}

std::vector<Mat2> kernel_pls(const FrequencyMarginal& g, double K, const PLSBranchPoint& pls, double h,
                             std::size_t samples, const KernelPlsOptions& opt) {
    if (!(pls.residual < 1e-8)) throw ValidationError("kernel_pls needs a converged PLS");
    if (!(h > 0.0) || samples < 2) throw ValidationError("kernel_pls needs h > 0 and at least 2 samples");
    const SpectralState fs = pls_state(g, K, pls, opt.grid);
    auto poles = g.components();
    for (auto& c : poles) c.center += pls.omega;
    const auto amps = pls_amplitudes(g, K, pls.r, pls.omega);

    SpectralState um = blank_state(FrequencyMarginal::cauchy_mixture(poles), K, opt.grid);
    um.mode = CouplingMode::LinearFixed;
    um.fixed_coupling = 0.5 * K * pls.r;
    SpectralState up = um;
    const int L = um.L;
    for (int l = 0; l <= L; ++l) {
        for (int k = 0; k < um.nodes; ++k) {
            um.at(l, k) = l >= 1 ? double(l) * fs.at(l - 1, k) : cplx(0.0);
            const cplx next = l < L ? fs.at(l + 1, k) : manifold_mode(poles, amps, L + 1, um.tau(k));
            up.at(l, k) = double(l) * next;
        }
    }
    const double max_dt = opt.max_dt > 0.0 ? opt.max_dt : 0.5 * um.dtau;
    const long sub = std::max(1L, static_cast<long>(std::ceil(h / max_dt - 1e-9)));
    const double dt = h / sub;
    std::vector<Mat2> out;
    out.reserve(samples);
    const double c = 0.5 * K;
    for (std::size_t k = 0; k < samples; ++k) {
        if (k > 0)
            for (long s = 0; s < sub; ++s) {
                step(um, dt);
                step(up, dt);
            }
        const cplx a = um.at(1, 0);
        const cplx b = up.at(1, 0);
        out.push_back({c * a, -c * b, -c * std::conj(b), c * std::conj(a)});
    }
    return out;
}

VolterraSystem solve_volterra(VolterraSystem sys) {
    if (sys.forcing.size() != sys.kernel.size()) throw MismatchedGrid("kernel and forcing samples differ in length");
    restrict_scalar(sys);
    const std::size_t n = sys.size();
    sys.solution.assign(n, Vec2{0.0, 0.0});
    if (n == 0) return sys;
    const Mat2 inv = step_inverse(sys);
    const double h = sys.h;
    sys.solution[0] = sys.forcing[0];
    for (std::size_t k = 1; k < n; ++k) {
        Vec2 acc = mul(sys.kernel[k], sys.solution[0]);
        acc[0] *= 0.5;
        acc[1] *= 0.5;
        for (std::size_t j = 1; j < k; ++j) {
            const Vec2 t = mul(sys.kernel[k - j], sys.solution[j]);
            acc[0] += t[0];
            acc[1] += t[1];
        }
        const Vec2 rhs{sys.forcing[k][0] + h * acc[0], sys.forcing[k][1] + h * acc[1]};
        sys.solution[k] = mul(inv, rhs);
    }
    return sys;
}

double discrete_residual(const VolterraSystem& sys) {
    const std::size_t n = sys.solution.size();
    if (n == 0) return 0.0;
    double worst = std::abs(sys.solution[0][0] - sys.forcing[0][0]) + std::abs(sys.solution[0][1] - sys.forcing[0][1]);
    for (std::size_t k = 1; k < n; ++k) {
        Vec2 acc{0.0, 0.0};
        for (std::size_t j = 0; j <= k; ++j) {
            const double w = (j == 0 || j == k) ? 0.5 : 1.0;
            const Vec2 t = mul(sys.kernel[k - j], sys.solution[j]);
            acc[0] += w * t[0];
            acc[1] += w * t[1];
        }
        for (int c = 0; c < 2; ++c)
            worst = std::max(worst, std::abs(sys.solution[k][c] - sys.h * acc[c] - sys.forcing[k][c]));
    }
    return worst;
}

VolterraSystem resolvent(VolterraSystem sys, bool fit_constant) {
    if (sys.dim == 1)
        for (auto& m : sys.kernel) m = {m[0], 0.0, 0.0, 0.0};
    const std::size_t n = sys.size();
    sys.resolvent.assign(n, Mat2{});
    sys.resolvent_constant.reset();
    if (n == 0) return sys;
    const Mat2 inv = step_inverse(sys);
    const double h = sys.h;
    sys.resolvent[0] = sys.kernel[0];
    for (std::size_t k = 1; k < n; ++k) {
        Mat2 acc = mul(sys.kernel[k], sys.resolvent[0]);
        for (auto& v : acc) v *= 0.5;
        for (std::size_t j = 1; j < k; ++j) {
            const Mat2 t = mul(sys.kernel[k - j], sys.resolvent[j]);
            for (int e = 0; e < 4; ++e) acc[e] += t[e];
        }
        Mat2 rhs;
        for (int e = 0; e < 4; ++e) rhs[e] = sys.kernel[k][e] + h * acc[e];
        sys.resolvent[k] = mul(inv, rhs);
    }
    if (fit_constant) {
        const std::size_t first = n - std::max<std::size_t>(1, n / 5);
        Mat2 c{};
        for (std::size_t k = first; k < n; ++k)
            for (int e = 0; e < 4; ++e) c[e] += sys.resolvent[k][e];
        for (auto& v : c) v /= static_cast<double>(n - first);
        sys.resolvent_constant = c;
    }
    return sys;
}

Mat2 laplace_samples(const std::vector<Mat2>& samples, double h, cplx z) {
    Mat2 acc{};
    const std::size_t n = samples.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        const cplx e = w * h * std::exp(-z * (h * static_cast<double>(k)));
        for (int i = 0; i < 4; ++i) acc[i] += e * samples[k][i];
    }
    return acc;
}

std::string to_string(DecayModel m) { return m == DecayModel::Exponential ? "exponential" : "algebraic"; }

DampingFit damping_rate(const std::vector<double>& times, const std::vector<double>& magnitudes, double t_begin,
                        double t_end) {
    if (times.size() != magnitudes.size()) throw MismatchedGrid("damping_rate: times and values differ in length");
    std::vector<double> t, y, lt;
    double running_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_begin || times[i] > t_end) continue;
        const double m = magnitudes[i];
        if (!(m > 0.0)) throw InsufficientDecayError("damping_rate: non-positive magnitude in the window");
        if (m > 10.0 * running_min) {
            std::ostringstream msg;
            msg << "magnitude rises by more than a factor 10 at t = " << times[i];
            throw InsufficientDecayError(msg.str());
        }
        running_min = std::min(running_min, m);
        t.push_back(times[i]);
        y.push_back(std::log(m));
        lt.push_back(times[i] > 0.0 ? std::log(times[i]) : std::nan(""));
    }
    if (t.size() < 20) throw ValidationError("damping_rate needs at least 20 samples in the window");

    auto fit = [&](const std::vector<double>& x) {
        const double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / n;
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - icpt - slope * x[i], 2);
        return std::pair{slope, rss};
    };
    const auto [se, re] = fit(t);
    DampingFit out{-se, DecayModel::Exponential, re};
    if (std::all_of(lt.begin(), lt.end(), [](double v) { return std::isfinite(v); })) {
        const auto [sa, ra] = fit(lt);
        if (ra < re) out = {-sa, DecayModel::Algebraic, ra};
    }
    return out;
}

}  // namespace kurastab
