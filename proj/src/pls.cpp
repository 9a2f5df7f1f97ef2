#include "kurastab/pls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "kurastab/errors.hpp"
#include "kurastab/parallel.hpp"
#include "kurastab/quadrature.hpp"

namespace kurastab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I(0.0, 1.0);

bool closed_form(const FrequencyMarginal& g) {
    return g.kind() == FrequencyMarginal::Kind::CauchyMixture;
}

void require_density(const FrequencyMarginal& g) {
    if (!g.has_density()) throw UnsupportedKind("partially locked states need a density, got " + g.kind_name());
}

// Integral over the real line with break points; tails through the mapped rule.
template <class F>
cplx integrate_line(F&& f, std::vector<double> breaks, double scale) {
    std::sort(breaks.begin(), breaks.end());
    double lo = -scale, hi = scale;
    if (!breaks.empty()) {
        lo = std::min(lo, breaks.front() - scale);
        hi = std::max(hi, breaks.back() + scale);
    }
    const quad::Options opt{1e-14, 1e-11, 20000};
    cplx total = quad::integrate<cplx>(f, lo, hi, opt, breaks).value;
    total += quad::integrate_to_infinity<cplx>(f, hi, opt).value;
    total += quad::integrate_to_infinity<cplx>([&](double x) { return f(-x); }, -lo, opt).value;
    return total;
}

std::vector<double> shifted_features(const FrequencyMarginal& g, double shift) {
    std::vector<double> pts;
    for (double p : g.feature_points()) pts.push_back(p + shift);
    return pts;
}

// Pole of 1/(i y + i u + a beta(u/a)) on the real u-axis, if any.
std::optional<double> boundary_pole(double y, double a) {
    if (y == 0.0 || std::abs(y) >= a) return std::nullopt;
    return -(a * a + y * y) / (2.0 * y);
}

cplx j_quadrature_direct(const FrequencyMarginal& g, double K, int k, cplx z, double r, double Omega) {
    const double a = K * r;
    auto f = [&](double u) -> cplx {
        const cplx b = beta(u / a);
        const cplx num = k == 0 ? cplx(1.0) : b * b;
        return num / (z + I * u + a * b) * g.density(u - Omega);
    };
    auto br = shifted_features(g, Omega);
    br.push_back(-a);
    br.push_back(a);
    if (auto p = boundary_pole(z.imag(), a)) br.push_back(*p);
    return integrate_line(f, br, std::max(1.0, a + g.frequency_scale()));
}

// Winding number of h along a closed polyline, with adaptive refinement.
struct LoopScan {
    double turns = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
};

LoopScan wind_polyline(const std::function<cplx(cplx)>& h, const std::vector<cplx>& corners,
                       int per_edge, const std::function<void(cplx, cplx)>& visit) {
    LoopScan out;
    struct Node {
        cplx z;
        cplx v;
    };
    Node prev{corners[0], h(corners[0])};
    visit(prev.z, prev.v);
    double angle = 0.0;
    std::vector<Node> stack;
    for (std::size_t e = 0; e < corners.size(); ++e) {
        const cplx a = corners[e];
        const cplx b = corners[(e + 1) % corners.size()];
        for (int i = 1; i <= per_edge; ++i) {
            const cplx zi = a + (b - a) * (double(i) / per_edge);
            stack.push_back({zi, h(zi)});
            while (!stack.empty()) {
                const Node next = stack.back();
                double dphi = std::arg(next.v) - std::arg(prev.v);
                while (dphi > pi) dphi -= 2 * pi;
                while (dphi <= -pi) dphi += 2 * pi;
                const double jump = std::abs(next.v - prev.v);
                const double small = std::min(std::abs(prev.v), std::abs(next.v));
                const double len = std::abs(next.z - prev.z);
                if ((std::abs(dphi) > pi / 8 || jump > 0.5 * small) &&
                    len > 1e-13 * std::max(1.0, std::abs(prev.z))) {
                    const cplx zm = 0.5 * (prev.z + next.z);
                    stack.push_back({zm, h(zm)});
                    continue;
                }
                angle += dphi;
                visit(next.z, next.v);
                out.min_abs = std::min(out.min_abs, std::abs(next.v));
                prev = next;
                stack.pop_back();
            }
        }
    }
    out.turns = angle / (2 * pi);
    return out;
}

struct NewtonOutcome {
    double r = 0.0;
    double omega = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

NewtonOutcome newton_pls(const FrequencyMarginal& g, double K, double r, double om,
                         const PlsSolveOptions& opt) {
    auto F = [&](double rr, double oo) { return self_consistency(g, K, rr, oo) - 1.0; };
    NewtonOutcome out;
    cplx f = F(r, om);
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (std::abs(f) < opt.tolerance) {
            out = {r, om, std::abs(f), true};
            return out;
        }
        const double hr = 1e-7 * std::max(1e-2, r);
        const double ho = 1e-7 * std::max(1.0, std::abs(om));
        const double rp = std::min(r + hr, 1.0), rm = std::max(r - hr, 1e-12);
        const cplx dfr = (F(rp, om) - F(rm, om)) / (rp - rm);
        const cplx dfo = (F(r, om + ho) - F(r, om - ho)) / (2 * ho);
        const double det = dfr.real() * dfo.imag() - dfo.real() * dfr.imag();
        if (!std::isfinite(det) || det == 0.0) break;
        const double sr = -(dfo.imag() * f.real() - dfo.real() * f.imag()) / det;
        const double so = -(-dfr.imag() * f.real() + dfr.real() * f.imag()) / det;
        double lam = 1.0;
        bool moved = false;
        for (int k = 0; k < 40; ++k, lam *= 0.5) {
            const double rn = r + lam * sr, on = om + lam * so;
            if (!(rn > 0.0 && rn <= 1.0)) continue;
            const cplx fn = F(rn, on);
            if (std::abs(fn) < std::abs(f)) {
                r = rn;
                om = on;
                f = fn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    out = {r, om, std::abs(f), std::abs(f) < opt.tolerance};
    return out;
}

}  // namespace

std::string to_string(PlsStability s) {
    switch (s) {
        case PlsStability::Stable: return "stable";
        case PlsStability::Unstable: return "unstable";
        case PlsStability::Marginal: return "marginal";
    }
    return "marginal";
}

cplx beta(double x) {
    if (std::abs(x) <= 1.0) return cplx(std::sqrt(1.0 - x * x), -x);
    const double s = x > 0 ? 1.0 : -1.0;
    return cplx(0.0, -x + s * std::sqrt(x * x - 1.0));
}

cplx beta(cplx x) {
    if (x.imag() == 0.0) return beta(x.real());
    return -I * x + std::sqrt(1.0 - x * x);
}

cplx self_consistency(const FrequencyMarginal& g, double K, double r, double Omega) {
    if (!closed_form(g)) return self_consistency_quadrature(g, K, r, Omega);
    const double a = K * r;
    cplx sum = 0.0;
    for (const auto& c : g.components())
        sum += c.weight * beta(cplx(c.center + Omega, -c.half_width) / a);
    return sum / r;
}

cplx self_consistency_quadrature(const FrequencyMarginal& g, double K, double r, double Omega) {
    require_density(g);
    const double a = K * r;
    auto f = [&](double w) -> cplx { return beta((w + Omega) / a) * g.density(w); };
    auto br = g.feature_points();
    br.push_back(-Omega - a);
    br.push_back(-Omega + a);
    return integrate_line(f, br, std::max(1.0, a + g.frequency_scale())) / r;
}

std::vector<PLSBranchPoint> solve_pls(const FrequencyMarginal& g, double K,
                                      const std::vector<std::pair<double, double>>& seeds,
                                      const PlsSolveOptions& opt) {
    if (!(K > 0.0)) throw ValidationError("solve_pls needs K > 0");
    require_density(g);
    double om_max = opt.omega_max;
    if (om_max < 0.0) {
        if (closed_form(g)) {
            double mc = 0.0, md = 0.0;
            for (const auto& c : g.components()) {
                mc = std::max(mc, std::abs(c.center));
                md = std::max(md, c.half_width);
            }
            om_max = 3.0 * (mc + md);
        } else {
            om_max = 3.0 * g.frequency_scale();
        }
    }

    std::vector<std::pair<double, double>> starts = seeds;
    for (int i = 0; i < opt.r_starts; ++i) {
        const double r = opt.r_starts == 1 ? 0.5 : 0.05 + 0.9 * i / (opt.r_starts - 1);
        for (int j = 0; j < opt.omega_starts; ++j) {
            const double om = opt.omega_starts == 1 ? 0.0 : -om_max + 2.0 * om_max * j / (opt.omega_starts - 1);
            starts.emplace_back(r, om);
        }
    }
    std::vector<NewtonOutcome> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        results[i] = newton_pls(g, K, starts[i].first, starts[i].second, opt);
    });

    // Stationary states of a symmetric marginal: scan Re F_r(0) - 1 on r.
    if (g.is_symmetric()) {
        const int n = 400;
        auto h = [&](double r) { return self_consistency(g, K, r, 0.0).real() - 1.0; };
        double r0 = 1.0 / n, h0 = h(r0);
        for (int i = 2; i <= n; ++i) {
            const double r1 = double(i) / n, h1 = h(r1);
            if (h0 == 0.0) {
                results.push_back({r0, 0.0, std::abs(self_consistency(g, K, r0, 0.0) - 1.0), true});
            } else if ((h0 < 0) != (h1 < 0) && h1 != 0.0) {
                boost::uintmax_t iters = 200;
                auto [lo, hi] = boost::math::tools::toms748_solve(
                    h, r0, r1, h0, h1, boost::math::tools::eps_tolerance<double>(52), iters);
                const double rs = 0.5 * (lo + hi);
                results.push_back({rs, 0.0, std::abs(self_consistency(g, K, rs, 0.0) - 1.0), true});
            }
            r0 = r1;
            h0 = h1;
        }
        if (h0 == 0.0) results.push_back({r0, 0.0, std::abs(self_consistency(g, K, r0, 0.0) - 1.0), true});
    }

    std::vector<PLSBranchPoint> out;
    auto add = [&](const NewtonOutcome& s) {
        if (!s.converged || s.residual >= 1e-8 || !(s.r > 0.0 && s.r <= 1.0)) return;
        for (const auto& p : out)
            if (std::hypot(p.r - s.r, p.omega - s.omega) < 1e-5) return;
        PLSBranchPoint p;
        p.K = K;
        p.r = s.r;
        p.omega = std::abs(s.omega) < 1e-12 ? 0.0 : s.omega;
        p.residual = s.residual;
        out.push_back(p);
    };
    // Prefer the accurate 1-D roots when they duplicate a Newton result.
    for (auto it = results.rbegin(); it != results.rend(); ++it) add(*it);

    if (g.is_symmetric()) {
        const auto found = out;
        for (const auto& p : found)
            if (std::abs(p.omega) > 1e-6) add(newton_pls(g, K, p.r, -p.omega, opt));
    }
    std::sort(out.begin(), out.end(), [](const PLSBranchPoint& a, const PLSBranchPoint& b) {
        return a.r != b.r ? a.r < b.r : a.omega < b.omega;
    });
    return out;
}

cplx j_integral(const FrequencyMarginal& g, double K, int k, cplx z, double r, double Omega) {
    if (k != 0 && k != 2) throw ValidationError("j_integral: k must be 0 or 2");
    if (!(r > 0.0)) throw ValidationError("j_integral: r must be positive");
    if (z.real() < 0.0) throw ValidationError("j_integral: needs Re z >= 0");
    if (!closed_form(g)) return j_integral_quadrature(g, K, k, z, r, Omega);
    const double a = K * r;
    cplx sum = 0.0;
    for (const auto& c : g.components()) {
        const cplx x = cplx(c.center + Omega, -c.half_width) / a;
        const cplx b = beta(x);
        const cplx num = k == 0 ? cplx(1.0) : b * b;
        sum += c.weight * num / (z + a * std::sqrt(1.0 - x * x));
    }
    return sum;
}

cplx j_integral_quadrature(const FrequencyMarginal& g, double K, int k, cplx z, double r, double Omega) {
    if (k != 0 && k != 2) throw ValidationError("j_integral: k must be 0 or 2");
    if (!(r > 0.0)) throw ValidationError("j_integral: r must be positive");
    if (z.real() < 0.0) throw ValidationError("j_integral: needs Re z >= 0");
    require_density(g);
    if (z.real() > 0.0) return j_quadrature_direct(g, K, k, z, r, Omega);
    const cplx j1 = j_quadrature_direct(g, K, k, z + 1e-5, r, Omega);
    const cplx j2 = j_quadrature_direct(g, K, k, z + 1e-6, r, Omega);
    if (std::abs(j1 - j2) > 1e-5)
        throw SingularIntegrandError("J_k boundary value does not settle under the shift extrapolation");
    return (10.0 * j2 - j1) / 9.0;
}

StabilityMatrix stability_matrix(const FrequencyMarginal& g, double K, cplx z, double r, double Omega) {
    StabilityMatrix m;
    m.z = z;
    m.r = r;
    m.entries[0] = j_integral(g, K, 0, z, r, Omega);
    m.entries[1] = j_integral(g, K, 2, z, r, Omega);
    if (z.imag() == 0.0) {
        m.entries[2] = std::conj(m.entries[1]);
        m.entries[3] = std::conj(m.entries[0]);
    } else {
        const cplx zb = std::conj(z);
        m.entries[2] = std::conj(j_integral(g, K, 2, zb, r, Omega));
        m.entries[3] = std::conj(j_integral(g, K, 0, zb, r, Omega));
    }
    return m;
}

cplx stability_determinant(const FrequencyMarginal& g, double K, cplx z, double r, double Omega) {
    const auto m = stability_matrix(g, K, z, r, Omega);
    const double h = 0.5 * K;
    return (1.0 - h * m.entries[0]) * (1.0 - h * m.entries[3]) - h * h * m.entries[1] * m.entries[2];
}

PLSBranchPoint pls_stability(const FrequencyMarginal& g, double K, PLSBranchPoint pls) {
    if (!(pls.residual < 1e-8)) throw ValidationError("pls_stability needs a converged state (residual < 1e-8)");
    auto D = [&](cplx z) { return stability_determinant(g, K, z, pls.r, pls.omega); };
    const double step = 1e-4;
    pls.det_at_zero = std::abs(D(0.0));
    pls.det_slope_at_zero = std::abs((D(cplx(0.0, step)) - D(cplx(0.0, -step))) / (2.0 * step));
    pls.leading_root.reset();
    pls.unstable_count = 0;

    const double delta = 1e-4;
    const double X = K + 1.0;
    const double Y = 2.0 * (K + std::abs(pls.omega) + 3.0 * g.frequency_scale()) + 2.0;
    const std::vector<cplx> corners = {cplx(delta, -Y), cplx(X, -Y), cplx(X, Y), cplx(delta, Y)};
    double near_zero = std::numeric_limits<double>::infinity();
    const auto scan = wind_polyline(D, corners, closed_form(g) ? 400 : 120, [&](cplx z, cplx v) {
        if (z.real() == delta && std::abs(z) > 1e-2) near_zero = std::min(near_zero, std::abs(v));
    });
    const long count = std::lround(scan.turns);
    pls.unstable_count = static_cast<int>(count);
    const bool non_integer = std::abs(scan.turns - count) > 0.1;

    if (count > 0) {
        // Newton from a grid of seeds inside the rectangle.
        std::vector<cplx> roots;
        for (int i = 1; i <= 8 && static_cast<long>(roots.size()) < count; ++i) {
            for (int j = 0; j <= 20 && static_cast<long>(roots.size()) < count; ++j) {
                cplx z(X * i / 9.0, -Y + 2.0 * Y * j / 20.0);
                bool ok = false;
                for (int it = 0; it < 80; ++it) {
                    const double h = 1e-6 * std::max(1.0, std::abs(z));
                    const cplx d = D(z);
                    const cplx dd = (D(z + h) - D(z - h)) / (2.0 * h);
                    if (dd == 0.0) break;
                    const cplx s = d / dd;
                    z -= s;
                    if (!(z.real() > 0.5 * delta) || !std::isfinite(z.real())) break;
                    if (std::abs(s) < 1e-13 * std::max(1.0, std::abs(z))) {
                        ok = true;
                        break;
                    }
                }
                if (!ok || std::abs(z) < 1e-3 || std::abs(D(z)) > 1e-9) continue;
                if (std::none_of(roots.begin(), roots.end(), [&](cplx q) { return std::abs(q - z) < 1e-7; }))
                    roots.push_back(z);
            }
        }
        if (!roots.empty())
            pls.leading_root = *std::max_element(roots.begin(), roots.end(),
                                                 [](cplx a, cplx b) { return a.real() < b.real(); });
    }

    if (pls.det_at_zero >= 1e-6 || pls.det_slope_at_zero <= 1e-8 || non_integer)
        pls.stability = PlsStability::Marginal;
    else if (count > 0)
        pls.stability = PlsStability::Unstable;
    else if (near_zero < 1e-6)
        pls.stability = PlsStability::Marginal;
    else
        pls.stability = PlsStability::Stable;
    return pls;
}

}  // namespace kurastab
