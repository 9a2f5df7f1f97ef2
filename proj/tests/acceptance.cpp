// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "kurastab/bifurcation.hpp"
#include "kurastab/ensemble.hpp"
#include "kurastab/linstab.hpp"
#include "kurastab/oa.hpp"
#include "kurastab/pls.hpp"
#include "kurastab/spectral.hpp"
#include "kurastab/volterra.hpp"

using namespace kurastab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s | %s | %.1f s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

void note(const char* title, const std::string& detail) {
    std::printf("INFO %s | %s\n", title, detail.c_str());
    std::fflush(stdout);
}

// Every nonlinear spectral run goes through here so that the conservation
// property is checked on all of them.
struct Conservation {
    int runs = 0;
    bool w0_constant = true;
    double max_r = 0.0;
} conservation;

TrajectoryRecord tracked_run(SpectralState& s, double T, double dt, const RunOptions& opt = {}) {
    const std::vector<cplx> w0(s.W.begin(), s.W.begin() + s.nodes);
    auto rec = run(s, T, dt, opt);
    ++conservation.runs;
    for (int k = 0; k < s.nodes; ++k)
        if (s.at(0, k) != w0[k]) conservation.w0_constant = false;
    for (const cplx& r : rec.r_values) conservation.max_r = std::max(conservation.max_r, std::abs(r));
    return rec;
}

Perturbation harmonic(int mode, cplx amp) {
    Perturbation p;
    p.mode = mode;
    p.amplitude = amp;
    p.profile = Perturbation::Profile::Harmonic;
    return p;
}

const auto cauchy = FrequencyMarginal::cauchy(1.0);

Outcome critical_coupling_check() {
    const double analytic = critical_coupling(cauchy);
    const double bisected = critical_coupling_bisection(cauchy);
    return {std::abs(analytic - 2.0) < 1e-9 && std::abs(bisected - 2.0) < 1e-6,
            fmt("analytic %.12f, bisection %.9f", analytic, bisected)};
}

Outcome dispersion_roots() {
    double worst = 0.0;
    bool shape = true;
    for (double K : {2.5, 3.0, 4.0}) {
        const auto rep = check_homog_stability(cauchy, K);
        if (rep.unstable_roots.size() != 1) {
            shape = false;
            continue;
        }
        worst = std::max(worst, std::abs(rep.unstable_roots[0] - cplx(K / 2 - 1)));
    }
    return {shape && worst < 1e-8, fmt("max |z - (K/2 - 1)| = %.2e over K = 2.5, 3, 4", worst)};
}

Outcome pls_value() {
    const double K = 4.0;
    // Independent root of the quadrature form of the self-consistency condition.
    auto f = [&](double r) { return self_consistency_quadrature(cauchy, K, r, 0.0).real() - 1.0; };
    std::uintmax_t iters = 100;
    const auto br = boost::math::tools::toms748_solve(f, 0.2, 0.99, boost::math::tools::eps_tolerance<double>(50), iters);
    const double r_quad = 0.5 * (br.first + br.second);
    const auto sols = solve_pls(cauchy, K);
    if (sols.size() != 1) return {false, fmt("%zu solutions returned", sols.size())};
    const auto st = pls_stability(cauchy, K, sols[0]);
    const double err = std::abs(sols[0].r - r_quad);
    return {err < 1e-6 && st.stability == PlsStability::Stable,
            fmt("r_s = %.10f, quadrature root %.10f, |diff| %.1e, %s", sols[0].r, r_quad, err,
                to_string(st.stability).c_str())};
}

Outcome landau_damping() {
    Perturbation p;
    p.mode = 1;
    p.amplitude = 1e-4;
    auto s = init_state(cauchy, 1.0, {32, 2048, 40.0, false}, {p});
    const auto rec = tracked_run(s, 12.0, 0.5 * s.dtau, {5});
    std::vector<double> mag;
    for (const cplx& r : rec.r_values) mag.push_back(std::abs(r));
    const auto fit = damping_rate(rec.times, mag, 4.0, 12.0);
    const double rel = std::abs(fit.rate - 0.5) / 0.5;
    return {fit.model == DecayModel::Exponential && rel < 0.05,
            fmt("%s rate %.5f on t in [4, 12] (rel. error %.2f%%)", to_string(fit.model).c_str(), fit.rate, 100 * rel)};
}

Outcome saturation() {
    Perturbation p;
    p.mode = 1;
    p.amplitude = 1e-3;
    auto s = init_state(cauchy, 4.0, {32, 2048, 40.0, false}, {p});
    tracked_run(s, 40.0, 0.5 * s.dtau, {50});
    const double r = std::abs(s.order_parameter());
    return {std::abs(r - std::sqrt(0.5)) < 0.01, fmt("|r(40)| = %.6f vs sqrt(1/2) = %.6f", r, std::sqrt(0.5))};
}

Outcome volterra_closed_form() {
    auto error = [](double h) {
        const auto n = static_cast<std::size_t>(std::llround(20.0 / h)) + 1;
        std::vector<cplx> k(n), f(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) k[j] = kernel_hom(cauchy, 1.0, j * h);
        const auto sys = resolvent(scalar_system(h, k, f));
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(sys.resolvent[j][0] - 0.5 * std::exp(-0.5 * sys.time(j))));
        return worst;
    };
    const double e1 = error(1e-3), e2 = error(5e-4);
    const double ratio = e1 / e2;
    return {e1 < 1e-4 && std::abs(ratio - 4.0) < 0.4,
            fmt("sup error %.2e at h = 1e-3, %.2e at h/2, ratio %.3f", e1, e2, ratio)};
}

Outcome kernel_laplace() {
    const double K = 4.0, h = 0.01;
    const auto sols = solve_pls(cauchy, K);
    if (sols.size() != 1) return {false, "no unique PLS"};
    const auto kern = kernel_pls(cauchy, K, sols[0], h, 2001);
    double diag = 0.0, off = 0.0, off_flipped = 0.0, det = 0.0;
    for (cplx z : {cplx(0.5), cplx(1.0), cplx(1.0, 1.0)}) {
        const auto lap = laplace_samples(kern, h, z);
        const auto m = stability_matrix(cauchy, K, z, sols[0].r);
        const double half = 0.5 * K;
        for (int i : {0, 3}) diag = std::max(diag, std::abs(lap[i] - half * m.entries[i]));
        for (int i : {1, 2}) {
            off = std::max(off, std::abs(lap[i] - half * m.entries[i]));
            off_flipped = std::max(off_flipped, std::abs(lap[i] + half * m.entries[i]));
        }
        const cplx d_kernel = (1.0 - lap[0]) * (1.0 - lap[3]) - lap[1] * lap[2];
        det = std::max(det, std::abs(d_kernel - stability_determinant(cauchy, K, z, sols[0].r)));
    }
    note("criterion 8 detail",
         fmt("off-diagonal error with the opposite sign %.2e; max |det(Id - Lk) - det(Id - (K/2)M)| = %.2e",
             off_flipped, det));
    return {diag < 1e-3 && off < 1e-3,
            fmt("max entry error: diagonal %.2e, off-diagonal %.2e at z = 0.5, 1, 1+i", diag, off)};
}

Outcome oa_attraction() {
    const double a = 0.5;
    auto s = init_state(cauchy, 1.0, {32, 1024, 20.0, true}, {harmonic(1, 0.05), harmonic(2, 0.05)});
    std::vector<double> ts, ns;
    const double dt = 0.5 * s.dtau;
    for (int i = 0; i <= 20; ++i) {
        if (i) tracked_run(s, 0.5, dt, {1 << 30});
        ts.push_back(s.t);
        ns.push_back(deviation(s, a, 4).norm);
    }
    double worst = -1e300;
    bool holds = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double bound = ns[0] * std::exp(-0.9 * a * ts[i]);
        holds &= ns[i] <= bound;
        worst = std::max(worst, ns[i] / bound);
    }
    const auto chk = decay_check(ts, ns, a);
    return {holds && !chk.vacuous,
            fmt("|w(0)| = %.3e, |w(10)| = %.3e, max |w(t)| / bound = %.3f, fitted rate %.3f", ns[0], ns.back(),
                worst, chk.rate)};
}

Outcome reduced_agreement() {
    double worst = 0.0;
    for (double K : {1.0, 4.0}) {
        const std::vector<cplx> alpha0 = {cplx(0.1)};
        auto s = manifold_state(cauchy, alpha0, K, {32, 2048, 40.0, false});
        ReducedOA red{cauchy.components(), alpha0, K, 0.0};
        const double dt = 0.5 * s.dtau;
        const auto rs = tracked_run(s, 20.0, dt, {1});
        const auto rr = integrate_reduced(red, 20.0, dt, 1);
        for (std::size_t i = 0; i < rs.times.size() && i < rr.times.size(); ++i)
            worst = std::max(worst, std::abs(rs.r_values[i] - rr.r_values[i]));
    }
    return {worst < 1e-3, fmt("max |r_reduced - r_spectral| = %.2e for t <= 20, K = 1, 4", worst)};
}

bool coexistence(const BifurcationDiagram& d, double K_c, double& lo, double& hi) {
    lo = 1e300;
    hi = -1e300;
    for (const auto& row : d.rows) {
        if (row.branch == 0 || row.stability != "stable" || row.K >= K_c) continue;
        const bool hom_stable = std::any_of(d.rows.begin(), d.rows.end(), [&](const DiagramRow& h) {
            return h.branch == 0 && h.K == row.K && h.stability == "stable";
        });
        if (!hom_stable) continue;
        lo = std::min(lo, row.K);
        hi = std::max(hi, row.K);
    }
    return lo <= hi;
}

Outcome bi_cauchy_coexistence() {
    const auto g = FrequencyMarginal::bi_cauchy(0.1, 0.55);
    const double K_c = critical_coupling_bisection(g);
    const auto d = sweep(g, 0.05, 0.8, 0.01);
    double lo, hi;
    const bool found = coexistence(d, K_c, lo, hi);
    const bool fold = std::any_of(d.events.begin(), d.events.end(), [](const auto& e) { return e.type == "saddle-node"; });
    std::string events;
    for (const auto& e : d.events) events += fmt(" %s@%.3f", e.type.c_str(), e.K);
    return {found && fold, fmt("K_c = %.4f, coexistence %s, fold %s, events:%s", K_c,
                               found ? fmt("[%.2f, %.2f]", lo, hi).c_str() : "none", fold ? "yes" : "no",
                               events.empty() ? " none" : events.c_str())};
}

void bi_cauchy_supplement() {
    // Omega/Delta = 0.8 lies in (1/sqrt 3, 1), where the fold scenario is expected.
    const auto g = FrequencyMarginal::bi_cauchy(1.0, 0.8);
    const double K_c = critical_coupling_bisection(g);
    const auto d = sweep(g, 2.6, 3.5, 0.02);
    double lo, hi;
    const bool found = coexistence(d, K_c, lo, hi);
    std::string events;
    for (const auto& e : d.events) events += fmt(" %s@%.3f", e.type.c_str(), e.K);
    note("supplementary bi-Cauchy (Delta = 1, Omega = 0.8), not a criterion",
         fmt("K_c = %.4f, coexistence %s, events:%s", K_c, found ? fmt("[%.2f, %.2f]", lo, hi).c_str() : "none",
             events.empty() ? " none" : events.c_str()));
}

Outcome tri_cauchy_diagram() {
    const auto g = FrequencyMarginal::tri_cauchy(0.1, 0.55, 0.17);
    const auto d = sweep(g, 1.4, 2.5, 0.01);
    auto near = [&](const char* type, double K) {
        return std::any_of(d.events.begin(), d.events.end(),
                           [&](const auto& e) { return e.type == type && std::abs(e.K - K) <= 0.05; });
    };
    bool paired = true;
    int rotating = 0;
    for (const auto& row : d.rows) {
        if (row.branch == 0 || std::abs(row.omega) < 1e-6) continue;
        ++rotating;
        paired &= std::any_of(d.rows.begin(), d.rows.end(), [&](const DiagramRow& o) {
            return o.branch != 0 && o.K == row.K && std::abs(o.r - row.r) < 1e-6 && std::abs(o.omega + row.omega) < 1e-6;
        });
    }
    std::string events;
    for (const auto& e : d.events) events += fmt(" %s@%.3f", e.type.c_str(), e.K);
    const bool ok = near("hom-destab", 1.61) && near("hom-restab", 2.12) && near("pitchfork", 2.27) && paired &&
                    rotating > 0;
    return {ok, fmt("events:%s; %d rotating rows, %s", events.c_str(), rotating, paired ? "all paired" : "unpaired")};
}

Outcome finite_n() {
    double worst = 0.0;
    std::string per_k, modulus;
    for (double K : {1.0, 4.0}) {
        const double dt = 0.01 / K;
        const int every = static_cast<int>(std::lround(0.1 / dt));
        auto e = sample_ensemble(cauchy, 100000, 20240611, {PhaseInit::Kind::Bump, 0.5}, K);
        const auto re = integrate_ensemble(e, 10.0, dt, every);
        // (1 + eps cos theta) / (2 pi) has first harmonic eps / 2
        auto s = init_state(cauchy, K, {32, 2048, 40.0, false}, {harmonic(1, 0.25)});
        const auto rp = tracked_run(s, 10.0, dt, {every});
        const double d = compare_to_continuum(re, rp, 10.0);
        double m = 0.0;
        for (std::size_t i = 0; i < re.times.size(); ++i)
            m = std::max(m, std::abs(std::abs(re.r_values[i]) - std::abs(rp.r_values[i])));
        worst = std::max(worst, d);
        per_k += fmt(" K = %g: %.4f", K, d);
        modulus += fmt(" K = %g: %.4f", K, m);
    }
    note("criterion 13 detail", "max ||r_N| - |r_PDE||," + modulus);
    return {worst < 0.02, "N = 1e5, max |r_N - r_PDE| over t <= 10," + per_k};
}

Outcome equivariance() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double rot = 0.0, gal = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        const double K = 0.5 + 3.5 * u(rng), c = 6.0 * u(rng), W = 4.0 * u(rng) - 2.0;
        auto base = sample_ensemble(cauchy, 1000, 1000 + trial, {PhaseInit::Kind::Bump, u(rng)}, K);
        auto rotated = base;
        for (double& th : rotated.theta) th += c;
        auto boosted = base;
        for (double& w : boosted.omega) w += W;
        const double dt = 0.01 / std::max(1.0, K);
        const auto r0 = integrate_ensemble(base, 2.0, dt, 10);
        const auto r1 = integrate_ensemble(rotated, 2.0, dt, 10);
        const auto r2 = integrate_ensemble(boosted, 2.0, dt, 10);
        for (std::size_t i = 0; i < r0.times.size(); ++i) {
            const double t = r0.times[i];
            rot = std::max(rot, std::abs(r1.r_values[i] - r0.r_values[i] * std::polar(1.0, c)));
            gal = std::max(gal, std::abs(r2.r_values[i] - r0.r_values[i] * std::polar(1.0, W * t)) / std::max(t, 1.0));
        }
    }
    return {rot < 1e-12 && gal < 1e-8,
            fmt("8 random trials: rotation error %.1e, galilean error per unit time %.1e", rot, gal)};
}

}  // namespace

int main() {
    report(1, "critical coupling, Cauchy", critical_coupling_check);
    report(2, "dispersion roots, Cauchy", dispersion_roots);
    report(3, "PLS value and stability, Cauchy K = 4", pls_value);
    report(4, "Landau damping rate", landau_damping);
    report(5, "nonlinear saturation", saturation);
    report(7, "Volterra resolvent closed form", volterra_closed_form);
    report(8, "kernel Laplace identity", kernel_laplace);
    report(9, "OA attraction", oa_attraction);
    report(10, "reduced vs full OA dynamics", reduced_agreement);
    report(11, "bi-Cauchy coexistence", bi_cauchy_coexistence);
    bi_cauchy_supplement();
    report(12, "tri-Cauchy bifurcation diagram", tri_cauchy_diagram);
    report(13, "finite-N cross-check", finite_n);
    report(14, "equivariance", equivariance);
    report(6, "marginal conservation over all spectral runs", [] {
        return Outcome{conservation.w0_constant && conservation.max_r <= 1.0 + 1e-6,
                       fmt("%d runs, W_0 %s, max |r| = %.9f", conservation.runs,
                           conservation.w0_constant ? "bitwise constant" : "changed", conservation.max_r)};
    });
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
