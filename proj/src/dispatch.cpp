#include "kurastab/dispatch.hpp"

#include <cmath>
#include <ostream>

#include "kurastab/bifurcation.hpp"
#include "kurastab/csv.hpp"
#include "kurastab/ensemble.hpp"
#include "kurastab/errors.hpp"
#include "kurastab/linstab.hpp"
#include "kurastab/oa.hpp"
#include "kurastab/pls.hpp"
#include "kurastab/spectral.hpp"
#include "kurastab/volterra.hpp"

namespace kurastab {

namespace fs = std::filesystem;
using io::fmt;

namespace {

const double nan_value = std::nan("");

std::vector<double> couplings(const RunConfig& c) {
    return c.kappa_values.empty() ? std::vector<double>{c.kappa} : c.kappa_values;
}

void write_trajectory(const fs::path& path, const TrajectoryRecord& rec) {
    const bool with_norm = !rec.norms.empty();
    std::vector<std::string> head = {"t", "re_r", "im_r", "abs_r"};
    if (with_norm) head.push_back("norm");
    io::CsvTable t(head);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        std::vector<double> row = {rec.times[i], rec.r_values[i].real(), rec.r_values[i].imag(), std::abs(rec.r_values[i])};
        if (with_norm) row.push_back(rec.norms[i]);
        t.add_numbers(row);
    }
    io::write_atomic(path, t.str());
}

int run_stability(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    io::CsvTable t({"K", "stable", "winding", "margin", "extent", "root_re", "root_im"});
    for (double K : couplings(c)) {
        const auto rep = check_homog_stability(g, K);
        out << "K = " << fmt(K) << ": " << (rep.stable ? "stable" : "unstable") << ", winding " << rep.winding_number
            << ", margin " << fmt(rep.boundary_margin) << "\n";
        auto row = [&](double re, double im) {
            t.add_row({fmt(K), rep.stable ? "1" : "0", std::to_string(rep.winding_number), fmt(rep.boundary_margin),
                       fmt(rep.contour_extent), fmt(re), fmt(im)});
        };
        if (rep.unstable_roots.empty()) row(nan_value, nan_value);
        for (const auto& z : rep.unstable_roots) {
            row(z.real(), z.imag());
            out << "  root " << fmt(z.real()) << (z.imag() < 0 ? " - " : " + ") << fmt(std::abs(z.imag())) << "i\n";
        }
    }
    if (g.kind() == FrequencyMarginal::Kind::CauchyMixture)
        out << "critical coupling: " << fmt(critical_coupling(g)) << "\n";
    io::write_atomic(dir / "stability.csv", t.str());
    return ExitOk;
}

int run_pls(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    io::CsvTable t({"K", "r", "omega", "residual", "stability", "root_re", "root_im"});
    PlsSolveOptions opt;
    opt.omega_max = c.omega_max;
    for (double K : couplings(c)) {
        const auto sols = solve_pls(g, K, {}, opt);
        out << "K = " << fmt(K) << ": " << sols.size() << " partially locked state(s)\n";
        for (auto p : sols) {
            p = pls_stability(g, K, p);
            const cplx root = p.leading_root.value_or(cplx(nan_value, nan_value));
            t.add_row({fmt(K), fmt(p.r), fmt(p.omega), fmt(p.residual), to_string(p.stability), fmt(root.real()),
                       fmt(root.imag())});
            out << "  r = " << fmt(p.r) << ", omega = " << fmt(p.omega) << ", " << to_string(p.stability) << "\n";
        }
    }
    io::write_atomic(dir / "pls.csv", t.str());
    return ExitOk;
}

std::vector<Perturbation> perturbations_or(const RunConfig& c, std::vector<Perturbation> fallback) {
    return c.perturbations.empty() ? fallback : c.perturbations;
}

int run_simulate(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    auto s = init_state(g, c.kappa, c.grid(), perturbations_or(c, {Perturbation{1, 1e-3}}));
    RunOptions opt;
    opt.sample_every = c.sample_every;
    if (c.norm_weight == "exponential") opt.norm_weight = WeightSpec::exponential(c.norm_weight_param);
    if (c.norm_weight == "polynomial") opt.norm_weight = WeightSpec::polynomial(c.norm_weight_param);
    const auto rec = run(s, c.T, c.effective_dt(), opt);
    write_trajectory(dir / "trajectory.csv", rec);
    out << "|r(" << fmt(rec.times.back()) << ")| = " << fmt(std::abs(rec.r_values.back())) << "\n";
    if (c.snapshot) {
        std::vector<std::string> head = {"tau"};
        for (int l = 0; l <= s.L; ++l) {
            head.push_back("re_W" + std::to_string(l));
            head.push_back("im_W" + std::to_string(l));
        }
        io::CsvTable t(head);
        for (int k = 0; k < s.nodes; ++k) {
            std::vector<double> row = {s.tau(k)};
            for (int l = 0; l <= s.L; ++l) {
                row.push_back(s.at(l, k).real());
                row.push_back(s.at(l, k).imag());
            }
            t.add_numbers(row);
        }
        io::write_atomic(dir / "snapshot.csv", t.str());
    }
    return ExitOk;
}

int run_ensemble(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    PhaseInit init;
    init.kind = c.init == "bump" ? PhaseInit::Kind::Bump : PhaseInit::Kind::Uniform;
    init.epsilon = c.eps;
    auto e = sample_ensemble(g, static_cast<std::size_t>(c.ens_N), c.seed, init, c.kappa);
    const auto rec = integrate_ensemble(e, c.T, c.ens_dt, c.sample_every);
    write_trajectory(dir / "trajectory.csv", rec);
    out << "|r(" << fmt(rec.times.back()) << ")| = " << fmt(std::abs(rec.r_values.back())) << "\n";
    return ExitOk;
}

int run_volterra(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    const std::size_t n = static_cast<std::size_t>(std::llround(c.T / c.h)) + 1;
    VolterraSystem sys;
    sys.h = c.h;
    std::optional<PLSBranchPoint> state;
    if (c.volterra_kernel == "hom") {
        std::vector<cplx> k(n), f(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = c.h * static_cast<double>(i);
            k[i] = kernel_hom(g, c.kappa, t);
            f[i] = c.forcing == "exp" ? cplx(std::exp(-t)) : c.eps * std::exp(-t) * g.fourier(t);
        }
        sys = scalar_system(c.h, k, f);
    } else {
        auto sols = solve_pls(g, c.kappa);
        if (sols.empty()) throw NotFoundError("no partially locked state at this coupling");
        for (auto& p : sols) p = pls_stability(g, c.kappa, p);
        state = sols.back();
        for (const auto& p : sols)
            if (p.stability == PlsStability::Stable) state = p;
        KernelPlsOptions kopt;
        kopt.grid = {c.L, c.N, c.tau_max, false};
        if (c.dt) kopt.max_dt = *c.dt;
        sys.dim = 2;
        sys.kernel = kernel_pls(g, c.kappa, *state, c.h, n, kopt);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = c.h * static_cast<double>(i);
            const cplx f = c.forcing == "exp" ? cplx(std::exp(-t)) : c.eps * std::exp(-t) * g.fourier(t);
            sys.forcing.push_back({f, std::conj(f)});
        }
        out << "PLS r = " << fmt(state->r) << ", omega = " << fmt(state->omega) << "\n";
    }
    sys = solve_volterra(sys);
    sys = resolvent(sys, sys.dim == 2);
    out << "discrete residual " << fmt(discrete_residual(sys)) << "\n";

    std::vector<std::string> head = {"t"};
    const int dim = sys.dim;
    for (int i = 0; i < dim; ++i) {
        head.push_back("x" + std::to_string(i) + "_re");
        head.push_back("x" + std::to_string(i) + "_im");
    }
    const int entries = dim == 1 ? 1 : 4;
    for (int e = 0; e < entries; ++e) {
        const std::string tag = dim == 1 ? "R" : "R" + std::to_string(e / 2) + std::to_string(e % 2);
        head.push_back(tag + "_re");
        head.push_back(tag + "_im");
    }
    io::CsvTable t(head);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> row = {sys.time(k)};
        for (int i = 0; i < dim; ++i) {
            row.push_back(sys.solution[k][i].real());
            row.push_back(sys.solution[k][i].imag());
        }
        for (int e = 0; e < entries; ++e) {
            row.push_back(sys.resolvent[k][e].real());
            row.push_back(sys.resolvent[k][e].imag());
        }
        t.add_numbers(row);
    }
    io::write_atomic(dir / "volterra.csv", t.str());

    if (c.laplace_check) {
        io::CsvTable lc({"z_re", "z_im", "entry", "numeric_re", "numeric_im", "expected_re", "expected_im", "abs_err"});
        double worst = 0.0;
        for (cplx z : {cplx(0.5), cplx(1.0), cplx(1.0, 1.0)}) {
            const Mat2 num = laplace_samples(sys.kernel, c.h, z);
            Mat2 expect{};
            if (dim == 1) {
                expect[0] = 0.5 * c.kappa * g.laplace(z);
            } else {
                const auto m = stability_matrix(g, c.kappa, z, state->r, state->omega);
                for (int e = 0; e < 4; ++e) expect[e] = 0.5 * c.kappa * m.entries[e];
            }
            for (int e = 0; e < entries; ++e) {
                const double err = std::abs(num[e] - expect[e]);
                worst = std::max(worst, err);
                lc.add_row({fmt(z.real()), fmt(z.imag()), std::to_string(e), fmt(num[e].real()), fmt(num[e].imag()),
                            fmt(expect[e].real()), fmt(expect[e].imag()), fmt(err)});
            }
        }
        io::write_atomic(dir / "laplace_check.csv", lc.str());
        out << "Laplace identity max error " << fmt(worst) << "\n";
    }
    return ExitOk;
}

int run_oa_check(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    SpectralGrid grid = c.grid();
    grid.full_line = true;
    auto s = init_state(g, c.kappa, grid, perturbations_or(c, {Perturbation{1, 0.05}, Perturbation{2, 0.05}}));
    const double dt = c.effective_dt();
    std::vector<double> times, norms;
    io::CsvTable t({"t", "norm_w", "fitted_rate"});
    const int m = c.oa_samples;
    RunOptions quiet;
    quiet.sample_every = 1 << 30;
    for (int i = 0; i < m; ++i) {
        if (i > 0) run(s, c.T / (m - 1), dt, quiet);
        times.push_back(s.t);
        norms.push_back(deviation(s, c.a, c.n_max).norm);
        double rate = nan_value;
        if (times.size() >= 2) {
            // Running least-squares slope of log norm.
            double st = 0, sy = 0, stt = 0, sty = 0;
            const double k = static_cast<double>(times.size());
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double y = std::log(std::max(norms[j], 1e-300));
                st += times[j];
                sy += y;
                stt += times[j] * times[j];
                sty += times[j] * y;
            }
            rate = -(k * sty - st * sy) / (k * stt - st * st);
        }
        t.add_numbers({s.t, norms.back(), rate});
    }
    io::write_atomic(dir / "oa_check.csv", t.str());
    const auto chk = decay_check(times, norms, c.a);
    out << "fitted rate " << fmt(chk.rate) << " (required " << fmt(0.9 * c.a) << "): "
        << (chk.passed ? "pass" : "fail") << (chk.vacuous ? " (on manifold)" : "") << "\n";
    return ExitOk;
}

int run_oa_reduce(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    if (g.kind() != FrequencyMarginal::Kind::CauchyMixture)
        throw UnsupportedKind("the reduced system needs a Cauchy mixture");
    ReducedOA red;
    red.poles = g.components();
    red.alpha.assign(red.poles.size(), cplx(c.oa_alpha));
    red.K = c.kappa;
    const auto rec = integrate_reduced(red, c.T, c.effective_dt(), c.sample_every);
    io::CsvTable t({"t", "re_r", "im_r"});
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        t.add_numbers({rec.times[i], rec.r_values[i].real(), rec.r_values[i].imag()});
    io::write_atomic(dir / "oa_reduce.csv", t.str());
    out << "|r(" << fmt(rec.times.back()) << ")| = " << fmt(std::abs(rec.r_values.back())) << "\n";
    return ExitOk;
}

int run_bifurcate(const RunConfig& c, const FrequencyMarginal& g, const fs::path& dir, std::ostream& out) {
    SweepOptions opt;
    opt.mode = c.sweep_mode == "multistart" ? SweepMode::Multistart : SweepMode::Continuation;
    opt.solver.omega_max = c.omega_max;
    auto d = sweep(g, c.kappa_min, c.kappa_max, c.kappa_step, opt);
    if (c.r_window) {
        std::erase_if(d.rows, [&](const DiagramRow& r) {
            return r.branch > 0 && (r.r < c.r_window->first || r.r > c.r_window->second);
        });
    }
    emit_diagram(d, dir);
    for (const auto& e : d.events) out << e.type << " at K = " << fmt(e.K) << " (bracket " << fmt(e.bracket) << ")\n";
    return ExitOk;
}

}  // namespace

int exit_code_for_current_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return ExitValidation;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return ExitNumeric;
    } catch (const IoError& e) {
        err << "i/o failure: " << e.what() << "\n";
        return ExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o failure: " << e.what() << "\n";
        return ExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitIo;
    }
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const fs::path dir = cfg.output_dir;
        const auto g = build_marginal(cfg.marginal);
        io::write_atomic(dir / "effective_config.json", effective_config(cfg).dump(2) + "\n");
        const std::string& cmd = cfg.command;
        if (cmd == "stability") return run_stability(cfg, g, dir, out);
        if (cmd == "pls") return run_pls(cfg, g, dir, out);
        if (cmd == "simulate") return run_simulate(cfg, g, dir, out);
        if (cmd == "ensemble") return run_ensemble(cfg, g, dir, out);
        if (cmd == "volterra") return run_volterra(cfg, g, dir, out);
        if (cmd == "oa-check") return run_oa_check(cfg, g, dir, out);
        if (cmd == "oa-reduce") return run_oa_reduce(cfg, g, dir, out);
        if (cmd == "bifurcate") return run_bifurcate(cfg, g, dir, out);
        throw ValidationError("unknown subcommand \"" + cmd + "\"");
    } catch (...) {
        return exit_code_for_current_exception(err);
    }
}

}  // namespace kurastab
