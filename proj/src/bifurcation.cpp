#include "kurastab/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "kurastab/csv.hpp"
#include "kurastab/errors.hpp"
#include "kurastab/linstab.hpp"
#include "kurastab/parallel.hpp"

namespace kurastab {

namespace {

struct HomVerdict {
    std::string stability;
    std::optional<cplx> root;
};

struct Slice {
    double K = 0.0;
    HomVerdict hom;
    std::vector<PLSBranchPoint> pls;
    std::vector<int> ids;
};

HomVerdict hom_verdict(const FrequencyMarginal& g, double K) {
    HomVerdict v;
    try {
        const auto rep = check_homog_stability(g, K);
        v.stability = rep.stable ? "stable" : "unstable";
        for (const auto& z : rep.unstable_roots)
            if (!v.root || z.real() > v.root->real()) v.root = z;
    } catch (const InconclusiveError&) {
        v.stability = "marginal";
    }
    return v;
}

bool hom_unstable(const FrequencyMarginal& g, double K) { return scan_imaginary_axis(g, K).winding > 0; }

std::vector<PLSBranchPoint> classify(const FrequencyMarginal& g, double K, std::vector<PLSBranchPoint> pts) {
    for (auto& p : pts) {
        try {
            p = pls_stability(g, K, p);
        } catch (const Error&) {
            p.stability = PlsStability::Marginal;
        }
    }
    return pts;
}

std::vector<std::pair<double, double>> seeds_of(const std::vector<PLSBranchPoint>& pts) {
    std::vector<std::pair<double, double>> s;
    for (const auto& p : pts) s.emplace_back(p.r, p.omega);
    return s;
}

Slice evaluate(const FrequencyMarginal& g, double K, const std::vector<std::pair<double, double>>& seeds,
               const SweepOptions& opt) {
    Slice s;
    s.K = K;
    s.hom = hom_verdict(g, K);
    s.pls = classify(g, K, solve_pls(g, K, seeds, opt.solver));
    return s;
}

// The PLS nearest to (r, |Omega|) at coupling K within `radius`, if any.
std::optional<PLSBranchPoint> branch_near(const FrequencyMarginal& g, double K, double r, double om, double radius,
                                          const std::vector<std::pair<double, double>>& seeds) {
    PlsSolveOptions local;
    local.r_starts = 0;
    local.omega_starts = 0;
    std::optional<PLSBranchPoint> best;
    double best_d = radius;
    for (const auto& p : solve_pls(g, K, seeds, local)) {
        const double d = std::hypot(p.r - r, std::abs(p.omega) - std::abs(om));
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

template <class Pred>
std::pair<double, double> bisect(double lo, double hi, bool lo_value, Pred&& pred, double width) {
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) == lo_value ? lo : hi) = mid;
    }
    return {lo, hi};
}

}  // namespace

BifurcationDiagram sweep(const FrequencyMarginal& g, double K_min, double K_max, double step,
                         const SweepOptions& opt) {
    if (!(step > 0.0)) throw ValidationError("sweep step must be positive");
    if (!(K_max >= K_min) || !(K_min > 0.0)) throw ValidationError("sweep needs 0 < K_min <= K_max");
    BifurcationDiagram d;
    d.marginal = g.kind_name();
    d.K_min = K_min;
    d.K_max = K_max;
    d.step = step;
    const long n = static_cast<long>(std::floor((K_max - K_min) / step + 1e-9)) + 1;
    std::vector<Slice> slices(n);
    auto K_at = [&](long i) { return K_min + step * static_cast<double>(i); };
    if (opt.mode == SweepMode::Multistart) {
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) { slices[i] = evaluate(g, K_at(i), {}, opt); });
    } else {
        for (long i = 0; i < n; ++i)
            slices[i] = evaluate(g, K_at(i), i ? seeds_of(slices[i - 1].pls) : std::vector<std::pair<double, double>>{}, opt);
    }

    // Branch identities by nearest neighbour between consecutive slices.
    int next_id = 1;
    for (long i = 0; i < n; ++i) {
        auto& cur = slices[i];
        cur.ids.assign(cur.pls.size(), 0);
        if (i > 0) {
            const auto& prev = slices[i - 1];
            struct Cand {
                double dist;
                std::size_t a, b;
            };
            std::vector<Cand> cands;
            for (std::size_t a = 0; a < cur.pls.size(); ++a)
                for (std::size_t b = 0; b < prev.pls.size(); ++b) {
                    const double dd = std::hypot(cur.pls[a].r - prev.pls[b].r, cur.pls[a].omega - prev.pls[b].omega);
                    if (dd < opt.match_radius) cands.push_back({dd, a, b});
                }
            std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
                return x.dist != y.dist ? x.dist < y.dist : (x.a != y.a ? x.a < y.a : x.b < y.b);
            });
            std::vector<bool> used_prev(prev.pls.size(), false);
            for (const auto& c : cands) {
                if (cur.ids[c.a] != 0 || used_prev[c.b]) continue;
                cur.ids[c.a] = prev.ids[c.b];
                used_prev[c.b] = true;
            }
            // Fast-moving branches (near a pitchfork r grows like a square root)
            // can step past the radius; pair the leftovers by Omega sign.
            for (std::size_t a = 0; a < cur.pls.size(); ++a) {
                if (cur.ids[a] != 0) continue;
                std::optional<std::size_t> pick;
                double best = 4 * opt.match_radius;
                for (std::size_t b = 0; b < prev.pls.size(); ++b) {
                    if (used_prev[b]) continue;
                    const double oa = cur.pls[a].omega, ob = prev.pls[b].omega;
                    if ((oa > 1e-6) != (ob > 1e-6) || (oa < -1e-6) != (ob < -1e-6)) continue;
                    const double dd = std::hypot(cur.pls[a].r - prev.pls[b].r, oa - ob);
                    if (dd < best) {
                        best = dd;
                        pick = b;
                    }
                }
                if (pick) {
                    cur.ids[a] = prev.ids[*pick];
                    used_prev[*pick] = true;
                }
            }
        }
        for (auto& id : cur.ids)
            if (id == 0) id = next_id++;
    }

    const double width = step / opt.refine_factor;
    long decisive = slices[0].hom.stability == "marginal" ? -1 : 0;
    for (long i = 1; i < n; ++i) {
        const auto& prev = slices[i - 1];
        const auto& cur = slices[i];
        const double lo = prev.K, hi = cur.K;

        // Marginal slices are skipped; the flip is bracketed by the last decisive one.
        if (cur.hom.stability != "marginal") {
            const Slice* last = decisive >= 0 ? &slices[decisive] : nullptr;
            decisive = i;
            if (last && last->hom.stability != cur.hom.stability) {
                const bool now_unstable = cur.hom.stability == "unstable";
                const double from = last->K;
                const auto [a, b] =
                    bisect(from, hi, hom_unstable(g, from), [&](double K) { return hom_unstable(g, K); }, width);
                const auto& root = now_unstable ? cur.hom.root : last->hom.root;
                const bool real_root = root && std::abs(root->imag()) < 1e-6;
                std::string type = real_root ? "pitchfork" : (now_unstable ? "hom-destab" : "hom-restab");
                d.events.push_back({type, 0.5 * (a + b), b - a});
            }
        }

        // Folds: branches born or lost away from r = 0, grouped by (r, |Omega|).
        auto fold_events = [&](const Slice& have, const Slice& lack, bool birth) {
            std::vector<std::pair<double, double>> reps;
            for (std::size_t k = 0; k < have.pls.size(); ++k) {
                const int id = have.ids[k];
                if (std::find(lack.ids.begin(), lack.ids.end(), id) != lack.ids.end()) continue;
                const auto& p = have.pls[k];
                if (p.r <= opt.small_r) continue;
                const bool grouped = std::any_of(reps.begin(), reps.end(), [&](const auto& q) {
                    return std::hypot(q.first - p.r, q.second - std::abs(p.omega)) < 3 * opt.match_radius;
                });
                if (grouped) continue;
                reps.emplace_back(p.r, std::abs(p.omega));
                const auto seeds = seeds_of(have.pls);
                std::optional<PLSBranchPoint> last_seen;
                auto present = [&](double K) {
                    auto q = branch_near(g, K, p.r, p.omega, 3 * opt.match_radius, seeds);
                    if (q) last_seen = q;
                    return q.has_value();
                };
                // birth: absent at lo, present at hi; death: the reverse.
                if (present(lo) == present(hi)) continue;
                last_seen.reset();
                const auto [a, b] = bisect(lo, hi, !birth, present, width);
                if (!present(birth ? b : a)) continue;
                // Branches emerging from r = 0 belong to the homogeneous state.
                if (last_seen->r <= opt.small_r) continue;
                d.events.push_back({"saddle-node", 0.5 * (a + b), b - a});
            }
        };
        fold_events(cur, prev, true);
        fold_events(prev, cur, false);
    }

    for (const auto& s : slices) {
        d.rows.push_back({s.K, 0, 0.0, 0.0, s.hom.stability, s.hom.root});
        std::vector<std::size_t> order(s.pls.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.ids[a] < s.ids[b]; });
        for (std::size_t k : order) {
            const auto& p = s.pls[k];
            d.rows.push_back({s.K, s.ids[k], p.r, p.omega, to_string(p.stability), p.leading_root});
        }
    }
    std::sort(d.events.begin(), d.events.end(),
              [](const BifurcationEvent& a, const BifurcationEvent& b) { return a.K < b.K; });
    return d;
}

void emit_diagram(const BifurcationDiagram& d, const std::filesystem::path& dir, const std::string& stem) {
    io::CsvTable rows({"K", "branch", "r", "omega", "stability", "root_re", "root_im"});
    const double nan = std::nan("");
    for (const auto& r : d.rows)
        rows.add_row({io::fmt(r.K), std::to_string(r.branch), io::fmt(r.r), io::fmt(r.omega), r.stability,
                      io::fmt(r.root ? r.root->real() : nan), io::fmt(r.root ? r.root->imag() : nan)});
    io::CsvTable events({"type", "K", "bracket"});
    for (const auto& e : d.events) events.add_row({e.type, io::fmt(e.K), io::fmt(e.bracket)});

    const std::string rows_name = stem + "_rows.csv";
    std::ostringstream gp;
    gp << "# gnuplot script for " << rows_name << "\n"
       << "set datafile separator ','\n"
       << "set key outside right\n"
       << "set xlabel 'K'\nset ylabel 'r'\nset y2label 'Omega'\nset y2tics\nset ytics nomirror\n"
       << "plot '" << rows_name << "' every ::1 using 1:((strcol(5) eq 'stable' && $2 > 0) ? $3 : 1/0) "
       << "with points pt 7 ps 0.6 lc rgb 'red' title 'stable PLS', \\\n"
       << "     '" << rows_name << "' every ::1 using 1:((strcol(5) ne 'stable' && $2 > 0) ? $3 : 1/0) "
       << "with points pt 7 ps 0.6 lc rgb 'blue' title 'unstable PLS', \\\n"
       << "     '" << rows_name << "' every ::1 using 1:($2 > 0 ? $4 : 1/0) axes x1y2 "
       << "with points pt 6 ps 0.5 lc rgb 'dark-green' title 'rotation frequency', \\\n"
       << "     '" << rows_name << "' every ::1 using 1:(($2 == 0 && strcol(5) eq 'stable') ? 0 : 1/0) "
       << "with lines lw 3 lc rgb 'black' title 'stable f_hom'\n";

    io::write_atomic(dir / rows_name, rows.str());
    io::write_atomic(dir / (stem + "_events.csv"), events.str());
    io::write_atomic(dir / (stem + "_plot.gp"), gp.str());
}

}  // namespace kurastab
