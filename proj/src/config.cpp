#include "kurastab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "kurastab/csv.hpp"
#include "kurastab/errors.hpp"

namespace kurastab {

using nlohmann::json;

namespace {

const std::vector<std::string> marginal_keys = {"kind", "delta", "center", "offset", "alpha",
                                                "sigma", "components", "table_file"};
const std::vector<std::string> component_keys = {"weight", "center", "delta"};
const std::vector<std::string> perturbation_keys = {"mode", "eps", "profile"};
const std::vector<std::string> commands = {"stability", "pls", "simulate", "ensemble", "volterra",
                                           "oa-check", "oa-reduce", "bifurcate"};

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (std::tolower(a[i - 1]) == std::tolower(b[j - 1]) ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_in(std::string_view key, const std::vector<std::string>& pool) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& k : pool) {
        const std::size_t d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) continue;
        throw ValidationError("unknown key \"" + k + "\"" + where + "; did you mean \"" + nearest_in(k, allowed) +
                              "\"?");
    }
}

// Reads obj[key] into out when present; type mismatches are recorded.
template <class T>
void read(const json& obj, const char* key, T& out, std::vector<std::string>& errs, const std::string& prefix = "") {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        errs.push_back(prefix + key + ": wrong type (" + std::string(obj.at(key).type_name()) + ")");
    }
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
    return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "command", "marginal", "kappa", "kappa_values", "kappa_min", "kappa_max", "kappa_step", "sweep_mode",
        "r_window", "omega_max", "L", "N", "tau_max", "dt", "T", "sample_every", "full_line", "snapshot",
        "perturbations", "norm_weight", "norm_weight_param", "ens_N", "seed", "init", "eps", "ens_dt", "h",
        "volterra_kernel", "forcing", "laplace_check", "a", "n_max", "oa_samples", "oa_alpha", "output_dir"};
    return keys;
}

std::string nearest_key(std::string_view key) { return nearest_in(key, config_keys()); }

FrequencyMarginal build_marginal(const MarginalSpec& m) {
    if (m.kind == "cauchy") return FrequencyMarginal::cauchy(m.delta, m.center);
    if (m.kind == "bi_cauchy") return FrequencyMarginal::bi_cauchy(m.delta, m.offset);
    if (m.kind == "tri_cauchy") return FrequencyMarginal::tri_cauchy(m.delta, m.offset, m.alpha);
    if (m.kind == "cauchy_mixture") return FrequencyMarginal::cauchy_mixture(m.components);
    if (m.kind == "gaussian") return FrequencyMarginal::gaussian(m.sigma);
    if (m.kind == "tabulated") return FrequencyMarginal::tabulated_from_csv(io::read_file(m.table_file));
    throw ValidationError("marginal.kind: unknown kind \"" + m.kind + "\"");
}

json parse_config_document(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line and column.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "config parse error at line " << line << ", column " << col << ": " << e.what();
        throw ValidationError(msg.str());
    }
    return doc;
}

RunConfig parse_config(std::string_view text) { return config_from_json(parse_config_document(text)); }

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    reject_unknown(doc, config_keys(), "");
    RunConfig c;
    std::vector<std::string> errs;

    read(doc, "command", c.command, errs);
    if (doc.contains("marginal")) {
        const json& m = doc.at("marginal");
        if (!m.is_object()) {
            errs.push_back("marginal: must be an object");
        } else {
            reject_unknown(m, marginal_keys, " in marginal");
            read(m, "kind", c.marginal.kind, errs, "marginal.");
            read(m, "delta", c.marginal.delta, errs, "marginal.");
            read(m, "center", c.marginal.center, errs, "marginal.");
            read(m, "offset", c.marginal.offset, errs, "marginal.");
            read(m, "alpha", c.marginal.alpha, errs, "marginal.");
            read(m, "sigma", c.marginal.sigma, errs, "marginal.");
            read(m, "table_file", c.marginal.table_file, errs, "marginal.");
            if (m.contains("components")) {
                if (!m.at("components").is_array()) errs.push_back("marginal.components: must be an array");
                else
                    for (const auto& comp : m.at("components")) {
                        reject_unknown(comp, component_keys, " in marginal.components");
                        CauchyComponent cc;
                        read(comp, "weight", cc.weight, errs, "marginal.components.");
                        read(comp, "center", cc.center, errs, "marginal.components.");
                        read(comp, "delta", cc.half_width, errs, "marginal.components.");
                        c.marginal.components.push_back(cc);
                    }
            }
        }
    }
    read(doc, "kappa", c.kappa, errs);
    read(doc, "kappa_values", c.kappa_values, errs);
    read(doc, "kappa_min", c.kappa_min, errs);
    read(doc, "kappa_max", c.kappa_max, errs);
    read(doc, "kappa_step", c.kappa_step, errs);
    read(doc, "sweep_mode", c.sweep_mode, errs);
    if (doc.contains("r_window")) {
        std::vector<double> w;
        read(doc, "r_window", w, errs);
        if (w.size() == 2) c.r_window = std::pair{w[0], w[1]};
        else errs.push_back("r_window: expected [r_low, r_high]");
    }
    read(doc, "omega_max", c.omega_max, errs);
    read(doc, "L", c.L, errs);
    read(doc, "N", c.N, errs);
    read(doc, "tau_max", c.tau_max, errs);
    if (doc.contains("dt") && !doc.at("dt").is_null()) {
        double v = 0.0;
        read(doc, "dt", v, errs);
        c.dt = v;
    }
    read(doc, "T", c.T, errs);
    read(doc, "sample_every", c.sample_every, errs);
    read(doc, "full_line", c.full_line, errs);
    read(doc, "snapshot", c.snapshot, errs);
    if (doc.contains("perturbations")) {
        if (!doc.at("perturbations").is_array()) errs.push_back("perturbations: must be an array");
        else
            for (const auto& p : doc.at("perturbations")) {
                reject_unknown(p, perturbation_keys, " in perturbations");
                Perturbation q;
                read(p, "mode", q.mode, errs, "perturbations.");
                if (p.contains("eps")) {
                    const auto& e = p.at("eps");
                    if (e.is_number()) q.amplitude = e.get<double>();
                    else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                        q.amplitude = cplx(e[0].get<double>(), e[1].get<double>());
                    else errs.push_back("perturbations.eps: number or [re, im] expected");
                }
                std::string profile = "bump";
                read(p, "profile", profile, errs, "perturbations.");
                if (profile == "bump") q.profile = Perturbation::Profile::Bump;
                else if (profile == "harmonic") q.profile = Perturbation::Profile::Harmonic;
                else errs.push_back("perturbations.profile: expected bump or harmonic");
                c.perturbations.push_back(q);
            }
    }
    read(doc, "norm_weight", c.norm_weight, errs);
    read(doc, "norm_weight_param", c.norm_weight_param, errs);
    read(doc, "ens_N", c.ens_N, errs);
    read(doc, "seed", c.seed, errs);
    read(doc, "init", c.init, errs);
    read(doc, "eps", c.eps, errs);
    read(doc, "ens_dt", c.ens_dt, errs);
    read(doc, "h", c.h, errs);
    read(doc, "volterra_kernel", c.volterra_kernel, errs);
    read(doc, "forcing", c.forcing, errs);
    read(doc, "laplace_check", c.laplace_check, errs);
    read(doc, "a", c.a, errs);
    read(doc, "n_max", c.n_max, errs);
    read(doc, "oa_samples", c.oa_samples, errs);
    read(doc, "oa_alpha", c.oa_alpha, errs);
    read(doc, "output_dir", c.output_dir, errs);

    // Constraints.
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) errs.push_back(what);
    };
    if (!c.command.empty())
        need(std::find(commands.begin(), commands.end(), c.command) != commands.end(),
             "command: unknown subcommand \"" + c.command + "\"");
    need(one_of(c.marginal.kind, {"cauchy", "bi_cauchy", "tri_cauchy", "cauchy_mixture", "gaussian", "tabulated"}),
         "marginal.kind: unknown kind \"" + c.marginal.kind + "\"");
    need(c.marginal.delta > 0.0, "marginal.delta: must be > 0");
    need(c.marginal.sigma > 0.0, "marginal.sigma: must be > 0");
    if (c.marginal.kind == "tri_cauchy") need(c.marginal.alpha > 0.0 && c.marginal.alpha < 1.0, "marginal.alpha: must lie in (0, 1)");
    if (c.marginal.kind == "cauchy_mixture") need(!c.marginal.components.empty(), "marginal.components: required for cauchy_mixture");
    if (c.marginal.kind == "tabulated") need(!c.marginal.table_file.empty(), "marginal.table_file: required for tabulated");
    need(c.kappa >= 0.0 && std::isfinite(c.kappa), "kappa: must be finite and >= 0");
    for (double k : c.kappa_values) need(k >= 0.0 && std::isfinite(k), "kappa_values: entries must be >= 0");
    need(c.kappa_min > 0.0, "kappa_min: must be > 0");
    need(c.kappa_max >= c.kappa_min, "kappa_max: must be >= kappa_min");
    need(c.kappa_step > 0.0, "kappa_step: must be > 0");
    need(one_of(c.sweep_mode, {"continuation", "multistart"}), "sweep_mode: expected continuation or multistart");
    need(c.L >= 2, "L: must be >= 2");
    need(c.N >= 64, "N: must be >= 64");
    need(c.tau_max >= 10.0, "tau_max: must be >= 10");
    if (c.dt) {
        need(*c.dt > 0.0, "dt: must be > 0");
        if (c.N >= 64 && c.tau_max > 0.0)
            need(*c.dt <= c.tau_max / (c.N - 1) * (1.0 + 1e-12), "dt: must not exceed the grid step tau_max / (N - 1)");
    }
    need(c.T > 0.0, "T: must be > 0");
    need(c.sample_every >= 1, "sample_every: must be >= 1");
    for (const auto& p : c.perturbations) {
        need(p.mode >= 1 && p.mode <= c.L, "perturbations.mode: must lie in 1..L");
        need(std::abs(p.amplitude) <= 1.0, "perturbations.eps: modulus must be <= 1");
    }
    need(one_of(c.norm_weight, {"none", "exponential", "polynomial"}), "norm_weight: expected none, exponential or polynomial");
    if (c.norm_weight == "exponential") need(c.norm_weight_param >= 0.0, "norm_weight_param: must be >= 0");
    if (c.norm_weight == "polynomial") need(c.norm_weight_param > 1.0, "norm_weight_param: must be > 1");
    need(c.ens_N >= 2, "ens_N: must be >= 2");
    need(one_of(c.init, {"uniform", "bump"}), "init: expected uniform or bump");
    need(std::abs(c.eps) <= 1.0, "eps: must satisfy |eps| <= 1");
    need(c.ens_dt > 0.0, "ens_dt: must be > 0");
    if (c.command == "ensemble")
        need(c.ens_dt <= 0.01 / std::max(1.0, c.kappa) * (1.0 + 1e-12), "ens_dt: must be <= 0.01 / max(1, kappa)");
    need(c.h > 0.0, "h: must be > 0");
    need(one_of(c.volterra_kernel, {"hom", "pls"}), "volterra_kernel: expected hom or pls");
    need(one_of(c.forcing, {"bump", "exp"}), "forcing: expected bump or exp");
    need(c.a > 0.0, "a: must be > 0");
    need(c.n_max >= 1, "n_max: must be >= 1");
    if (c.command == "oa-check") {
        need(2 * c.n_max <= c.L, "n_max: 2 n_max must not exceed L");
        need(c.a * c.tau_max <= 30.0, "a: a * tau_max must not exceed 30");
    }
    need(c.oa_samples >= 10, "oa_samples: must be >= 10");
    need(std::abs(c.oa_alpha) <= 1.0, "oa_alpha: must satisfy |oa_alpha| <= 1");
    if (c.r_window) need(c.r_window->first <= c.r_window->second, "r_window: low must not exceed high");
    need(!c.output_dir.empty(), "output_dir: must not be empty");

    if (errs.empty() && c.marginal.kind != "tabulated") {
        try {
            build_marginal(c.marginal);
        } catch (const ValidationError& e) {
            errs.push_back(std::string("marginal: ") + e.what());
        }
    }
    if (!errs.empty()) {
        std::ostringstream msg;
        msg << "invalid config (" << errs.size() << " problem" << (errs.size() > 1 ? "s" : "") << "):";
        for (const auto& e : errs) msg << "\n  - " << e;
        throw ValidationError(msg.str());
    }
    return c;
}

json effective_config(const RunConfig& c) {
    json m = {{"kind", c.marginal.kind}};
    if (c.marginal.kind == "cauchy") m.update({{"delta", c.marginal.delta}, {"center", c.marginal.center}});
    if (c.marginal.kind == "bi_cauchy") m.update({{"delta", c.marginal.delta}, {"offset", c.marginal.offset}});
    if (c.marginal.kind == "tri_cauchy")
        m.update({{"delta", c.marginal.delta}, {"offset", c.marginal.offset}, {"alpha", c.marginal.alpha}});
    if (c.marginal.kind == "gaussian") m["sigma"] = c.marginal.sigma;
    if (c.marginal.kind == "tabulated") m["table_file"] = c.marginal.table_file;
    if (c.marginal.kind == "cauchy_mixture") {
        m["components"] = json::array();
        for (const auto& cc : c.marginal.components)
            m["components"].push_back({{"weight", cc.weight}, {"center", cc.center}, {"delta", cc.half_width}});
    }
    json perts = json::array();
    for (const auto& p : c.perturbations)
        perts.push_back({{"mode", p.mode},
                         {"eps", {p.amplitude.real(), p.amplitude.imag()}},
                         {"profile", p.profile == Perturbation::Profile::Bump ? "bump" : "harmonic"}});
    json doc = {{"command", c.command},
                {"marginal", m},
                {"kappa", c.kappa},
                {"kappa_values", c.kappa_values},
                {"kappa_min", c.kappa_min},
                {"kappa_max", c.kappa_max},
                {"kappa_step", c.kappa_step},
                {"sweep_mode", c.sweep_mode},
                {"omega_max", c.omega_max},
                {"L", c.L},
                {"N", c.N},
                {"tau_max", c.tau_max},
                {"dt", c.effective_dt()},
                {"T", c.T},
                {"sample_every", c.sample_every},
                {"full_line", c.full_line},
                {"snapshot", c.snapshot},
                {"perturbations", perts},
                {"norm_weight", c.norm_weight},
                {"norm_weight_param", c.norm_weight_param},
                {"ens_N", c.ens_N},
                {"seed", c.seed},
                {"init", c.init},
                {"eps", c.eps},
                {"ens_dt", c.ens_dt},
                {"h", c.h},
                {"volterra_kernel", c.volterra_kernel},
                {"forcing", c.forcing},
                {"laplace_check", c.laplace_check},
                {"a", c.a},
                {"n_max", c.n_max},
                {"oa_samples", c.oa_samples},
                {"oa_alpha", c.oa_alpha},
                {"output_dir", c.output_dir}};
    if (c.r_window) doc["r_window"] = {c.r_window->first, c.r_window->second};
    return doc;
}

}  // namespace kurastab
