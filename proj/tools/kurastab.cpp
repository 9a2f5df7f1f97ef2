// kurastab: stability analysis and simulation of the continuum Kuramoto model.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kurastab/config.hpp"
#include "kurastab/csv.hpp"
#include "kurastab/dispatch.hpp"
#include "kurastab/errors.hpp"
#include "kurastab/parallel.hpp"

using namespace kurastab;
using nlohmann::json;

namespace {

// "a.b=value": value is read as JSON when it parses, otherwise as a string.
void apply_setting(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got \"" + assignment + "\"");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability analysis and simulation of the continuum Kuramoto model"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    unsigned jobs = 0;
    std::vector<std::string> settings;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory (overrides KURASTAB_OUT and the config)");
    app.add_option("--jobs", jobs, "worker cap for parallel loops (0 = all cores)");
    app.add_option("--set", settings, "override a config key, e.g. --set marginal.delta=0.5");

    struct Numeric {
        const char* flag;
        const char* key;
        const char* help;
    };
    const std::vector<Numeric> numeric = {
        {"--kappa", "kappa", "coupling strength K"},      {"--L", "L", "Fourier mode cutoff"},
        {"--N", "N", "tau-grid nodes"},                    {"--tau-max", "tau_max", "tau-grid extent"},
        {"--dt", "dt", "time step"},                       {"--T", "T", "time horizon"},
        {"--volterra-h", "h", "Volterra grid step"}, {"--eps", "eps", "initial bump amplitude"},
        {"--seed", "seed", "ensemble seed"},               {"--ens-N", "ens_N", "ensemble size"},
        {"--kappa-min", "kappa_min", "sweep start"},       {"--kappa-max", "kappa_max", "sweep end"},
        {"--kappa-step", "kappa_step", "sweep step"},      {"--a", "a", "OA weight exponent"}};
    std::vector<double> numeric_values(numeric.size(), 0.0);
    std::vector<CLI::Option*> numeric_opts;
    for (std::size_t i = 0; i < numeric.size(); ++i)
        numeric_opts.push_back(app.add_option(numeric[i].flag, numeric_values[i], numeric[i].help));

    const std::vector<std::pair<const char*, const char*>> subcommands = {
        {"stability", "homogeneous-state stability for one or more K"},
        {"pls", "partially locked states and their stability"},
        {"simulate", "spectral simulation of the kinetic equation"},
        {"ensemble", "finite-N oscillator simulation"},
        {"volterra", "linearized order-parameter Volterra equation"},
        {"oa-check", "decay of the deviation from the OA manifold"},
        {"oa-reduce", "reduced amplitude equations for Cauchy mixtures"},
        {"bifurcate", "K-sweep bifurcation diagram"}};
    for (const auto& [name, help] : subcommands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ExitValidation;
    }

    try {
        set_max_jobs(jobs);
        json doc = config_path.empty() ? json::object() : parse_config_document(io::read_file(config_path));
        doc["command"] = app.get_subcommands().front()->get_name();
        for (std::size_t i = 0; i < numeric.size(); ++i)
            if (numeric_opts[i]->count() > 0) {
                const std::string key = numeric[i].key;
                const bool integral = key == "L" || key == "N" || key == "seed" || key == "ens_N";
                if (integral) doc[key] = static_cast<long long>(std::llround(numeric_values[i]));
                else doc[key] = numeric_values[i];
            }
        for (const auto& s : settings) apply_setting(doc, s);
        if (const char* env = std::getenv("KURASTAB_OUT"); env && *env) doc["output_dir"] = env;
        if (!out_dir.empty()) doc["output_dir"] = out_dir;
        const RunConfig cfg = config_from_json(doc);
        return dispatch(cfg, std::cout, std::cerr);
    } catch (...) {
        return exit_code_for_current_exception(std::cerr);
    }
}
