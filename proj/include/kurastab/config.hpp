#pragma once

// Run configuration: strict JSON parsing, defaults, validation.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kurastab/freqdist.hpp"
#include "kurastab/spectral.hpp"

namespace kurastab {

struct MarginalSpec {
    std::string kind = "cauchy";  // cauchy, bi_cauchy, tri_cauchy, cauchy_mixture, gaussian, tabulated
    double delta = 1.0;
    double center = 0.0;
    double offset = 0.55;
    double alpha = 0.17;
    double sigma = 1.0;
    std::vector<CauchyComponent> components;
    std::string table_file;
};

struct RunConfig {
    std::string command;
    MarginalSpec marginal;

    double kappa = 1.0;
    std::vector<double> kappa_values;
    double kappa_min = 1.0, kappa_max = 3.0, kappa_step = 0.02;
    std::string sweep_mode = "continuation";
    std::optional<std::pair<double, double>> r_window;
    double omega_max = -1.0;

    int L = 32;
    int N = 2048;
    double tau_max = 40.0;
    std::optional<double> dt;
    double T = 40.0;
    int sample_every = 10;
    bool full_line = false;
    bool snapshot = false;
    std::vector<Perturbation> perturbations;
    std::string norm_weight = "none";  // none, exponential, polynomial
    double norm_weight_param = 0.5;

    long ens_N = 10000;
    unsigned long long seed = 1;
    std::string init = "bump";
    double eps = 0.1;
    double ens_dt = 1e-3;

    double h = 1e-3;
    std::string volterra_kernel = "hom";
    std::string forcing = "bump";
    bool laplace_check = false;

    double a = 0.5;
    int n_max = 4;
    int oa_samples = 21;
    double oa_alpha = 0.1;

    std::string output_dir = "kurastab_out";

    /// Effective dt: the configured value or half the grid step.
    double effective_dt() const { return dt ? *dt : 0.5 * tau_max / (N - 1); }
    SpectralGrid grid() const { return {L, N, tau_max, full_line}; }
};

/// Every key accepted in a config document.
const std::vector<std::string>& config_keys();

/// Levenshtein-nearest accepted key.
std::string nearest_key(std::string_view key);

/// Parses JSON text into a document; syntax errors carry line and column.
nlohmann::json parse_config_document(std::string_view text);
/// Parses JSON text; throws ValidationError with line/column for syntax errors,
/// with a suggestion for unknown keys, and listing every violated constraint.
RunConfig parse_config(std::string_view text);
/// Applies defaults and validates an already parsed document.
RunConfig config_from_json(const nlohmann::json& doc);
/// Document with every effective value, for provenance.
nlohmann::json effective_config(const RunConfig& c);

FrequencyMarginal build_marginal(const MarginalSpec& m);

}  // namespace kurastab
