#pragma once

// K-sweeps tracking the homogeneous state and every PLS branch.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kurastab/freqdist.hpp"
#include "kurastab/pls.hpp"

namespace kurastab {

struct DiagramRow {
    double K = 0.0;
    /// 0 is the homogeneous state; PLS branches count from 1.
    int branch = 0;
    double r = 0.0;
    double omega = 0.0;
    std::string stability;
    std::optional<cplx> root;
};

struct BifurcationEvent {
    /// pitchfork, saddle-node, hom-destab or hom-restab.
    std::string type;
    double K = 0.0;
    double bracket = 0.0;
};

struct BifurcationDiagram {
    std::string marginal;
    double K_min = 0.0;
    double K_max = 0.0;
    double step = 0.0;
    std::vector<DiagramRow> rows;
    std::vector<BifurcationEvent> events;
};

enum class SweepMode { Continuation, Multistart };

struct SweepOptions {
    SweepMode mode = SweepMode::Continuation;
    PlsSolveOptions solver{};
    /// Branch identity radius in (r, Omega).
    double match_radius = 0.1;
    /// Births and deaths below this r belong to bifurcations from f_hom.
    double small_r = 0.05;
    /// Bisection stops at step / refine_factor.
    double refine_factor = 32.0;
};

BifurcationDiagram sweep(const FrequencyMarginal& g, double K_min, double K_max, double step,
                         const SweepOptions& opt = {});

/// Writes <stem>_rows.csv, <stem>_events.csv and <stem>_plot.gp into dir.
void emit_diagram(const BifurcationDiagram& d, const std::filesystem::path& dir, const std::string& stem = "bifurcation");

}  // namespace kurastab
