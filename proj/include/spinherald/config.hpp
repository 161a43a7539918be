#pragma once

// Shared JSON run configuration: herald, efficiency, simulation and analysis
// sections, plus a stable fingerprint for run manifests.

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "spinherald/efficiency.hpp"
#include "spinherald/herald.hpp"
#include "spinherald/simulate.hpp"

namespace spinherald {

inline constexpr const char* kToolVersion = "0.1.0";

struct AnalysisConfig {
    int window = 200;
    int bootstrap_resamples = 500;
    int fit_bins = 8;
    std::uint64_t bootstrap_seed = 1;
};

struct HeraldConfig {
    double p0 = 0.014;
    double p2_ratio = 0.3;
    double pd = 0.1792;
    double pf_dark = 0.0;
    double pf_exct = 0.0;
    double p_click = 6.7e-3;
    double dark_fraction = 0.13;
    double exct_fraction = 0.38;
    double decay_fraction = 0.11;
    int n_max = 8;
    int k_max = 500;

    HeraldParams params() const;
    PurityBudget budget() const;
};

struct EfficiencyConfig {
    double eta_noise = 0.5;
    double eta_mm = 0.75;
    double alpha0 = 31.0;
    std::vector<TransitionLine> lines;
    BeamGeometry geometry;
    double n_with_repump = 1.0;
    double n_without_repump = 0.0;
    std::vector<ScatterChannel> branching;

    EfficiencyChain chain() const;  // evaluates the derived factors
};

struct RunConfig {
    HeraldConfig herald;
    EfficiencyConfig efficiency;
    SimConfig sim;
    AnalysisConfig analysis;
};

// Defaults that reproduce the published numbers; also the bundled config for
// the reproduce subcommand.
nlohmann::json default_config_json();
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// FNV-1a hash of the canonical (key-sorted) JSON dump; stable under key
// reordering in the input file.
std::string config_fingerprint(const nlohmann::json& j);

}  // namespace spinherald
