#include "spinherald/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spinherald {

using nlohmann::json;

HeraldParams HeraldConfig::params() const {
    HeraldParams p;
    p.p0 = p0;
    p.p2 = p2_ratio * p0;
    p.pd = pd;
    p.pf = pf_dark + pf_exct;
    return p;
}

PurityBudget HeraldConfig::budget() const {
    PurityBudget b;
    b.p_click = p_click;
    b.p_dark = dark_fraction * p_click;
    b.p_exct = exct_fraction * p_click;
    b.p_decay = decay_fraction * p_click;
    return b;
}

EfficiencyChain EfficiencyConfig::chain() const {
    EfficiencyChain c;
    c.eta_noise = eta_noise;
    c.eta_mm = eta_mm;
    c.eta_phase = spinherald::eta_phase(optical_phase_shift(alpha0, lines));
    c.eta_ac_stark = spinherald::eta_ac_stark(geometry);
    c.eta_scatter = 1.0 - scatter_fraction_from_calibration(
                              n_with_repump, n_without_repump, branching);
    return c;
}

json default_config_json() {
    return json{
        {"herald",
         {{"p0", 0.014},
          {"p2_ratio", 0.3},
          {"pd", 0.1792},
          {"pf_dark", 8.71e-4},
          {"pf_exct", 2.546e-3},
          {"p_click", 6.7e-3},
          {"dark_fraction", 0.13},
          {"exct_fraction", 0.38},
          {"decay_fraction", 0.11},
          {"n_max", 8},
          {"k_max", 500}}},
        {"efficiency",
         {{"eta_noise", 0.5},
          {"eta_mm", 0.75},
          {"alpha0", 31.0},
          // Relative line strengths and detunings (MHz) of the default
          // transition table; chosen to reproduce the measured 42 degree
          // excitation-beam phase shift at alpha0 = 31.
          {"lines",
           json::array({{{"detuning_mhz", 5.4}, {"strength", 0.637}, {"linewidth_mhz", 5.2}},
                        {{"detuning_mhz", -245.7}, {"strength", 0.4667}, {"linewidth_mhz", 5.2}},
                        {{"detuning_mhz", 206.7}, {"strength", 0.15}, {"linewidth_mhz", 5.2}}})},
          {"ac_stark",
           {{"waist_um", 30.0},
            {"tau_us", 2.5},
            {"peak_shift_rad_per_us", 0.62},
            {"sigma_x_um", 15.0},
            {"sigma_z_um", 15.0}}},
          {"scatter",
           {{"n_with_repump", 1.0e5},
            {"n_without_repump", 1.15e4},
            {"branching",
             json::array({{{"channel", "F4_m0"}, {"fraction", 0.25}, {"detected", false}},
                          {{"channel", "F4_m_other"}, {"fraction", 0.35}, {"detected", true}},
                          {{"channel", "F3_m0"}, {"fraction", 0.15}, {"detected", true}},
                          {{"channel", "F3_m_other"}, {"fraction", 0.25}, {"detected", false}}})}}}}},
        {"sim",
         {{"shots", 100000},
          {"atom_number",
           {{"mean", 3.0e5},
            {"spread", 0.05},
            {"reuse_multipliers", json::array({1.0, 0.85, 0.72, 0.61})}}},
          {"noise", {{"c_const", 0.39}, {"c_lin", 3.3333e-6}, {"c_quad", 4.3333e-12}}},
          {"drift",
           {{"log_sigma", 0.15},
            {"relaxation_shots", 5000},
            {"common_mode_sigma", 3.0}}},
          {"p_click", 6.7e-3},
          {"p_state", 0.38},
          {"signal_efficiency", 0.566},
          {"seed", 7421}}},
        {"analysis",
         {{"window", 200},
          {"bootstrap_resamples", 500},
          {"fit_bins", 8},
          {"bootstrap_seed", 1}}}};
}

namespace {

// Pull a key, with a diagnostic naming the offending path on error.
template <typename T>
T require(const json& j, const std::string& section, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument("config: missing key " + section + "." + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: bad value for " + section + "." + key);
    }
}

json merged_with_defaults(const json& user) {
    json base = default_config_json();
    base.merge_patch(user);
    return base;
}

}  // namespace

RunConfig parse_config(const json& user) {
    const json j = merged_with_defaults(user);
    RunConfig cfg;

    const json& h = j.at("herald");
    cfg.herald.p0 = require<double>(h, "herald", "p0");
    cfg.herald.p2_ratio = require<double>(h, "herald", "p2_ratio");
    cfg.herald.pd = require<double>(h, "herald", "pd");
    cfg.herald.pf_dark = require<double>(h, "herald", "pf_dark");
    cfg.herald.pf_exct = require<double>(h, "herald", "pf_exct");
    cfg.herald.p_click = require<double>(h, "herald", "p_click");
    cfg.herald.dark_fraction = require<double>(h, "herald", "dark_fraction");
    cfg.herald.exct_fraction = require<double>(h, "herald", "exct_fraction");
    cfg.herald.decay_fraction = require<double>(h, "herald", "decay_fraction");
    cfg.herald.n_max = require<int>(h, "herald", "n_max");
    cfg.herald.k_max = require<int>(h, "herald", "k_max");
    cfg.herald.params().validate();

    const json& e = j.at("efficiency");
    cfg.efficiency.eta_noise = require<double>(e, "efficiency", "eta_noise");
    cfg.efficiency.eta_mm = require<double>(e, "efficiency", "eta_mm");
    cfg.efficiency.alpha0 = require<double>(e, "efficiency", "alpha0");
    for (const auto& line : e.at("lines")) {
        TransitionLine t;
        t.detuning = require<double>(line, "efficiency.lines[]", "detuning_mhz");
        t.strength = require<double>(line, "efficiency.lines[]", "strength");
        t.linewidth = require<double>(line, "efficiency.lines[]", "linewidth_mhz");
        cfg.efficiency.lines.push_back(t);
    }
    const json& ac = e.at("ac_stark");
    cfg.efficiency.geometry.waist = require<double>(ac, "efficiency.ac_stark", "waist_um");
    cfg.efficiency.geometry.pulse_duration =
        require<double>(ac, "efficiency.ac_stark", "tau_us");
    cfg.efficiency.geometry.stark_shift_peak =
        require<double>(ac, "efficiency.ac_stark", "peak_shift_rad_per_us");
    cfg.efficiency.geometry.sigma_x =
        require<double>(ac, "efficiency.ac_stark", "sigma_x_um");
    cfg.efficiency.geometry.sigma_z =
        require<double>(ac, "efficiency.ac_stark", "sigma_z_um");
    cfg.efficiency.geometry.validate();
    const json& sc = e.at("scatter");
    cfg.efficiency.n_with_repump =
        require<double>(sc, "efficiency.scatter", "n_with_repump");
    cfg.efficiency.n_without_repump =
        require<double>(sc, "efficiency.scatter", "n_without_repump");
    for (const auto& ch : sc.at("branching")) {
        ScatterChannel c;
        c.name = require<std::string>(ch, "efficiency.scatter.branching[]", "channel");
        c.fraction = require<double>(ch, "efficiency.scatter.branching[]", "fraction");
        c.detected = require<bool>(ch, "efficiency.scatter.branching[]", "detected");
        cfg.efficiency.branching.push_back(c);
    }

    const json& s = j.at("sim");
    cfg.sim.shots = require<std::int64_t>(s, "sim", "shots");
    const json& an = s.at("atom_number");
    cfg.sim.atom_number.mean = require<double>(an, "sim.atom_number", "mean");
    cfg.sim.atom_number.spread = require<double>(an, "sim.atom_number", "spread");
    cfg.sim.atom_number.reuse_multipliers =
        require<std::vector<double>>(an, "sim.atom_number", "reuse_multipliers");
    const json& nz = s.at("noise");
    cfg.sim.noise.c_const = require<double>(nz, "sim.noise", "c_const");
    cfg.sim.noise.c_lin = require<double>(nz, "sim.noise", "c_lin");
    cfg.sim.noise.c_quad = require<double>(nz, "sim.noise", "c_quad");
    const json& dr = s.at("drift");
    cfg.sim.drift.log_sigma = require<double>(dr, "sim.drift", "log_sigma");
    cfg.sim.drift.relaxation_shots =
        require<double>(dr, "sim.drift", "relaxation_shots");
    cfg.sim.drift.common_mode_sigma =
        require<double>(dr, "sim.drift", "common_mode_sigma");
    cfg.sim.p_click = require<double>(s, "sim", "p_click");
    cfg.sim.p_state = require<double>(s, "sim", "p_state");
    cfg.sim.signal_efficiency = require<double>(s, "sim", "signal_efficiency");
    cfg.sim.seed = require<std::uint64_t>(s, "sim", "seed");

    const json& a = j.at("analysis");
    cfg.analysis.window = require<int>(a, "analysis", "window");
    cfg.analysis.bootstrap_resamples = require<int>(a, "analysis", "bootstrap_resamples");
    cfg.analysis.fit_bins = require<int>(a, "analysis", "fit_bins");
    cfg.analysis.bootstrap_seed = require<std::uint64_t>(a, "analysis", "bootstrap_seed");
    cfg.sim.window = cfg.analysis.window;

    cfg.sim.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw std::invalid_argument("config: parse error in " + path + ": " + ex.what());
    }
    return parse_config(j);
}

std::string config_fingerprint(const json& j) {
    const std::string canonical = merged_with_defaults(j).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace spinherald
