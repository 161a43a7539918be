#pragma once

// Monte Carlo generator of synthetic experiment records: per-shot phase
// outcomes with projection, shot and quadratic classical noise, slow
// variance drifts, a common-mode offset shared with 12 reference
// measurements, and heralding click flags.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace spinherald {

struct AtomNumberModel {
    double mean = 3.0e5;
    double spread = 0.05;  // lognormal relative spread per MOT load
    std::vector<double> reuse_multipliers = {1.0, 0.85, 0.72, 0.61};
};

struct NoiseCoeffs {
    double c_const = 0.0;
    double c_lin = 0.0;
    double c_quad = 0.0;
};

struct DriftModel {
    double log_sigma = 0.0;         // stationary std of the log-variance walk
    double relaxation_shots = 5000; // OU relaxation scale
    double common_mode_sigma = 0.0; // offset shared by a shot and its references
};

struct SimConfig {
    std::int64_t shots = 0;
    AtomNumberModel atom_number;
    NoiseCoeffs noise;
    DriftModel drift;
    double p_click = 0.0;
    double p_state = 0.0;           // purity: excitation probability per click
    double signal_efficiency = 1.0; // physics part of the eta chain
    int window = 200;               // analysis window M carried with the run
    std::uint64_t seed = 0;

    void validate() const;
};

struct MeasurementRecord {
    std::int64_t index = 0;
    double phi_raw = 0.0;
    std::array<double, 12> references{};
    bool click = false;
    bool excitation_present = false;
    std::int64_t n_atoms = 0;
};

struct Dataset {
    std::vector<MeasurementRecord> records;
    std::uint64_t seed = 0;
    std::string config_fingerprint;
};

Dataset simulate_run(const SimConfig& config);

// Analytic per-shot variance used by the generator (ground truth for tests);
// excludes drift and common-mode contributions.
double ideal_shot_variance(const SimConfig& config, double n_atoms, bool excited);

}  // namespace spinherald
