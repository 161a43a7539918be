#include "spinherald/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinherald/rng.hpp"

namespace spinherald {

namespace substream {
constexpr std::uint64_t kAtoms = 1;
constexpr std::uint64_t kDrift = 2;
constexpr std::uint64_t kCommonMode = 3;
constexpr std::uint64_t kHerald = 4;
constexpr std::uint64_t kPhi = 5;
constexpr std::uint64_t kReferences = 6;
}  // namespace substream

void SimConfig::validate() const {
    if (shots < 0) throw std::invalid_argument("SimConfig: shots must be >= 0");
    if (p_click < 0.0 || p_click > 1.0)
        throw std::invalid_argument("SimConfig: p_click must be in [0,1]");
    if (p_state < 0.0 || p_state > 1.0)
        throw std::invalid_argument("SimConfig: p_state must be in [0,1]");
    if (signal_efficiency < 0.0 || signal_efficiency > 1.0)
        throw std::invalid_argument("SimConfig: signal_efficiency must be in [0,1]");
    if (noise.c_const < 0.0 || noise.c_lin < 0.0 || noise.c_quad < 0.0)
        throw std::invalid_argument("SimConfig: noise coefficients must be >= 0");
    if (atom_number.mean <= 0.0 || atom_number.spread < 0.0)
        throw std::invalid_argument("SimConfig: invalid atom-number model");
    if (atom_number.reuse_multipliers.empty())
        throw std::invalid_argument("SimConfig: reuse_multipliers must be non-empty");
    if (drift.log_sigma < 0.0 || drift.common_mode_sigma < 0.0 ||
        drift.relaxation_shots <= 0.0)
        throw std::invalid_argument("SimConfig: invalid drift model");
    if (window < 2 || window % 2 != 0)
        throw std::invalid_argument("SimConfig: window M must be even and >= 2");
}

double ideal_shot_variance(const SimConfig& config, double n_atoms, bool excited) {
    const double base = config.noise.c_const + config.noise.c_lin * n_atoms +
                        config.noise.c_quad * n_atoms * n_atoms;
    if (!excited) return base;
    // An excited shot triples the projection-noise term at unit efficiency:
    // var goes from N to 3N units, i.e. adds 2 eta c_lin N.
    return base + 2.0 * config.signal_efficiency * config.noise.c_lin * n_atoms;
}

Dataset simulate_run(const SimConfig& config) {
    config.validate();
    Dataset ds;
    ds.seed = config.seed;
    ds.records.resize(config.shots);

    // The log-variance drift is a discrete Ornstein-Uhlenbeck walk. Its
    // innovations come from counter-based streams, so the serial accumulation
    // below is reproducible independent of how records are later consumed.
    const double rho = std::exp(-1.0 / config.drift.relaxation_shots);
    const double innovation =
        config.drift.log_sigma * std::sqrt(1.0 - rho * rho);
    double log_drift = 0.0;

    const auto& reuse = config.atom_number.reuse_multipliers;
    const std::size_t reuse_len = reuse.size();

    for (std::int64_t i = 0; i < config.shots; ++i) {
        MeasurementRecord& rec = ds.records[i];
        rec.index = i;

        // Atom number: one lognormal draw per MOT load, decayed by reuse.
        const std::int64_t load = i / static_cast<std::int64_t>(reuse_len);
        RandomStream atoms(config.seed, load, substream::kAtoms);
        const double s = config.atom_number.spread;
        const double load_atoms =
            config.atom_number.mean * std::exp(s * atoms.gaussian() - 0.5 * s * s);
        const double n_atoms = load_atoms * reuse[i % reuse_len];
        rec.n_atoms = std::max<std::int64_t>(1, std::llround(n_atoms));

        RandomStream drift_stream(config.seed, i, substream::kDrift);
        if (config.drift.log_sigma > 0.0)
            log_drift = rho * log_drift + innovation * drift_stream.gaussian();
        const double drift_factor = std::exp(log_drift);

        RandomStream herald(config.seed, i, substream::kHerald);
        rec.click = herald.uniform() < config.p_click;
        rec.excitation_present = rec.click && herald.uniform() < config.p_state;

        RandomStream cm(config.seed, i, substream::kCommonMode);
        const double common_mode =
            config.drift.common_mode_sigma > 0.0
                ? config.drift.common_mode_sigma * cm.gaussian()
                : 0.0;

        const double var_probe = drift_factor * ideal_shot_variance(
            config, static_cast<double>(rec.n_atoms), rec.excitation_present);
        RandomStream phi(config.seed, i, substream::kPhi);
        rec.phi_raw = common_mode + std::sqrt(var_probe) * phi.gaussian();

        // References are independently prepared ensembles: fresh projection
        // and shot noise, but the same slowly varying common-mode term.
        const double var_ref = drift_factor * ideal_shot_variance(
            config, static_cast<double>(rec.n_atoms), false);
        RandomStream refs(config.seed, i, substream::kReferences);
        for (auto& r : rec.references)
            r = common_mode + std::sqrt(var_ref) * refs.gaussian();
    }
    return ds;
}

}  // namespace spinherald
