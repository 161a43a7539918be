#pragma once

// Detection-efficiency chain: dispersive phase mismatch, ac-Stark
// dephasing, scattering-fraction calibration, and the total eta_Q product.

#include <string>
#include <vector>

namespace spinherald {

struct TransitionLine {
    double detuning = 0.0;   // Delta_i, same frequency unit as linewidth
    double strength = 0.0;   // relative strength, >= 0
    double linewidth = 1.0;  // Gamma, > 0
};

struct BeamGeometry {
    double waist = 1.0;             // 1/e^2 intensity radius of the beam
    double pulse_duration = 1.0;    // tau
    double stark_shift_peak = 0.0;  // peak light shift (angular frequency)
    double sigma_x = 1.0;           // column-density Gaussian widths
    double sigma_z = 1.0;

    void validate() const;
};

struct ScatterChannel {
    std::string name;
    double fraction = 0.0;  // branching fraction of the decay
    bool detected = false;  // measured in the no-repump calibration
};

struct EfficiencyChain {
    double eta_noise = 1.0;
    double eta_mm = 1.0;
    double eta_phase = 1.0;
    double eta_ac_stark = 1.0;
    double eta_scatter = 1.0;

    double eta_inhom() const { return eta_phase * eta_ac_stark; }
    void validate() const;
};

// Dispersive phase shift (alpha0/4) sum_i strength_i * Delta_i /
// (Delta_i^2 + (Gamma_i/2)^2), in radians.
double optical_phase_shift(double alpha0, const std::vector<TransitionLine>& lines);

// Interference visibility under a linear phase gradient: sinc^2(chi/2).
double eta_phase(double chi);

// Time-averaged squared overlap between the dephased and the original spin
// wave for a Gaussian beam and Gaussian column density; adaptive 2-D
// Gauss-Legendre grid, converged to rel_tol (throws if refinement stalls).
double eta_ac_stark(const BeamGeometry& geom, double rel_tol = 1e-4);

// Fraction of atoms that scattered a photon, inverted from the
// with/without-repump atom counts and the branching table.
double scatter_fraction_from_calibration(double n_with_repump,
                                         double n_without_repump,
                                         const std::vector<ScatterChannel>& channels);

// eta_Q = eta_noise * eta_mm * eta_phase * eta_ac_stark * eta_scatter.
double total_efficiency(const EfficiencyChain& chain);

}  // namespace spinherald
