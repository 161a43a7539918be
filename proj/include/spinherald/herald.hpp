#pragma once

// Photon-counting statistics of the heralding channel: generation
// distributions, the posterior p(n | one click), the heralding purity
// budget, and the multi-excitation variance correction.

#include <vector>

namespace spinherald {

struct HeraldParams {
    double p0 = 0.0;  // probability of >=1 desired Stokes photon in the mode
    double p2 = 0.0;  // same for the unfilterable decay channel
    double pd = 1.0;  // per-photon detection probability
    double pf = 0.0;  // mean false-positive count (dark + excitation leakage)

    void validate() const;
};

struct ClickPosterior {
    std::vector<double> probabilities;  // index n -> p(n | one click)
    double truncation_mass = 0.0;       // residual mass beyond n_max
    double p_one_click = 0.0;           // normalizing click probability

    double mean_excitation() const;
};

struct PurityBudget {
    double p_click = 0.0;
    double p_dark = 0.0;
    double p_exct = 0.0;
    double p_decay = 0.0;

    void validate() const;
};

// Geometric (thermal single-mode) pmf: (1-p0) p0^n.
double thermal_pmf(double p0, int n);

// Poisson pmf with mean pf.
double poisson_pmf(double pf, int n);

// Click count distribution of a thermal source with per-photon detection
// probability pd: (1-p2)(p2 pd)^n / (1 - p2 (1-pd))^{n+1}.
double thinned_thermal_click_pmf(double p2, double pd, int n);

// Probability of detecting exactly one click given n desired photons.
double p_one_click_given_n(const HeraldParams& params, int n);

// Marginal probability of exactly one click.
double p_one_click(const HeraldParams& params);

// Closed-form Bayesian posterior over the desired-photon number given one
// click, truncated at n_max with the tail mass reported.
ClickPosterior click_posterior(const HeraldParams& params, int n_max);

// Independent oracle: same posterior by explicit enumeration over desired
// photons, unwanted-channel photons, and Poisson false counts.
ClickPosterior posterior_bruteforce(const HeraldParams& params, int n_max,
                                    int k_max = 500);

// Heralding purity 1 - (p_dark + p_decay + p_exct) / p_click.
double purity(const PurityBudget& budget);

// Fractional increase of the normalized variance 1 + 2 eta sum n p_n when
// the n >= 2 tail of the posterior is included, relative to truncating at
// n <= 1 and renormalizing.
double multi_excitation_inflation(const ClickPosterior& post, double eta);

// Weight of the two-excitation component relative to a coherent (Poisson)
// state with the same mean excitation number.
double two_excitation_coherent_ratio(const ClickPosterior& post);

}  // namespace spinherald
