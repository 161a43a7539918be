#include "spinherald/herald.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinherald {

void HeraldParams::validate() const {
    if (p0 < 0.0 || p0 >= 1.0)
        throw std::invalid_argument("HeraldParams: p0 must be in [0,1)");
    if (p2 < 0.0 || p2 >= 1.0)
        throw std::invalid_argument("HeraldParams: p2 must be in [0,1)");
    if (pd <= 0.0 || pd > 1.0)
        throw std::invalid_argument("HeraldParams: pd must be in (0,1]");
    if (pf < 0.0 || pf >= 1.0)
        throw std::invalid_argument("HeraldParams: pf must be in [0,1)");
}

void PurityBudget::validate() const {
    if (p_click < 0.0 || p_dark < 0.0 || p_exct < 0.0 || p_decay < 0.0)
        throw std::invalid_argument("PurityBudget: probabilities must be >= 0");
    if (p_dark + p_exct + p_decay > p_click + 1e-12)
        throw std::invalid_argument(
            "PurityBudget: error terms must not exceed p_click");
}

double ClickPosterior::mean_excitation() const {
    double mass = 0.0, mean = 0.0;
    for (size_t n = 0; n < probabilities.size(); ++n) {
        mass += probabilities[n];
        mean += n * probabilities[n];
    }
    return mean / mass;
}

double thermal_pmf(double p0, int n) {
    if (p0 < 0.0 || p0 >= 1.0)
        throw std::invalid_argument("thermal_pmf: p0 must be in [0,1)");
    if (n < 0) return 0.0;
    return (1.0 - p0) * std::pow(p0, n);
}

double poisson_pmf(double pf, int n) {
    if (pf < 0.0) throw std::invalid_argument("poisson_pmf: mean must be >= 0");
    if (n < 0) return 0.0;
    if (pf == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(pf) - pf - std::lgamma(n + 1.0));
}

double thinned_thermal_click_pmf(double p2, double pd, int n) {
    if (n < 0) return 0.0;
    const double ptd = 1.0 - pd;
    return (1.0 - p2) * std::pow(p2 * pd, n) / std::pow(1.0 - p2 * ptd, n + 1);
}

namespace {

// Probability of exactly k false-positive clicks (k = 0 or 1), combining the
// Poisson dark/leakage counts with the thinned unwanted-channel photons.
double false_positive_pmf(const HeraldParams& p, int k) {
    const double de0 = poisson_pmf(p.pf, 0), de1 = poisson_pmf(p.pf, 1);
    const double ds0 = thinned_thermal_click_pmf(p.p2, p.pd, 0);
    const double ds1 = thinned_thermal_click_pmf(p.p2, p.pd, 1);
    if (k == 0) return de0 * ds0;
    return de1 * ds0 + de0 * ds1;
}

}  // namespace

double p_one_click_given_n(const HeraldParams& params, int n) {
    params.validate();
    const double ptd = 1.0 - params.pd;
    const double pF0 = false_positive_pmf(params, 0);
    const double pF1 = false_positive_pmf(params, 1);
    const double direct =
        (n >= 1) ? n * params.pd * std::pow(ptd, n - 1) * pF0 : 0.0;
    return direct + std::pow(ptd, n) * pF1;
}

double p_one_click(const HeraldParams& params) {
    params.validate();
    // sum_n thermal(p0, n) * p(1click | n), summed in closed form.
    const double ptd = 1.0 - params.pd;
    const double pF0 = false_positive_pmf(params, 0);
    const double pF1 = false_positive_pmf(params, 1);
    const double g = params.p0 * ptd;  // thermal ratio after thinning
    const double one_m = 1.0 - params.p0;
    return pF0 * params.pd * params.p0 * one_m / ((1.0 - g) * (1.0 - g)) +
           pF1 * one_m / (1.0 - g);
}

ClickPosterior click_posterior(const HeraldParams& params, int n_max) {
    params.validate();
    if (n_max < 2) throw std::invalid_argument("click_posterior: n_max must be >= 2");
    const double denom = p_one_click(params);
    if (denom <= 0.0)
        throw std::invalid_argument(
            "click_posterior: p(one click) vanishes for these parameters");

    ClickPosterior post;
    post.p_one_click = denom;
    post.probabilities.resize(n_max + 1);
    const double ptd = 1.0 - params.pd;
    // Closed form: p(n|1click) = (ptd p0)^n (1 - ptd p0)
    //   (n pd/ptd + pf + pd p2/(1 - ptd p2)) / D
    // with D = pf + pd p2/(1 - ptd p2) + pd p0/(1 - ptd p0). The leading
    // term is expanded as n pd p0^n ptd^(n-1) so that pd = 1 stays finite.
    const double g = ptd * params.p0;
    const double u2 = params.pd * params.p2 / (1.0 - ptd * params.p2);
    const double D = params.pf + u2 + params.pd * params.p0 / (1.0 - g);
    double mass = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double direct =
            (n >= 1) ? n * params.pd * std::pow(params.p0, n) * std::pow(ptd, n - 1)
                     : 0.0;
        const double p = (1.0 - g) * (direct + std::pow(g, n) * (params.pf + u2)) / D;
        post.probabilities[n] = p;
        mass += p;
    }
    post.truncation_mass = std::max(0.0, 1.0 - mass);
    return post;
}

ClickPosterior posterior_bruteforce(const HeraldParams& params, int n_max,
                                    int k_max) {
    params.validate();
    if (n_max < 2)
        throw std::invalid_argument("posterior_bruteforce: n_max must be >= 2");

    const double ptd = 1.0 - params.pd;

    // p(exactly one click | n desired photons), by enumeration: d detected
    // desired photons, k2 generated unwanted photons with d2 detected, f
    // Poisson false counts; exactly-one-click means d + d2 + f = 1.
    auto one_click_given = [&](int n) {
        double total = 0.0;
        for (int d = 0; d <= std::min(n, 1); ++d) {
            double p_d;  // Binomial(n, d; pd), d in {0, 1}
            if (d == 0)
                p_d = std::pow(ptd, n);
            else
                p_d = n * params.pd * std::pow(ptd, n - 1);
            for (int k2 = 0; k2 <= k_max; ++k2) {
                const double p_k2 = thermal_pmf(params.p2, k2);
                if (p_k2 < 1e-300) break;
                for (int d2 = 0; d2 <= std::min(k2, 1 - d); ++d2) {
                    double p_d2;
                    if (d2 == 0)
                        p_d2 = std::pow(ptd, k2);
                    else
                        p_d2 = k2 * params.pd * std::pow(ptd, k2 - 1);
                    const double p_f = poisson_pmf(params.pf, 1 - d - d2);
                    total += p_d * p_k2 * p_d2 * p_f;
                }
            }
        }
        return total;
    };

    // Enumerate desired-photon numbers until the thermal tail is negligible.
    int n_big = n_max;
    if (params.p0 > 0.0)
        n_big = std::max(n_max, static_cast<int>(std::ceil(
                                    std::log(1e-16) / std::log(params.p0))));
    n_big = std::min(n_big, k_max);

    std::vector<double> joint(n_big + 1);
    double denom = 0.0;
    for (int n = 0; n <= n_big; ++n) {
        joint[n] = thermal_pmf(params.p0, n) * one_click_given(n);
        denom += joint[n];
    }
    if (denom <= 0.0)
        throw std::invalid_argument(
            "posterior_bruteforce: p(one click) vanishes for these parameters");

    ClickPosterior post;
    post.p_one_click = denom;
    post.probabilities.resize(n_max + 1);
    double mass = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        post.probabilities[n] = joint[n] / denom;
        mass += post.probabilities[n];
    }
    post.truncation_mass = std::max(0.0, 1.0 - mass);
    return post;
}

double purity(const PurityBudget& budget) {
    budget.validate();
    if (budget.p_click <= 0.0)
        throw std::invalid_argument("purity: p_click must be > 0");
    return 1.0 - (budget.p_dark + budget.p_decay + budget.p_exct) / budget.p_click;
}

double multi_excitation_inflation(const ClickPosterior& post, double eta) {
    const auto& p = post.probabilities;
    if (p.size() < 3)
        throw std::invalid_argument("multi_excitation_inflation: posterior too short");
    double mass = 0.0, mean = 0.0;
    for (size_t n = 0; n < p.size(); ++n) {
        mass += p[n];
        mean += n * p[n];
    }
    const double full = 1.0 + 2.0 * eta * mean / mass;
    const double p1_trunc = p[1] / (p[0] + p[1]);
    const double trunc = 1.0 + 2.0 * eta * p1_trunc;
    return full / trunc - 1.0;
}

double two_excitation_coherent_ratio(const ClickPosterior& post) {
    const double mean = post.mean_excitation();
    const double coherent_p2 = poisson_pmf(mean, 2);
    return post.probabilities.at(2) / coherent_p2;
}

}  // namespace spinherald
