#pragma once

// Statistical pipeline: reference decorrelation, local noise normalization,
// variance estimation with analytic and bootstrap uncertainties, and the
// noise-scaling decomposition fit.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spinherald/simulate.hpp"

namespace spinherald {

struct WeightVector {
    std::array<double, 12> weights{};     // w_j, j = -6..-1, 1..6
    std::array<double, 12> std_errors{};  // OLS standard errors
    double sum_sq = 0.0;                  // sum w_j^2
    bool degenerate = false;              // minimum-norm fallback used
};

struct DecorrelationResult {
    std::vector<double> phi;  // phi_i = phi_raw_i - sum_j w_j ref_ij
    WeightVector weights;
    double variance_before = 0.0;
    double variance_after = 0.0;
};

struct NormalizedSeries {
    std::vector<double> y_values;  // local variance Y_i (0 where undefined)
    std::vector<double> z_values;  // Z_i = phi_i / sqrt(Y_i)
    std::vector<bool> valid;       // false at truncated edges or Y_i == 0
    int window = 0;
};

enum class VarianceMethod { analytic, bootstrap };

struct VarianceReport {
    double w = 0.0;            // W_L
    double uncertainty = 0.0;  // delta W_L
    std::int64_t sample_count = 0;
    VarianceMethod method = VarianceMethod::analytic;
};

struct ScalingFit {
    double c_const = 0.0, c_lin = 0.0, c_quad = 0.0;
    double se_const = 0.0, se_lin = 0.0, se_quad = 0.0;
    double r_squared = 0.0;
    bool projected = false;        // non-negativity projection applied
    bool ill_conditioned = false;  // design matrix warning
};

// Minimize var({phi_i}) over reference weights via the induced least-squares
// normal equations; singular covariances fall back to the minimum-norm
// pseudo-solution with the degenerate flag set.
DecorrelationResult decorrelate(const std::vector<MeasurementRecord>& records);

// Y_i = sample variance of the window of M+1 values centered on i,
// Z_i = phi_i / sqrt(Y_i). The first and last M/2 samples are marked invalid
// rather than computed on shrunken windows.
NormalizedSeries local_normalize(const std::vector<double>& phi, int window);

// Unbiased sample variance with delta W = sqrt(2/(L-1)) * W.
VarianceReport variance_report(const std::vector<double>& z_values);

// Relative 1-sigma uncertainty of a variance estimate over `count` samples.
double estimator_mse_check(std::int64_t count);

// Second-order correction factor 1 + (1/4)(2/(M+1)) on var(Z_i).
double zi_variance_correction(int window);

VarianceReport bootstrap_variance(const std::vector<double>& z_values,
                                  int resamples, std::uint64_t seed);

// Weighted least-squares fit of var(phi) = c_const + c_lin N + c_quad N^2
// over quantile bins in atom number, with per-bin weights from the variance
// estimator MSE and non-negativity enforced by projection.
ScalingFit noise_scaling_fit(const std::vector<double>& n_atoms,
                             const std::vector<double>& phi, int n_bins = 8);

// Full pipeline report, as emitted by the analyze subcommand.
struct AnalysisReport {
    WeightVector weights;
    VarianceReport no_click;
    VarianceReport click;
    VarianceReport click_bootstrap;
    VarianceReport no_click_bootstrap;
    ScalingFit scaling;
    double zi_correction = 1.0;
    std::int64_t n_records = 0;
    std::int64_t n_clicks = 0;
    std::int64_t n_valid = 0;
    bool analytic_error_reliable = true;  // L >> M or wide click spacing
};

AnalysisReport analyze_dataset(const std::vector<MeasurementRecord>& records,
                               int window, int bootstrap_resamples = 500,
                               std::uint64_t bootstrap_seed = 1, int fit_bins = 8);

}  // namespace spinherald
