#include "spinherald/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spinherald/rng.hpp"

namespace spinherald {

namespace {

double sample_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_variance(const std::vector<double>& v) {
    const double mu = sample_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return acc / (v.size() - 1);
}

}  // namespace

DecorrelationResult decorrelate(const std::vector<MeasurementRecord>& records) {
    const auto L = static_cast<Eigen::Index>(records.size());
    if (L < 14)
        throw std::invalid_argument("decorrelate: need more records than references");

    Eigen::VectorXd y(L);
    Eigen::MatrixXd X(L, 12);
    for (Eigen::Index i = 0; i < L; ++i) {
        y(i) = records[i].phi_raw;
        for (int j = 0; j < 12; ++j) X(i, j) = records[i].references[j];
    }

    // Minimizing the sample variance of y - X w is least squares on the
    // column-centered data.
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const double y_mean = y.mean();
    Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    Eigen::VectorXd yc = y.array() - y_mean;

    DecorrelationResult res;
    Eigen::MatrixXd gram = Xc.transpose() * Xc;
    Eigen::VectorXd rhs = Xc.transpose() * yc;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd w;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                            Eigen::EigenvaluesOnly);
    const double rcond_probe =
        es.eigenvalues().minCoeff() / std::max(es.eigenvalues().maxCoeff(), 1e-300);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && rcond_probe > 1e-14) {
        w = ldlt.solve(rhs);
    } else {
        // Singular reference covariance: minimum-norm pseudo-solution.
        res.weights.degenerate = true;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-10);
        w = svd.solve(yc);
    }

    res.phi.resize(L);
    Eigen::VectorXd resid = y - X * w;
    for (Eigen::Index i = 0; i < L; ++i) res.phi[i] = resid(i);

    res.variance_before = (yc.array().square().sum()) / (L - 1);
    Eigen::VectorXd resid_c = yc - Xc * w;
    res.variance_after = resid_c.array().square().sum() / (L - 1);

    // OLS standard errors from sigma^2 (X^T X)^-1.
    const double dof = static_cast<double>(L - 13);
    const double sigma2 = resid_c.array().square().sum() / dof;
    Eigen::MatrixXd gram_inv;
    if (!res.weights.degenerate) {
        gram_inv = ldlt.solve(Eigen::MatrixXd::Identity(12, 12));
    } else {
        gram_inv = gram.completeOrthogonalDecomposition().pseudoInverse();
    }
    for (int j = 0; j < 12; ++j) {
        res.weights.weights[j] = w(j);
        res.weights.std_errors[j] = std::sqrt(std::max(0.0, sigma2 * gram_inv(j, j)));
        res.weights.sum_sq += w(j) * w(j);
    }
    return res;
}

NormalizedSeries local_normalize(const std::vector<double>& phi, int window) {
    if (window < 2 || window % 2 != 0)
        throw std::invalid_argument("local_normalize: window must be even and >= 2");
    const auto L = static_cast<std::int64_t>(phi.size());
    if (L <= window)
        throw std::invalid_argument("local_normalize: series shorter than window");

    NormalizedSeries out;
    out.window = window;
    out.y_values.assign(L, 0.0);
    out.z_values.assign(L, 0.0);
    out.valid.assign(L, false);

    const int half = window / 2;
    for (std::int64_t i = half; i + half < L; ++i) {
        // Two-pass variance over the inclusive window [i-M/2, i+M/2].
        double mean = 0.0;
        for (int k = -half; k <= half; ++k) mean += phi[i + k];
        mean /= (window + 1);
        double acc = 0.0;
        for (int k = -half; k <= half; ++k) {
            const double d = phi[i + k] - mean;
            acc += d * d;
        }
        const double y = acc / window;
        out.y_values[i] = y;
        if (y > 0.0) {
            out.z_values[i] = phi[i] / std::sqrt(y);
            out.valid[i] = true;
        }
    }
    return out;
}

VarianceReport variance_report(const std::vector<double>& z_values) {
    if (z_values.size() < 2)
        throw std::invalid_argument("variance_report: need at least 2 samples");
    VarianceReport rep;
    rep.sample_count = static_cast<std::int64_t>(z_values.size());
    rep.w = sample_variance(z_values);
    rep.uncertainty = std::sqrt(2.0 / (rep.sample_count - 1)) * rep.w;
    rep.method = VarianceMethod::analytic;
    return rep;
}

double estimator_mse_check(std::int64_t count) {
    if (count < 2)
        throw std::invalid_argument("estimator_mse_check: count must be >= 2");
    return std::sqrt(2.0 / (count - 1));
}

double zi_variance_correction(int window) {
    if (window < 1)
        throw std::invalid_argument("zi_variance_correction: window must be >= 1");
    return 1.0 + 0.25 * 2.0 / (window + 1);
}

VarianceReport bootstrap_variance(const std::vector<double>& z_values,
                                  int resamples, std::uint64_t seed) {
    if (resamples < 100)
        throw std::invalid_argument("bootstrap_variance: need >= 100 resamples");
    if (z_values.size() < 2)
        throw std::invalid_argument("bootstrap_variance: need at least 2 samples");
    const auto L = z_values.size();
    std::vector<double> resampled(L), variances(resamples);
    for (int r = 0; r < resamples; ++r) {
        RandomStream stream(seed, static_cast<std::uint64_t>(r), 0);
        for (size_t i = 0; i < L; ++i)
            resampled[i] = z_values[stream.next_u64() % L];
        variances[r] = sample_variance(resampled);
    }
    VarianceReport rep;
    rep.sample_count = static_cast<std::int64_t>(L);
    rep.w = sample_variance(z_values);
    rep.uncertainty = std::sqrt(sample_variance(variances));
    rep.method = VarianceMethod::bootstrap;
    return rep;
}

ScalingFit noise_scaling_fit(const std::vector<double>& n_atoms,
                             const std::vector<double>& phi, int n_bins) {
    if (n_atoms.size() != phi.size())
        throw std::invalid_argument("noise_scaling_fit: size mismatch");
    if (n_bins < 4)
        throw std::invalid_argument("noise_scaling_fit: need >= 4 bins");
    const auto L = n_atoms.size();
    if (L < static_cast<size_t>(4 * n_bins))
        throw std::invalid_argument("noise_scaling_fit: too few records for binning");

    // Quantile bins in atom number.
    std::vector<size_t> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return n_atoms[a] < n_atoms[b]; });

    // Per-bin regressors are the in-bin means of N and N^2: because the
    // outcomes are centered, the bin variance estimates E[c0 + c1 N + c2 N^2]
    // over the bin, so using mean(N)^2 instead of mean(N^2) would bias c2.
    std::vector<double> bin_n, bin_n2, bin_var, bin_weight;
    for (int b = 0; b < n_bins; ++b) {
        const size_t lo = L * b / n_bins, hi = L * (b + 1) / n_bins;
        if (hi - lo < 4) continue;
        std::vector<double> vals;
        double n_mean = 0.0, n2_mean = 0.0;
        vals.reserve(hi - lo);
        for (size_t k = lo; k < hi; ++k) {
            vals.push_back(phi[order[k]]);
            n_mean += n_atoms[order[k]];
            n2_mean += n_atoms[order[k]] * n_atoms[order[k]];
        }
        n_mean /= vals.size();
        n2_mean /= vals.size();
        const double v = sample_variance(vals);
        const double dv = estimator_mse_check(vals.size()) * v;
        bin_n.push_back(n_mean);
        bin_n2.push_back(n2_mean);
        bin_var.push_back(v);
        bin_weight.push_back(dv > 0.0 ? 1.0 / (dv * dv) : 0.0);
    }
    const int nb = static_cast<int>(bin_n.size());
    if (nb < 4)
        throw std::invalid_argument("noise_scaling_fit: fewer than 4 usable bins");

    // Scale atom numbers to order unity for conditioning.
    const double scale = *std::max_element(bin_n.begin(), bin_n.end());
    Eigen::MatrixXd A(nb, 3);
    Eigen::VectorXd y(nb), wsq(nb);
    for (int b = 0; b < nb; ++b) {
        A(b, 0) = 1.0;
        A(b, 1) = bin_n[b] / scale;
        A(b, 2) = bin_n2[b] / (scale * scale);
        y(b) = bin_var[b];
        wsq(b) = std::sqrt(bin_weight[b]);
    }

    ScalingFit fit;
    Eigen::MatrixXd Aw = wsq.asDiagonal() * A;
    Eigen::VectorXd yw = wsq.asDiagonal() * y;

    auto solve_subset = [&](const std::vector<int>& cols, Eigen::VectorXd& coef,
                            Eigen::VectorXd& se) {
        Eigen::MatrixXd As(nb, static_cast<Eigen::Index>(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c) As.col(c) = Aw.col(cols[c]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(As,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues()(svd.singularValues().size() - 1) <
            1e-10 * svd.singularValues()(0))
            fit.ill_conditioned = true;
        coef = svd.solve(yw);
        Eigen::MatrixXd cov =
            (As.transpose() * As).completeOrthogonalDecomposition().pseudoInverse();
        se.resize(cols.size());
        for (size_t c = 0; c < cols.size(); ++c) se(c) = std::sqrt(cov(c, c));
    };

    std::vector<int> active = {0, 1, 2};
    Eigen::VectorXd coef, se;
    solve_subset(active, coef, se);
    // Non-negativity by projection: drop negative coefficients and refit.
    for (int pass = 0; pass < 3; ++pass) {
        int worst = -1;
        double worst_val = 0.0;
        for (Eigen::Index c = 0; c < coef.size(); ++c)
            if (coef(c) < worst_val) {
                worst_val = coef(c);
                worst = static_cast<int>(c);
            }
        if (worst < 0) break;
        fit.projected = true;
        active.erase(active.begin() + worst);
        if (active.empty()) break;
        solve_subset(active, coef, se);
    }

    double c[3] = {0.0, 0.0, 0.0}, s[3] = {0.0, 0.0, 0.0};
    for (size_t k = 0; k < active.size(); ++k) {
        c[active[k]] = coef(k);
        s[active[k]] = se(k);
    }
    fit.c_const = c[0];
    fit.c_lin = c[1] / scale;
    fit.c_quad = c[2] / (scale * scale);
    fit.se_const = s[0];
    fit.se_lin = s[1] / scale;
    fit.se_quad = s[2] / (scale * scale);

    double ss_res = 0.0, ss_tot = 0.0;
    const double y_mean = y.mean();
    for (int b = 0; b < nb; ++b) {
        const double pred = c[0] + c[1] * bin_n[b] / scale +
                            c[2] * bin_n2[b] / (scale * scale);
        ss_res += (y(b) - pred) * (y(b) - pred);
        ss_tot += (y(b) - y_mean) * (y(b) - y_mean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (!std::isfinite(ss_res))
        throw std::runtime_error("noise_scaling_fit: non-finite residual");
    return fit;
}

AnalysisReport analyze_dataset(const std::vector<MeasurementRecord>& records,
                               int window, int bootstrap_resamples,
                               std::uint64_t bootstrap_seed, int fit_bins) {
    AnalysisReport report;
    report.n_records = static_cast<std::int64_t>(records.size());

    auto deco = decorrelate(records);
    report.weights = deco.weights;

    const auto series = local_normalize(deco.phi, window);

    std::vector<double> z_click, z_noclick;
    std::vector<std::int64_t> click_positions;
    for (size_t i = 0; i < records.size(); ++i) {
        if (!series.valid[i]) continue;
        ++report.n_valid;
        if (records[i].click) {
            z_click.push_back(series.z_values[i]);
            click_positions.push_back(static_cast<std::int64_t>(i));
        } else {
            z_noclick.push_back(series.z_values[i]);
        }
    }
    report.n_clicks = static_cast<std::int64_t>(z_click.size());

    report.no_click = variance_report(z_noclick);
    report.click = variance_report(z_click);
    report.no_click_bootstrap =
        bootstrap_variance(z_noclick, bootstrap_resamples, bootstrap_seed);
    report.click_bootstrap =
        bootstrap_variance(z_click, bootstrap_resamples, bootstrap_seed + 1);

    // Analytic delta W assumes effectively independent Z_i: require L >> M or
    // click spacing well beyond the window; otherwise the bootstrap numbers
    // are the ones to quote.
    bool wide_spacing = true;
    for (size_t k = 1; k < click_positions.size(); ++k)
        if (click_positions[k] - click_positions[k - 1] < window / 2) {
            wide_spacing = false;
            break;
        }
    report.analytic_error_reliable =
        report.n_clicks > 10 * window || wide_spacing;

    std::vector<double> n_atoms(records.size());
    for (size_t i = 0; i < records.size(); ++i)
        n_atoms[i] = static_cast<double>(records[i].n_atoms);
    report.scaling = noise_scaling_fit(n_atoms, deco.phi, fit_bins);
    report.zi_correction = zi_variance_correction(window);
    return report;
}

}  // namespace spinherald
