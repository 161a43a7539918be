#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "spinherald/analysis.hpp"
#include "spinherald/rng.hpp"
#include "spinherald/simulate.hpp"

using namespace spinherald;

namespace {

// Synthetic records: phi = signal + common mode, refs = own noise + the same
// common mode.
std::vector<MeasurementRecord> synthetic_records(std::int64_t count,
                                                 double sigma_signal,
                                                 double sigma_ref,
                                                 double sigma_common,
                                                 std::uint64_t seed) {
    std::vector<MeasurementRecord> recs(count);
    for (std::int64_t i = 0; i < count; ++i) {
        RandomStream rng(seed, i, 0);
        const double c = sigma_common * rng.gaussian();
        recs[i].index = i;
        recs[i].phi_raw = sigma_signal * rng.gaussian() + c;
        for (auto& r : recs[i].references) r = sigma_ref * rng.gaussian() + c;
        recs[i].n_atoms = 1000;
    }
    return recs;
}

}  // namespace

TEST_CASE("decorrelation against the closed-form Wiener optimum") {
    const double ss = 1.0, sr = 1.0, sc = 3.0;
    const auto recs = synthetic_records(20000, ss, sr, sc, 7);
    const auto res = decorrelate(recs);

    // Optimal residual variance: var(s) + sc^2 sr^2 / (12 sc^2 + sr^2).
    const double optimum =
        ss * ss + sc * sc * sr * sr / (12.0 * sc * sc + sr * sr);
    CHECK(res.variance_after <= res.variance_before);
    CHECK(res.variance_after == doctest::Approx(optimum).epsilon(0.02));
    // Strong common mode pushes the weights toward 1/12 each.
    CHECK(res.weights.sum_sq == doctest::Approx(1.0 / 12.0).epsilon(0.15));
}

TEST_CASE("independent references give weights consistent with zero") {
    const auto recs = synthetic_records(20000, 1.0, 1.0, 0.0, 11);
    const auto res = decorrelate(recs);
    for (int j = 0; j < 12; ++j)
        CHECK(std::abs(res.weights.weights[j]) < 3.0 * res.weights.std_errors[j]);

    SUBCASE("decorrelating twice changes nothing further") {
        auto once = recs;
        for (size_t i = 0; i < once.size(); ++i) once[i].phi_raw = res.phi[i];
        const auto res2 = decorrelate(once);
        for (int j = 0; j < 12; ++j)
            CHECK(std::abs(res2.weights.weights[j]) < 3.0 * res2.weights.std_errors[j]);
    }
}

TEST_CASE("degenerate reference covariance falls back to minimum norm") {
    auto recs = synthetic_records(1000, 1.0, 1.0, 0.0, 13);
    for (auto& rec : recs) {
        // All references identical: covariance has rank one.
        for (int j = 1; j < 12; ++j) rec.references[j] = rec.references[0];
    }
    const auto res = decorrelate(recs);
    CHECK(res.weights.degenerate);
    CHECK(res.variance_after <= res.variance_before + 1e-12);
}

TEST_CASE("local normalization") {
    SUBCASE("iid unit gaussians normalize to variance about one") {
        std::vector<double> phi(20000);
        RandomStream rng(5, 0, 0);
        for (auto& x : phi) x = rng.gaussian();
        const auto series = local_normalize(phi, 200);
        std::vector<double> z;
        for (size_t i = 0; i < phi.size(); ++i)
            if (series.valid[i]) z.push_back(series.z_values[i]);
        const auto rep = variance_report(z);
        CHECK(rep.w == doctest::Approx(1.0).epsilon(0.03));
        // Edges are truncated, M/2 on each side.
        CHECK(z.size() == phi.size() - 200);
    }
    SUBCASE("constant series is entirely invalid") {
        std::vector<double> phi(500, 1.25);
        const auto series = local_normalize(phi, 10);
        for (bool v : series.valid) CHECK_FALSE(v);
    }
    SUBCASE("variance step stays normalized away from the transition") {
        std::vector<double> phi(30000);
        RandomStream rng(6, 0, 0);
        for (size_t i = 0; i < phi.size(); ++i)
            phi[i] = (i < phi.size() / 2 ? 1.0 : 2.0) * rng.gaussian();
        const int M = 200;
        const auto series = local_normalize(phi, M);
        std::vector<double> z_far;
        for (size_t i = 0; i < phi.size(); ++i) {
            if (!series.valid[i]) continue;
            if (std::llabs(static_cast<long long>(i) -
                           static_cast<long long>(phi.size() / 2)) < M)
                continue;
            z_far.push_back(series.z_values[i]);
        }
        CHECK(variance_report(z_far).w == doctest::Approx(1.0).epsilon(0.03));
    }
    SUBCASE("window validation") {
        std::vector<double> phi(10, 0.0);
        CHECK_THROWS_AS(local_normalize(phi, 3), std::invalid_argument);
        CHECK_THROWS_AS(local_normalize(phi, 10), std::invalid_argument);
    }
}

TEST_CASE("variance report arithmetic") {
    const auto rep = variance_report({-1.0, 0.0, 1.0});
    CHECK(rep.w == doctest::Approx(1.0));
    CHECK(rep.uncertainty == doctest::Approx(1.0));
    CHECK(rep.sample_count == 3);
    CHECK_THROWS_AS(variance_report({1.0}), std::invalid_argument);
}

TEST_CASE("variance estimator MSE and the Z_i correction factor") {
    CHECK(estimator_mse_check(200) == doctest::Approx(0.1003).epsilon(1e-3));
    CHECK(estimator_mse_check(3) == doctest::Approx(1.0));
    CHECK(estimator_mse_check(2000000) < 1e-2);
    CHECK_THROWS_AS(estimator_mse_check(1), std::invalid_argument);

    CHECK(zi_variance_correction(200) == doctest::Approx(1.00249).epsilon(1e-5));
    CHECK(zi_variance_correction(1) == doctest::Approx(1.25));
    CHECK(zi_variance_correction(2000000) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("bootstrap variance") {
    SUBCASE("constant data has zero spread") {
        const std::vector<double> z(200, 2.5);
        CHECK(bootstrap_variance(z, 200, 3).uncertainty == doctest::Approx(0.0));
    }
    SUBCASE("iid gaussian matches the analytic uncertainty") {
        std::vector<double> z(1000);
        RandomStream rng(21, 0, 0);
        for (auto& x : z) x = rng.gaussian();
        const auto analytic = variance_report(z);
        const auto boot = bootstrap_variance(z, 800, 4);
        CHECK(boot.w == doctest::Approx(analytic.w));
        CHECK(boot.uncertainty ==
              doctest::Approx(analytic.uncertainty).epsilon(0.15));
        CHECK(boot.method == VarianceMethod::bootstrap);
    }
    SUBCASE("seeded and reproducible") {
        std::vector<double> z(300);
        RandomStream rng(22, 0, 0);
        for (auto& x : z) x = rng.gaussian();
        CHECK(bootstrap_variance(z, 150, 9).uncertainty ==
              bootstrap_variance(z, 150, 9).uncertainty);
    }
    SUBCASE("resample floor") {
        CHECK_THROWS_AS(bootstrap_variance({1.0, 2.0}, 10, 0), std::invalid_argument);
    }
}

TEST_CASE("noise-scaling fit recovers generator coefficients") {
    SimConfig cfg;
    cfg.shots = 100000;
    cfg.atom_number.mean = 2.5e5;
    cfg.atom_number.spread = 0.6;
    cfg.atom_number.reuse_multipliers = {1.0, 0.55, 0.3, 0.15};
    cfg.noise = {0.5, 4.0e-6, 7.0e-12};
    cfg.drift = {0.0, 5000.0, 0.0};
    cfg.p_click = 0.0;
    cfg.seed = 31;
    const auto ds = simulate_run(cfg);

    std::vector<double> n(ds.records.size()), phi(ds.records.size());
    for (size_t i = 0; i < ds.records.size(); ++i) {
        n[i] = static_cast<double>(ds.records[i].n_atoms);
        phi[i] = ds.records[i].phi_raw;
    }
    const auto fit = noise_scaling_fit(n, phi, 10);
    CHECK(fit.c_const == doctest::Approx(0.5).epsilon(0.05));
    CHECK(fit.c_lin == doctest::Approx(4.0e-6).epsilon(0.05));
    CHECK(fit.c_quad == doctest::Approx(7.0e-12).epsilon(0.05));
    CHECK(fit.r_squared > 0.99);
    CHECK_FALSE(fit.ill_conditioned);

    SUBCASE("pure shot noise leaves the higher orders consistent with zero") {
        SimConfig flat = cfg;
        flat.noise = {0.8, 0.0, 0.0};
        flat.seed = 32;
        const auto fds = simulate_run(flat);
        std::vector<double> fn(fds.records.size()), fphi(fds.records.size());
        for (size_t i = 0; i < fds.records.size(); ++i) {
            fn[i] = static_cast<double>(fds.records[i].n_atoms);
            fphi[i] = fds.records[i].phi_raw;
        }
        const auto ffit = noise_scaling_fit(fn, fphi, 10);
        CHECK(ffit.c_const == doctest::Approx(0.8).epsilon(0.02));
        CHECK(ffit.c_lin <= 2.0 * std::max(ffit.se_lin, 1e-12));
        CHECK(ffit.c_quad <= 2.0 * std::max(ffit.se_quad, 1e-18));
    }
}

TEST_CASE("full pipeline on a small simulated dataset") {
    SimConfig cfg;
    cfg.shots = 20000;
    cfg.atom_number.mean = 3.0e5;
    cfg.atom_number.spread = 0.05;
    cfg.noise = {0.39, 3.3333e-6, 4.3333e-12};
    cfg.drift = {0.15, 5000.0, 3.0};
    cfg.p_click = 0.02;  // more clicks than the published rate, for test statistics
    cfg.p_state = 0.38;
    cfg.signal_efficiency = 0.5355;
    cfg.seed = 77;
    const auto ds = simulate_run(cfg);
    const auto rep = analyze_dataset(ds.records, 200, 200, 1, 8);

    CHECK(rep.n_records == 20000);
    CHECK(rep.n_valid == 20000 - 200);
    CHECK(rep.no_click.w == doctest::Approx(1.0).epsilon(0.03));
    CHECK(rep.click.w > rep.no_click.w);
    CHECK(rep.weights.sum_sq == doctest::Approx(0.09).epsilon(0.5));
    CHECK(rep.zi_correction == doctest::Approx(1.00249).epsilon(1e-4));
}
