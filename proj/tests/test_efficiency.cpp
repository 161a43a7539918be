#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <nlohmann/json.hpp>

#include "spinherald/config.hpp"
#include "spinherald/efficiency.hpp"

using namespace spinherald;

TEST_CASE("optical phase shift") {
    CHECK(optical_phase_shift(0.0, {{1.0, 1.0, 1.0}}) == doctest::Approx(0.0));

    SUBCASE("dispersive tail vanishes far from resonance") {
        const TransitionLine far{1e6, 1.0, 1.0};
        CHECK(std::abs(optical_phase_shift(31.0, {far})) < 1e-5);
    }
    SUBCASE("linear in alpha0, odd in detuning") {
        const TransitionLine line{3.0, 0.8, 1.5};
        const double chi1 = optical_phase_shift(10.0, {line});
        CHECK(optical_phase_shift(20.0, {line}) == doctest::Approx(2.0 * chi1));
        const TransitionLine neg{-3.0, 0.8, 1.5};
        CHECK(optical_phase_shift(10.0, {neg}) == doctest::Approx(-chi1));
    }
    SUBCASE("default transition table gives the 42 degree shift") {
        const auto cfg = parse_config(nlohmann::json::object());
        const double chi = optical_phase_shift(cfg.efficiency.alpha0, cfg.efficiency.lines);
        CHECK(chi * 180.0 / M_PI == doctest::Approx(42.0).epsilon(0.012));
    }
}

TEST_CASE("phase-mismatch efficiency sinc^2(chi/2)") {
    CHECK(eta_phase(0.0) == doctest::Approx(1.0));
    CHECK(std::abs(eta_phase(42.0 * M_PI / 180.0) - 0.956) < 1e-3);
    CHECK(eta_phase(2.0 * M_PI) == doctest::Approx(0.0));

    // Even in chi, below one away from zero.
    for (double chi : {0.3, 1.1, 2.9}) {
        CHECK(eta_phase(chi) == doctest::Approx(eta_phase(-chi)));
        CHECK(eta_phase(chi) < 1.0);
    }
}

TEST_CASE("ac-Stark dephasing efficiency") {
    BeamGeometry g;
    g.waist = 30.0;
    g.pulse_duration = 2.5;
    g.sigma_x = g.sigma_z = 15.0;

    SUBCASE("no shift, no dephasing") {
        g.stark_shift_peak = 0.0;
        CHECK(eta_ac_stark(g) == doctest::Approx(1.0));
    }
    SUBCASE("uniform intensity is only a global phase") {
        g.stark_shift_peak = 2.0;
        g.waist = 3.0e4;  // much wider than the ensemble
        CHECK(eta_ac_stark(g) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("monotone in the pulse area") {
        double prev = 1.0;
        for (double shift : {0.2, 0.5, 1.0, 2.0, 4.0}) {
            g.stark_shift_peak = shift;
            const double eta = eta_ac_stark(g);
            CHECK(eta < prev);
            prev = eta;
        }
    }
    SUBCASE("default geometry reproduces the 97% figure") {
        const auto cfg = parse_config(nlohmann::json::object());
        CHECK(eta_ac_stark(cfg.efficiency.geometry) == doctest::Approx(0.97).epsilon(0.011));
    }
}

TEST_CASE("scattering-fraction calibration") {
    const std::vector<ScatterChannel> channels = {
        {"a", 0.25, false}, {"b", 0.35, true}, {"c", 0.15, true}, {"d", 0.25, false}};

    CHECK(scatter_fraction_from_calibration(1e5, 0.0, channels) == doctest::Approx(0.0));
    // Default calibration counts reproduce 1 - eta_scatter = 0.23.
    CHECK(scatter_fraction_from_calibration(1e5, 1.15e4, channels) ==
          doctest::Approx(0.23));

    SUBCASE("hand-computed inversion, uniform branching") {
        // Three channels of 1/3 each, two detectable; half the atoms scatter,
        // so the no-repump count is 0.5 * 2/3 of the total.
        const std::vector<ScatterChannel> uniform = {
            {"x", 1.0 / 3.0, true}, {"y", 1.0 / 3.0, true}, {"z", 1.0 / 3.0, false}};
        const double ratio = 0.5 * 2.0 / 3.0;
        CHECK(scatter_fraction_from_calibration(1.0, ratio, uniform) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("inconsistent inputs are rejected") {
        CHECK_THROWS_AS(scatter_fraction_from_calibration(1.0, 2.0, channels),
                        std::invalid_argument);
        CHECK_THROWS_AS(scatter_fraction_from_calibration(1.0, 0.9, channels),
                        std::invalid_argument);  // ratio exceeds detectable share
        std::vector<ScatterChannel> bad = channels;
        bad[0].fraction = 0.5;
        CHECK_THROWS_AS(scatter_fraction_from_calibration(1.0, 0.1, bad),
                        std::invalid_argument);
    }
}

TEST_CASE("total efficiency") {
    EfficiencyChain chain{0.50, 0.75, 0.95, 0.97, 0.77};
    const double eta = total_efficiency(chain);
    CHECK(eta == doctest::Approx(0.266).epsilon(2e-3));
    CHECK(std::abs(eta - 0.27) < 0.01);

    CHECK(total_efficiency({1, 1, 1, 1, 1}) == doctest::Approx(1.0));
    CHECK(total_efficiency({0.5, 0.0, 0.95, 0.97, 0.77}) == doctest::Approx(0.0));

    SUBCASE("monotone in each factor") {
        EfficiencyChain up = chain;
        up.eta_mm = 0.8;
        CHECK(total_efficiency(up) > eta);
        EfficiencyChain down = chain;
        down.eta_scatter = 0.7;
        CHECK(total_efficiency(down) < eta);
    }
    SUBCASE("chain from the default config") {
        const auto cfg = parse_config(nlohmann::json::object());
        const auto c = cfg.efficiency.chain();
        CHECK(std::abs(total_efficiency(c) - 0.27) < 0.01);
        CHECK(c.eta_inhom() == doctest::Approx(c.eta_phase * c.eta_ac_stark));
    }
}
