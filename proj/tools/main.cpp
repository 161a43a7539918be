// Command line driver: simulate / analyze / reproduce / oracle.
//
// Exit codes: 0 success, 1 validation or I/O error, 2 reproduction-target
// failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "spinherald/analysis.hpp"
#include "spinherald/config.hpp"
#include "spinherald/csv.hpp"
#include "spinherald/dicke.hpp"
#include "spinherald/efficiency.hpp"
#include "spinherald/herald.hpp"
#include "spinherald/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spinherald;

namespace {

json load_user_json(const std::optional<std::string>& path) {
    if (!path) return json::object();
    std::ifstream in(*path);
    if (!in) throw std::invalid_argument("config: cannot open " + *path);
    json j;
    in >> j;
    return j;
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const json& user_config, std::uint64_t seed,
                    const std::optional<std::string>& config_path) {
    json manifest{{"tool_version", kToolVersion},
                  {"subcommand", subcommand},
                  {"seed", seed},
                  {"config_path", config_path.value_or("<defaults>")},
                  {"config_fingerprint", config_fingerprint(user_config)}};
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

json weights_to_json(const WeightVector& w) {
    return json{{"w", w.weights},
                {"std_errors", w.std_errors},
                {"sum_sq", w.sum_sq},
                {"degenerate", w.degenerate}};
}

json report_to_json(const AnalysisReport& rep) {
    auto var_block = [](const VarianceReport& v) {
        return json{{"w", v.w},
                    {"uncertainty", v.uncertainty},
                    {"sample_count", v.sample_count},
                    {"method", v.method == VarianceMethod::analytic ? "analytic"
                                                                     : "bootstrap"}};
    };
    return json{
        {"weights", weights_to_json(rep.weights)},
        {"var_noclick", var_block(rep.no_click)},
        {"var_click", var_block(rep.click)},
        {"bootstrap",
         {{"var_noclick", var_block(rep.no_click_bootstrap)},
          {"var_click", var_block(rep.click_bootstrap)}}},
        {"scaling_fit",
         {{"c_const", rep.scaling.c_const},
          {"c_lin", rep.scaling.c_lin},
          {"c_quad", rep.scaling.c_quad},
          {"se_const", rep.scaling.se_const},
          {"se_lin", rep.scaling.se_lin},
          {"se_quad", rep.scaling.se_quad},
          {"r_squared", rep.scaling.r_squared},
          {"projected", rep.scaling.projected},
          {"ill_conditioned", rep.scaling.ill_conditioned}}},
        {"zi_correction", rep.zi_correction},
        {"counts",
         {{"records", rep.n_records},
          {"valid", rep.n_valid},
          {"clicks", rep.n_clicks}}},
        {"analytic_error_reliable", rep.analytic_error_reliable}};
}

struct Target {
    std::string name;
    double computed;
    double expected;
    double tolerance;
    bool pass() const { return std::abs(computed - expected) <= tolerance; }
};

int cmd_reproduce(const std::optional<std::string>& config_path,
                  const std::optional<std::string>& out_dir, bool as_json,
                  std::optional<std::uint64_t> seed_override,
                  std::optional<std::int64_t> shots_override) {
    const json user = load_user_json(config_path);
    RunConfig cfg = parse_config(user);
    if (seed_override) cfg.sim.seed = *seed_override;
    if (shots_override) cfg.sim.shots = *shots_override;

    std::vector<Target> targets;

    // Click posterior against the published values.
    const auto post = click_posterior(cfg.herald.params(), cfg.herald.n_max);
    targets.push_back({"posterior p(0|1click)", post.probabilities[0], 0.606, 0.02});
    targets.push_back({"posterior p(1|1click)", post.probabilities[1], 0.385, 0.02});
    targets.push_back({"posterior p(2|1click)", post.probabilities[2], 0.009, 0.02});
    const auto brute = posterior_bruteforce(cfg.herald.params(), cfg.herald.n_max,
                                            cfg.herald.k_max);
    double max_dev = 0.0;
    for (int n = 0; n <= cfg.herald.n_max; ++n)
        max_dev = std::max(max_dev, std::abs(post.probabilities[n] -
                                             brute.probabilities[n]));
    targets.push_back({"posterior closed form vs brute force", max_dev, 0.0, 1e-10});
    targets.push_back(
        {"p(1click) vs observed p_click",
         post.p_one_click / cfg.herald.p_click, 1.0, 0.03});

    // Purity budget.
    targets.push_back({"purity p_state", purity(cfg.herald.budget()), 0.38, 1e-12});

    // Efficiency chain.
    const auto chain = cfg.efficiency.chain();
    const double chi = optical_phase_shift(cfg.efficiency.alpha0, cfg.efficiency.lines);
    targets.push_back({"excitation-beam phase shift (deg)", chi * 180.0 / M_PI, 42.0, 0.5});
    targets.push_back({"eta_phase", chain.eta_phase, 0.956, 1e-3});
    targets.push_back({"eta_ac_stark", chain.eta_ac_stark, 0.97, 0.01});
    targets.push_back({"eta_scatter", chain.eta_scatter, 0.77, 0.01});
    targets.push_back({"eta_Q", total_efficiency(chain), 0.266, 0.01});

    // Dicke-state variance and the Eq.-(7) mixture prediction.
    const auto dist = rotated_dicke_distribution({10, 1}, M_PI / 2.0);
    targets.push_back({"rotated Dicke var (N=10, n=1)", jz_variance(dist), 28.0, 1e-9});
    MixtureSpec mix;
    mix.n_atoms = 1;
    mix.weights = {{0, 1.0 - cfg.sim.p_state}, {1, cfg.sim.p_state}};
    mix.detection_efficiency = total_efficiency(chain);
    const double predicted = mixture_variance(mix);
    targets.push_back({"mixture variance prediction", predicted, 1.20, 0.01});

    // End-to-end: simulate and run the full pipeline.
    const auto dataset = simulate_run(cfg.sim);
    const auto rep = analyze_dataset(dataset.records, cfg.analysis.window,
                                     cfg.analysis.bootstrap_resamples,
                                     cfg.analysis.bootstrap_seed,
                                     cfg.analysis.fit_bins);
    targets.push_back({"var(Z no click)", rep.no_click.w, 1.00, 0.02});
    targets.push_back({"var(Z click)", rep.click.w, predicted,
                       2.0 * rep.click.uncertainty});
    targets.push_back({"reference weight load sum w_j^2", rep.weights.sum_sq, 0.09, 0.04});

    bool all_pass = true;
    json jtargets = json::array();
    for (const auto& t : targets) {
        all_pass = all_pass && t.pass();
        jtargets.push_back({{"name", t.name},
                            {"computed", t.computed},
                            {"expected", t.expected},
                            {"tolerance", t.tolerance},
                            {"pass", t.pass()}});
        if (!as_json) {
            std::printf("%-40s %12.6g  target %8.4g  tol %8.3g  %s\n",
                        t.name.c_str(), t.computed, t.expected, t.tolerance,
                        t.pass() ? "PASS" : "FAIL");
        }
    }
    json out{{"targets", jtargets},
             {"all_pass", all_pass},
             {"clicks", rep.n_clicks},
             {"tool_version", kToolVersion}};
    if (as_json) std::cout << out.dump(2) << '\n';
    if (out_dir) {
        fs::create_directories(*out_dir);
        write_manifest(*out_dir, "reproduce", user, cfg.sim.seed, config_path);
        std::ofstream f(fs::path(*out_dir) / "reproduce.json");
        f << out.dump(2) << '\n';
    }
    return all_pass ? 0 : 2;
}

int cmd_oracle(const std::string& which, const RunConfig& cfg) {
    if (which == "posterior") {
        const auto a = click_posterior(cfg.herald.params(), cfg.herald.n_max);
        const auto b = posterior_bruteforce(cfg.herald.params(), cfg.herald.n_max,
                                            cfg.herald.k_max);
        double max_dev = 0.0;
        std::printf("%3s %18s %18s\n", "n", "closed form", "brute force");
        for (int n = 0; n <= cfg.herald.n_max; ++n) {
            std::printf("%3d %18.12g %18.12g\n", n, a.probabilities[n],
                        b.probabilities[n]);
            max_dev = std::max(max_dev,
                               std::abs(a.probabilities[n] - b.probabilities[n]));
        }
        std::printf("max deviation %.3g\n", max_dev);
    } else if (which == "dicke") {
        const int N = 10, n = 1;
        const auto dist = rotated_dicke_distribution({N, n}, M_PI / 2.0);
        std::printf("exact var(dN)       %18.12g\n", jz_variance(dist));
        std::printf("closed form var(dN) %18.12g\n", rotated_variance_closed_form(N, n));
    } else if (which == "thinned") {
        const auto p = cfg.herald.params();
        std::printf("%3s %18s %18s\n", "n", "closed form", "convolution");
        double max_dev = 0.0;
        for (int n = 0; n <= 5; ++n) {
            const double closed = thinned_thermal_click_pmf(p.p2, p.pd, n);
            double conv = 0.0;  // sum_k thermal(k) Binom(k, n; pd)
            for (int k = n; k <= cfg.herald.k_max; ++k) {
                double binom = 1.0;
                for (int t = 0; t < n; ++t) binom *= static_cast<double>(k - t) / (t + 1);
                conv += thermal_pmf(p.p2, k) * binom * std::pow(p.pd, n) *
                        std::pow(1.0 - p.pd, k - n);
            }
            std::printf("%3d %18.12g %18.12g\n", n, closed, conv);
            max_dev = std::max(max_dev, std::abs(closed - conv));
        }
        std::printf("max deviation %.3g\n", max_dev);
    } else {
        throw std::invalid_argument("oracle: unknown target " + which);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heralded collective-spin-excitation simulator and analysis toolkit"};
    app.require_subcommand(1);
    // Let the global flags appear after the subcommand as well.
    app.fallthrough();

    std::optional<std::string> config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> shots;
    std::optional<int> window;
    bool as_json = false;
    app.add_option("--config", config_path, "JSON config file")->expected(1);
    app.add_option("--seed", seed, "Override the simulation seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--window", window, "Override the normalization window M");
    app.add_option("--shots", shots, "Override the number of shots");
    app.add_flag("--json", as_json, "Machine-readable output");

    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset CSV");
    auto* ana_cmd = app.add_subcommand("analyze", "Run the statistical pipeline on a dataset");
    std::string dataset_path;
    ana_cmd->add_option("dataset", dataset_path, "Dataset CSV path")->required();
    auto* rep_cmd = app.add_subcommand("reproduce",
                                       "Run all closed-form and end-to-end targets");
    auto* ora_cmd = app.add_subcommand("oracle",
                                       "Closed form vs brute force comparison tables");
    std::string oracle_which = "posterior";
    ora_cmd->add_option("which", oracle_which, "posterior | dicke | thinned");

    CLI11_PARSE(app, argc, argv);

    try {
        const json user = load_user_json(config_path);
        RunConfig cfg = parse_config(user);
        if (seed) cfg.sim.seed = *seed;
        if (shots) cfg.sim.shots = *shots;
        if (window) {
            cfg.analysis.window = *window;
            cfg.sim.window = *window;
        }

        if (sim_cmd->parsed()) {
            const fs::path dir = out_dir.value_or(".");
            fs::create_directories(dir);
            write_manifest(dir, "simulate", user, cfg.sim.seed, config_path);
            auto ds = simulate_run(cfg.sim);
            ds.config_fingerprint = config_fingerprint(user);
            write_dataset_csv(ds, (dir / "dataset.csv").string());
            if (!as_json)
                std::printf("wrote %s (%lld records)\n",
                            (dir / "dataset.csv").c_str(),
                            static_cast<long long>(ds.records.size()));
            return 0;
        }
        if (ana_cmd->parsed()) {
            const auto ds = read_dataset_csv(dataset_path);
            if (static_cast<int>(ds.records.size()) <= cfg.analysis.window)
                throw std::invalid_argument(
                    "analyze: dataset shorter than the window M; reduce --window");
            const auto rep = analyze_dataset(ds.records, cfg.analysis.window,
                                             cfg.analysis.bootstrap_resamples,
                                             cfg.analysis.bootstrap_seed,
                                             cfg.analysis.fit_bins);
            const json out = report_to_json(rep);
            if (out_dir) {
                fs::create_directories(*out_dir);
                write_manifest(*out_dir, "analyze", user, cfg.sim.seed, config_path);
                std::ofstream f(fs::path(*out_dir) / "analysis.json");
                f << out.dump(2) << '\n';
            }
            std::cout << out.dump(as_json ? -1 : 2) << '\n';
            return 0;
        }
        if (rep_cmd->parsed())
            return cmd_reproduce(config_path, out_dir, as_json, seed, shots);
        if (ora_cmd->parsed()) return cmd_oracle(oracle_which, cfg);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
