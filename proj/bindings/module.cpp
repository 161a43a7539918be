// Python bindings for the core operations: Dicke marginals, the click
// posterior, the efficiency chain, simulation and the analysis pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "spinherald/analysis.hpp"
#include "spinherald/config.hpp"
#include "spinherald/csv.hpp"
#include "spinherald/dicke.hpp"
#include "spinherald/efficiency.hpp"
#include "spinherald/herald.hpp"
#include "spinherald/simulate.hpp"

namespace py = pybind11;
using namespace spinherald;

PYBIND11_MODULE(spinherald, m) {
    m.doc() = "Heralded collective-spin-excitation simulator and analysis toolkit";
    m.attr("__version__") = kToolVersion;

    // --- dicke ---------------------------------------------------------
    py::class_<JzDistribution>(m, "JzDistribution")
        .def_readonly("support", &JzDistribution::support)
        .def_readonly("probabilities", &JzDistribution::probabilities)
        .def("mean_jz", &JzDistribution::mean_jz);

    m.def(
        "rotated_dicke_distribution",
        [](int n_atoms, int excitation, double angle, int exact_cap) {
            return rotated_dicke_distribution({n_atoms, excitation}, angle,
                                              exact_cap);
        },
        py::arg("n_atoms"), py::arg("excitation"), py::arg("angle"),
        py::arg("exact_cap") = kDefaultExactAtomCap);
    m.def("jz_variance", &jz_variance);
    m.def("rotated_variance_closed_form", &rotated_variance_closed_form,
          py::arg("n_atoms"), py::arg("excitation"));
    m.def("hp_limit_check", &hp_limit_check, py::arg("n_atoms_list"),
          py::arg("excitation"), py::arg("exact_cap") = kDefaultExactAtomCap);
    m.def(
        "mixture_variance",
        [](const std::map<int, double>& weights, int n_atoms, double eta) {
            MixtureSpec mix;
            mix.weights = weights;
            mix.n_atoms = n_atoms;
            mix.detection_efficiency = eta;
            return mixture_variance(mix);
        },
        py::arg("weights"), py::arg("n_atoms"), py::arg("detection_efficiency"));

    // --- herald --------------------------------------------------------
    py::class_<HeraldParams>(m, "HeraldParams")
        .def(py::init([](double p0, double p2, double pd, double pf) {
                 HeraldParams p{p0, p2, pd, pf};
                 p.validate();
                 return p;
             }),
             py::arg("p0"), py::arg("p2"), py::arg("pd"), py::arg("pf"))
        .def_readwrite("p0", &HeraldParams::p0)
        .def_readwrite("p2", &HeraldParams::p2)
        .def_readwrite("pd", &HeraldParams::pd)
        .def_readwrite("pf", &HeraldParams::pf);

    py::class_<ClickPosterior>(m, "ClickPosterior")
        .def_readonly("probabilities", &ClickPosterior::probabilities)
        .def_readonly("truncation_mass", &ClickPosterior::truncation_mass)
        .def_readonly("p_one_click", &ClickPosterior::p_one_click)
        .def("mean_excitation", &ClickPosterior::mean_excitation);

    m.def("thermal_pmf", &thermal_pmf, py::arg("p0"), py::arg("n"));
    m.def("poisson_pmf", &poisson_pmf, py::arg("pf"), py::arg("n"));
    m.def("thinned_thermal_click_pmf", &thinned_thermal_click_pmf,
          py::arg("p2"), py::arg("pd"), py::arg("n"));
    m.def("p_one_click", &p_one_click);
    m.def("click_posterior", &click_posterior, py::arg("params"),
          py::arg("n_max"));
    m.def("posterior_bruteforce", &posterior_bruteforce, py::arg("params"),
          py::arg("n_max"), py::arg("k_max") = 500);
    m.def(
        "purity",
        [](double p_click, double p_dark, double p_exct, double p_decay) {
            return purity({p_click, p_dark, p_exct, p_decay});
        },
        py::arg("p_click"), py::arg("p_dark"), py::arg("p_exct"),
        py::arg("p_decay"));
    m.def("multi_excitation_inflation", &multi_excitation_inflation,
          py::arg("posterior"), py::arg("eta"));
    m.def("two_excitation_coherent_ratio", &two_excitation_coherent_ratio);

    // --- efficiency ----------------------------------------------------
    m.def(
        "optical_phase_shift",
        [](double alpha0,
           const std::vector<std::tuple<double, double, double>>& lines) {
            std::vector<TransitionLine> t;
            for (const auto& [d, s, g] : lines) t.push_back({d, s, g});
            return optical_phase_shift(alpha0, t);
        },
        py::arg("alpha0"), py::arg("lines"),
        "lines: list of (detuning, strength, linewidth) tuples");
    m.def("eta_phase", &eta_phase, py::arg("chi"));
    m.def(
        "eta_ac_stark",
        [](double waist, double pulse_duration, double stark_shift_peak,
           double sigma_x, double sigma_z, double rel_tol) {
            BeamGeometry g{waist, pulse_duration, stark_shift_peak, sigma_x,
                           sigma_z};
            return eta_ac_stark(g, rel_tol);
        },
        py::arg("waist"), py::arg("pulse_duration"),
        py::arg("stark_shift_peak"), py::arg("sigma_x"), py::arg("sigma_z"),
        py::arg("rel_tol") = 1e-4);
    m.def(
        "total_efficiency",
        [](double eta_noise, double eta_mm, double eta_phase_v,
           double eta_ac_stark_v, double eta_scatter) {
            return total_efficiency(
                {eta_noise, eta_mm, eta_phase_v, eta_ac_stark_v, eta_scatter});
        },
        py::arg("eta_noise"), py::arg("eta_mm"), py::arg("eta_phase"),
        py::arg("eta_ac_stark"), py::arg("eta_scatter"));

    // --- simulate / analyze -------------------------------------------
    py::class_<MeasurementRecord>(m, "MeasurementRecord")
        .def_readonly("index", &MeasurementRecord::index)
        .def_readonly("phi_raw", &MeasurementRecord::phi_raw)
        .def_readonly("references", &MeasurementRecord::references)
        .def_readonly("click", &MeasurementRecord::click)
        .def_readonly("excitation_present", &MeasurementRecord::excitation_present)
        .def_readonly("n_atoms", &MeasurementRecord::n_atoms);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("records", &Dataset::records)
        .def_readonly("seed", &Dataset::seed);

    m.def(
        "simulate_run",
        [](const py::dict& overrides) {
            nlohmann::json patch = nlohmann::json::object();
            patch["sim"] = nlohmann::json::parse(
                py::str(py::module_::import("json").attr("dumps")(overrides))
                    .cast<std::string>());
            return simulate_run(parse_config(patch).sim);
        },
        py::arg("sim_overrides") = py::dict(),
        "Run the simulator with the default config patched by the given dict");

    py::class_<VarianceReport>(m, "VarianceReport")
        .def_readonly("w", &VarianceReport::w)
        .def_readonly("uncertainty", &VarianceReport::uncertainty)
        .def_readonly("sample_count", &VarianceReport::sample_count);

    py::class_<AnalysisReport>(m, "AnalysisReport")
        .def_readonly("no_click", &AnalysisReport::no_click)
        .def_readonly("click", &AnalysisReport::click)
        .def_readonly("n_records", &AnalysisReport::n_records)
        .def_readonly("n_clicks", &AnalysisReport::n_clicks)
        .def_readonly("n_valid", &AnalysisReport::n_valid)
        .def_readonly("zi_correction", &AnalysisReport::zi_correction)
        .def_property_readonly("weights_sum_sq",
                               [](const AnalysisReport& r) {
                                   return r.weights.sum_sq;
                               });

    m.def("analyze_dataset", &analyze_dataset, py::arg("records"),
          py::arg("window"), py::arg("bootstrap_resamples") = 500,
          py::arg("bootstrap_seed") = 1, py::arg("fit_bins") = 8);
    m.def(
        "read_dataset_csv",
        [](const std::string& path) { return read_dataset_csv(path); },
        py::arg("path"));
    m.def(
        "write_dataset_csv",
        [](const Dataset& ds, const std::string& path) {
            write_dataset_csv(ds, path);
        },
        py::arg("dataset"), py::arg("path"));
    m.def("estimator_mse_check", &estimator_mse_check, py::arg("count"));
    m.def("zi_variance_correction", &zi_variance_correction, py::arg("window"));
    m.def("default_config", []() {
        return default_config_json().dump(2);
    });
}
