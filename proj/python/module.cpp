// Python bindings for the memory-node simulator: configuration, the event
// generator, correlation analytics and the scalar physics helpers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afc/config.hpp"
#include "afc/correlator.hpp"
#include "afc/memory.hpp"
#include "afc/pulse.hpp"
#include "afc/scenario.hpp"
#include "afc/source.hpp"

namespace py = pybind11;
using namespace afc;

PYBIND11_MODULE(afcnode_core, m) {
    m.doc() = "AFC quantum-memory node simulator and correlation analytics";

    py::class_<NodeConfig>(m, "NodeConfig")
        .def_static("nominal", &NodeConfig::nominal, py::arg("storage_time_us") = 25.0)
        .def_readwrite("seed", &NodeConfig::seed)
        .def_property(
            "storage_time_us", [](const NodeConfig& c) { return c.storage_time_us(); },
            [](NodeConfig& c, double v) { c.set_storage_time(v); })
        .def_property(
            "run_length_s", [](const NodeConfig& c) { return c.run.run_length_s; },
            [](NodeConfig& c, double v) { c.run.run_length_s = v; })
        .def_property(
            "fiber_km", [](const NodeConfig& c) { return c.run.fiber_km; },
            [](NodeConfig& c, double v) { c.run.fiber_km = v; })
        .def_property(
            "mean_pairs_per_mode",
            [](const NodeConfig& c) { return c.run.source.mean_pairs_per_mode; },
            [](NodeConfig& c, double v) { c.run.source.mean_pairs_per_mode = v; })
        .def("duty_cycle", [](const NodeConfig& c) { return c.run.timing.duty_cycle(); })
        .def("validate", &NodeConfig::validate);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("save_config", &save_config, py::arg("config"), py::arg("path"));

    m.def("echo_efficiency_parametric", &echo_efficiency_parametric, py::arg("d"),
          py::arg("finesse"), py::arg("d0"));
    m.def("optimal_finesse", &optimal_finesse, py::arg("d"), py::arg("d0"),
          py::arg("f_lo") = 1.01, py::arg("f_hi") = 64.0);
    m.def("decay_factor", &decay_factor, py::arg("t_us"), py::arg("t2_afc_us"));
    m.def("analytic_g2si", &analytic_g2si, py::arg("mu"), py::arg("eta_s"), py::arg("eta_i"),
          py::arg("noise_s"), py::arg("noise_i"));
    m.def("autocorrelation_model", &autocorrelation_model, py::arg("coherence_ns"),
          py::arg("jitter_fwhm_ns"), py::arg("bin_ns") = 2.0);
    m.def("predicted_measured_efficiency", &predicted_measured_efficiency, py::arg("config"));
    m.def("schroeder_phases", &schroeder_phases, py::arg("n_tones"));

    m.def(
        "efficiency_estimate",
        [](double n_echo, double n_ref_raw, double d0, double ref_scale) {
            EfficiencyEstimate e = efficiency_estimate(n_echo, n_ref_raw, d0, ref_scale);
            return py::make_tuple(e.eta, e.sigma, e.corrected_reference);
        },
        py::arg("n_echo"), py::arg("n_ref_raw"), py::arg("d0"), py::arg("ref_scale") = 1.0,
        "returns (eta, sigma, corrected_reference)");

    m.def(
        "cauchy_schwarz",
        [](double g2si, double g2ss, double g2ii) {
            CauchySchwarzResult r = cauchy_schwarz(g2si, g2ss, g2ii);
            return py::make_tuple(r.r, r.nonclassical, r.conservative_pass);
        },
        py::arg("g2si_peak"), py::arg("g2ss0"), py::arg("g2ii0"),
        "returns (R, nonclassical, conservative_pass)");

    m.def(
        "simulate",
        [](const NodeConfig& cfg) {
            EventStream ev = generate_events(cfg.run, cfg.seed);
            std::vector<std::uint64_t> times;
            std::vector<int> channels;
            times.reserve(ev.events.size());
            channels.reserve(ev.events.size());
            for (const auto& e : ev.events) {
                times.push_back(e.time_ps);
                channels.push_back(int(e.channel));
            }
            return py::make_tuple(times, channels);
        },
        py::arg("config"), "returns (times_ps, channels) with 0=signal, 1=idler, 2=sync");

    m.def(
        "coincidence_histogram",
        [](std::vector<std::uint64_t> starts, std::vector<std::uint64_t> stops,
           std::int64_t tau_min_ps, std::int64_t tau_max_ps, std::int64_t bin_ps,
           unsigned threads) {
            Histogram h = coincidence_histogram(starts, stops, tau_min_ps, tau_max_ps, bin_ps,
                                                threads);
            return py::make_tuple(h.tau_min_ps, h.bin_ps, h.counts);
        },
        py::arg("starts"), py::arg("stops"), py::arg("tau_min_ps"), py::arg("tau_max_ps"),
        py::arg("bin_ps") = 2000, py::arg("threads") = 1,
        "returns (tau_min_ps, bin_ps, counts)");

    m.def("run_scenario", &run_scenario, py::arg("name"), py::arg("config"),
          py::arg("out_dir"));
}
