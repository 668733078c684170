// afcnode: command-line front end for the memory-node simulator and the
// timestamp analytics.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "afc/config.hpp"
#include "afc/memory.hpp"
#include "afc/scenario.hpp"
#include "afc/source.hpp"

using namespace afc;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_s;
    std::optional<double> storage_us;
    std::optional<double> fiber_km;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value sections)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "random seed override");
    cmd->add_option("--duration", o.duration_s, "acquisition wall time in seconds");
    cmd->add_option("--storage-time", o.storage_us, "storage-time preset in microseconds");
    cmd->add_option("--fiber-km", o.fiber_km, "idler fiber length in km");
    cmd->add_flag("--strict", o.strict, "exit nonzero when a target band fails");
}

NodeConfig resolve(const CommonOpts& o) {
    NodeConfig cfg = o.config_path.empty() ? NodeConfig::nominal() : load_config(o.config_path);
    if (o.storage_us) cfg.set_storage_time(*o.storage_us);
    if (o.seed) cfg.seed = *o.seed;
    if (o.duration_s) cfg.run.run_length_s = *o.duration_s;
    if (o.fiber_km) cfg.run.fiber_km = *o.fiber_km;
    cfg.validate();
    return cfg;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AFC memory-node simulator and correlation analytics"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input_path;

    auto* synth = app.add_subcommand("synth-pulse", "synthesize the comb-burning waveform");
    add_common(synth, opts);
    auto* prep = app.add_subcommand("prep-sim", "simulate polarization and comb burning");
    add_common(prep, opts);
    auto* sim = app.add_subcommand("simulate", "generate a detection timestamp stream");
    add_common(sim, opts);
    auto* corr = app.add_subcommand("correlate", "echo-window g2 analysis");
    add_common(corr, opts);
    corr->add_option("--input", input_path, "timetag file (binary or .csv); simulates if absent");
    auto* mm = app.add_subcommand("multimode", "temporal multimode capacity analysis");
    add_common(mm, opts);
    auto* fib = app.add_subcommand("fiber", "remote-distribution scenario with idler fiber");
    add_common(fib, opts);
    auto* cal = app.add_subcommand("calibrate", "fit source and comb knobs to target points");
    add_common(cal, opts);
    auto* rep = app.add_subcommand("report", "resolved config and analytic predictions");
    add_common(rep, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        NodeConfig cfg = resolve(opts);
        std::filesystem::create_directories(opts.out_dir);
        bool pass = true;

        if (synth->parsed()) {
            pass = run_scenario("pulse-design", cfg, opts.out_dir);
            PulseDesignResult r = run_pulse_design(cfg, opts.out_dir);
            std::printf("components %zu  papr %.3f (zero-phase %.1f)  power gain %.1f\n",
                        r.n_components, r.crest_factor_schroeder, r.crest_factor_zero_phase,
                        r.mean_power_gain);
        } else if (prep->parsed()) {
            PrepSimResult r = run_prep_sim(cfg, opts.out_dir);
            std::printf("tooth depth %.3f  antitooth %.3f  polarization %.3f  eta %.4f\n",
                        r.prep.tooth_depth, r.prep.antitooth_depth, r.prep.in_band_polarization,
                        r.comb_echo_efficiency);
        } else if (sim->parsed()) {
            EventStream ev = generate_events(cfg.run, cfg.seed);
            std::string path = join(opts.out_dir, "events.ttb");
            write_timetags(ev, path);
            save_config(cfg, join(opts.out_dir, "resolved.cfg"));
            std::printf("%zu events (%zu signal, %zu idler, %zu sync) -> %s\n",
                        ev.events.size(), ev.count(Channel::Signal), ev.count(Channel::Idler),
                        ev.count(Channel::Sync), path.c_str());
        } else if (corr->parsed()) {
            if (input_path.empty()) {
                pass = run_scenario("g2-sweep", cfg, opts.out_dir);
            } else {
                EventStream ev = read_events(input_path);
                auto idlers = ev.channel_times(Channel::Idler);
                auto signals = ev.channel_times(Channel::Signal);
                std::int64_t delay =
                    std::int64_t(std::llround(cfg.run.fiber_km * cfg.run.fiber_delay_us_per_km * 1e6));
                std::int64_t expected =
                    std::int64_t(std::llround(cfg.storage_time_us() * 1e6)) - delay;
                G2Options gopt;
                gopt.shift_period_ps = std::int64_t(std::llround(2e12 * cfg.run.timing.gate_s));
                Histogram h = coincidence_histogram(idlers, signals, expected - 400000,
                                                    expected + 400000, gopt.bin_ps, 1);
                G2Result g = normalize_g2(h, idlers, signals, gopt);
                g.write_csv(join(opts.out_dir, "g2.csv"));
                std::size_t i = g.bin_at(double(expected) * 1e-3);
                std::printf("g2(%.3f us) = %.2f +- %.2f\n", double(expected) * 1e-6, g.g2[i],
                            g.sigma[i]);
            }
        } else if (mm->parsed()) {
            pass = run_scenario("multimode", cfg, opts.out_dir);
            std::printf("see %s\n", join(opts.out_dir, "summary.txt").c_str());
        } else if (fib->parsed()) {
            if (!opts.fiber_km) cfg.run.fiber_km = 5.0;
            pass = run_scenario("fiber", cfg, opts.out_dir);
            std::printf("see %s\n", join(opts.out_dir, "summary.txt").c_str());
        } else if (cal->parsed()) {
            CalibrationResult r = calibrate(CalibrationTargets{}, cfg);
            save_config(r.fitted, join(opts.out_dir, "calibrated.cfg"));
            std::printf("mu %.5f  comb depth %.3f  classical depth %.3f\n", r.mu, r.comb_depth,
                        r.classical_depth);
            for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
        } else if (rep->parsed()) {
            save_config(cfg, join(opts.out_dir, "resolved.cfg"));
            double duty = cfg.run.timing.duty_cycle();
            double eta = predicted_measured_efficiency(cfg);
            double mu = cfg.run.source.effective_mu();
            std::size_t modes =
                std::size_t(std::llround(1.0 / (20e-3 * cfg.run.memory.comb.delta_mhz)));
            FILE* f = std::fopen(join(opts.out_dir, "report.txt").c_str(), "w");
            if (!f) throw std::runtime_error("cannot write report");
            std::fprintf(f, "storage_time_us %.6g\nduty_cycle %.6f\nmu %.6g\n", cfg.storage_time_us(),
                         duty, mu);
            std::fprintf(f, "predicted_measured_efficiency %.6g\n", eta);
            std::fprintf(f, "noiseless_g2 %.6g\nmultimode_capacity_20ns %zu\n", 1.0 + 1.0 / mu, modes);
            std::fclose(f);
            std::printf("duty %.4f  mu %.4g  eta %.4f  modes %zu\n", duty, mu, eta, modes);
        }

        if (opts.strict && !pass) {
            std::fprintf(stderr, "strict mode: target band failure\n");
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
