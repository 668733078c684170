#pragma once

// Statistical model and Monte-Carlo generator for the filtered SPDC pair
// source, detectors and timing chain: thermal pair statistics per coherence
// mode, gated pumping, memory action on the signal photons, idler fiber
// delay, detector efficiency, dark counts and jitter.

#include <cstdint>

#include "afc/events.hpp"
#include "afc/memory.hpp"

namespace afc {

struct SourceParams {
    double mean_pairs_per_mode = 0.0112;  // mu, per coherence mode, at nominal pump power
    double signal_filter_fwhm_mhz = 64.0;
    double idler_filter_fwhm_mhz = 500.0;
    double pump_power_uw = 270.0;         // scales mu linearly
    double nominal_pump_power_uw = 270.0;

    // coherence time of the filtered pairs, set by the narrow signal filter
    double coherence_time_ns() const {
        return 1e3 / (3.141592653589793 * signal_filter_fwhm_mhz);
    }
    // signal-idler correlation decay constant (double-exponential scale)
    double pair_correlation_ns() const {
        return 1e3 / (2.0 * 3.141592653589793 * signal_filter_fwhm_mhz);
    }
    double effective_mu() const {
        return mean_pairs_per_mode * pump_power_uw / nominal_pump_power_uw;
    }
};

struct DetectorParams {
    double efficiency_signal = 0.20;
    double efficiency_idler = 0.80;
    double path_efficiency_signal = 0.0130;  // coupling + FP filter + circulator, calibrated
    double path_efficiency_idler = 0.30;     // coupling + UNFBG, calibrated
    double dark_rate_signal_hz = 30.0;
    double dark_rate_idler_hz = 100.0;
    // storage-independent background on the signal channel during measurement
    // blocks (fluorescence after the preparation burn); calibrated so the
    // cross-correlation decays with storage time at the observed rate
    double background_signal_hz = 102.0;
    double jitter_fwhm_signal_ns = 0.35;
    double jitter_fwhm_idler_ns = 0.35;
    void validate() const;
};

// Experiment sequence: spin polarization + AFC burn (no detection), then a
// measurement block of alternating pump-on / detection gates of 1/delta each.
struct SequenceTiming {
    double repetition_rate_hz = 2.3;
    double preparation_s = 0.25;    // 200 ms polarization + 50 ms burn
    double measurement_s = 0.05;
    double gate_s = 25e-6;          // 1/delta; pump-on and detection window

    double period_s() const { return 1.0 / repetition_rate_hz; }
    std::size_t gates_per_period() const { return std::size_t(measurement_s / (2.0 * gate_s)); }
    // fraction of wall time inside pump-on gates
    double duty_cycle() const {
        return double(gates_per_period()) * gate_s * repetition_rate_hz;
    }
    void validate() const;
};

enum class MemoryMode { None, Transparency, Afc };

struct RunSetup {
    SourceParams source;
    DetectorParams detectors;
    SequenceTiming timing;
    MemoryMode memory_mode = MemoryMode::Afc;
    MemoryParams memory;          // used for Afc (and supplies echo spread)
    double transparency_depth = 0.2;   // residual d0 of the reference window
    double fiber_km = 0.05;       // idler fiber before detection
    double fiber_delay_us_per_km = 4.706;
    double fiber_loss_db_per_km = 0.2;
    double run_length_s = 69.0;
};

// Analytic probabilistic-pair-source cross-correlation per coincidence
// window: 1 + mu eta_s eta_i / ((mu eta_s + n_s)(mu eta_i + n_i)).
// Reduces to 1 + 1/mu when the noise terms vanish.
double analytic_g2si(double mu, double eta_s, double eta_i, double noise_s, double noise_i);

// Jitter- and bin-smeared thermal autocorrelation peak: 2 at zero jitter and
// zero bin width, approaching 1 when the smearing swamps the coherence time.
double autocorrelation_model(double coherence_ns, double jitter_fwhm_ns, double bin_ns = 2.0);

// Monte-Carlo run. Deterministic for a fixed seed; every gate draws from its
// own counter-based substream. Sync events mark pump-gate starts.
EventStream generate_events(const RunSetup& setup, std::uint64_t seed);

// Echo and transmission probabilities used by generate_events for the
// configured memory mode.
MemoryResponse run_memory_response(const RunSetup& setup);

}  // namespace afc
