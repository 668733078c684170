#pragma once

// Post-processing of timestamp streams: coincidence histograms, normalized
// g2(tau), storage-efficiency estimation, multimode capacity analysis and
// the Cauchy-Schwarz nonclassicality test.

#include <cstdint>
#include <string>
#include <vector>

#include "afc/events.hpp"

namespace afc {

struct Histogram {
    std::int64_t tau_min_ps = 0;  // left edge of the first bin
    std::int64_t bin_ps = 2000;
    std::vector<std::uint64_t> counts;

    std::int64_t tau_center_ps(std::size_t i) const {
        return tau_min_ps + std::int64_t(i) * bin_ps + bin_ps / 2;
    }
    std::uint64_t total() const;
};

// Full-pairwise coincidences: counts every (start, stop) pair with
// tau = t_stop - t_start inside [tau_min, tau_max). Streaming two-pointer
// over the sorted channels; optionally parallel over stop events (the
// reduction is an integer sum, so the result is thread-count independent).
// Throws on unsorted input.
Histogram coincidence_histogram(const std::vector<std::uint64_t>& starts,
                                const std::vector<std::uint64_t>& stops,
                                std::int64_t tau_min_ps, std::int64_t tau_max_ps,
                                std::int64_t bin_ps, unsigned threads = 1);

Histogram coincidence_histogram(const EventStream& events, Channel start_ch,
                                Channel stop_ch, std::int64_t tau_min_ps,
                                std::int64_t tau_max_ps, std::int64_t bin_ps,
                                unsigned threads = 1);

enum class AccidentalMethod {
    TrialShifted,  // mean of the histogram shifted by whole trial periods
    Sideband,      // mean of sideband bins away from the configured peaks
};

struct G2Options {
    std::int64_t bin_ps = 2000;
    AccidentalMethod method = AccidentalMethod::TrialShifted;
    std::int64_t shift_period_ps = 0;  // trial period (2 x gate) for TrialShifted
    unsigned n_shifts = 4;             // shifts used on each side
    unsigned smooth_bins = 21;         // moving average applied to the accidental level
    // peak regions excluded from the sideband estimate, |tau - center| < half_width
    std::vector<std::pair<std::int64_t, std::int64_t>> sideband_exclusions_ps;
    unsigned threads = 1;
};

struct G2Result {
    std::vector<double> tau_ns;
    std::vector<std::uint64_t> counts;
    std::vector<double> g2;
    std::vector<double> sigma;
    std::vector<double> accidental;  // per-bin accidental level used
    double mean_accidental = 0.0;

    // g2 value and 1-sigma error of the bin whose center is nearest tau (ns)
    std::size_t bin_at(double tau_ns_value) const;
    void write_csv(const std::string& path) const;
};

G2Result normalize_g2(const Histogram& hist,
                      const std::vector<std::uint64_t>& starts,
                      const std::vector<std::uint64_t>& stops,
                      const G2Options& opt);

struct CauchySchwarzResult {
    double r = 0.0;
    bool nonclassical = false;      // R > 1
    bool conservative_pass = false; // g2si > 2
};

CauchySchwarzResult cauchy_schwarz(double g2si_peak, double g2ss0, double g2ii0);

struct EfficiencyEstimate {
    double eta = 0.0;
    double sigma = 0.0;
    double corrected_reference = 0.0;
};

// eta = N_echo / (N_ref_raw / exp(-d0)), Poisson errors from the raw counts.
// ref_scale rescales the reference for a different acquisition time.
EfficiencyEstimate efficiency_estimate(double n_echo, double n_ref_raw, double d0,
                                       double ref_scale = 1.0);

struct MultimodeResult {
    double mode_duration_ns = 20.0;
    std::size_t n_modes = 0;
    std::vector<std::uint64_t> cumulative_coincidences;  // per prefix k = 1..N
    std::vector<double> g2_integrated;                   // per prefix
    std::vector<double> g2_sigma;
    double plateau_g2 = 0.0;      // g2 at k = N
    double plateau_sigma = 0.0;
    double linearity_r2 = 0.0;    // of cumulative counts vs k

    void write_csv(const std::string& path) const;
};

struct MultimodeOptions {
    double mode_duration_ns = 20.0;
    std::int64_t storage_ps = 25000000;   // 1/delta
    std::int64_t gate_ps = 25000000;      // pump-on duration
    std::int64_t idler_delay_ps = 0;      // fiber delay to subtract from idler times
    std::int64_t echo_half_window_ps = 10000;
    unsigned n_shifts = 4;
};

// Sync-referenced multimode analysis: echo-window coincidences sorted by the
// mode index of the idler arrival inside the pump gate, with trial-shifted
// accidental subtraction for the integrated g2. Throws without sync events.
MultimodeResult multimode_analysis(const EventStream& events, const MultimodeOptions& opt);

struct PeakReport {
    double tau_us = 0.0;
    double g2 = 0.0;
    double sigma = 0.0;
    bool significant = false;  // SNR >= 3 over the accidental level
};

struct FiberScenarioResult {
    PeakReport transmission;
    PeakReport echo;
    bool heralded_before_release = false;  // echo peak at tau > 0
};

// Locate the direct-transmission and echo peaks of an idler-delayed run and
// check heralding-before-release. Throws if no significant peak is found.
FiberScenarioResult fiber_scenario_analysis(const EventStream& events,
                                            std::int64_t storage_ps,
                                            std::int64_t idler_delay_ps,
                                            const G2Options& opt);

}  // namespace afc
