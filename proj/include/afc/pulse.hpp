#pragma once

// Preparation-waveform synthesis: SECH chirps for spin polarization and the
// Schroeder-phase multi-component comb-burning pulse, plus crest-factor and
// spectrum diagnostics. Waveforms are complex baseband envelopes normalized
// to modulator full scale (peak |a| <= 1).

#include <complex>
#include <string>
#include <vector>

#include "afc/spectral.hpp"

namespace afc {

struct PulseWaveform {
    double sample_rate = 2e9;  // samples/s
    double duration = 1e-3;    // s
    std::vector<std::complex<double>> envelope;

    std::size_t size() const { return envelope.size(); }
    double dt() const { return 1.0 / sample_rate; }
};

struct SechChirpParams {
    double center_frequency_mhz = 150.0;
    double chirp_bandwidth_mhz = 100.0;
    double duration = 1e-3;
    double truncation = 10.0;  // sech argument at the pulse edges
    double sample_rate = 2e9;
};

// a(t) = sech(beta (t-t0)/T) exp(i phi(t)), instantaneous frequency sweeping
// center +- bandwidth/2 along a tanh law, peak normalized to 1.
// Throws if sample_rate < 8 x (center + bandwidth).
PulseWaveform sech_chirp(const SechChirpParams& params);

// Schroeder low-crest phase schedule for n equal-amplitude tones:
// theta_k = pi k^2 / n.
std::vector<double> schroeder_phases(std::size_t n_tones);

struct MultiToothParams {
    double carrier_offset_mhz = 150.0;  // center of the burn band
    double duration = 1e-3;
    double sample_rate = 2e9;
    double chirp_truncation = 10.0;
};

// Comb-burning pulse: one slow chirped component per anti-tooth frequency,
// components spaced by spec.delta and offset by the per-component phases.
// The component count is spec.n_teeth(); phases.size() must match.
// Peak amplitude normalized to 1.
PulseWaveform multi_tooth_pulse(const CombSpec& spec,
                                const std::vector<double>& phases,
                                const MultiToothParams& params);

// Peak instantaneous power over mean power (PAPR), >= 1.
double crest_factor(const PulseWaveform& w);

double mean_power(const PulseWaveform& w);

struct PowerSpectrum {
    std::vector<double> freq_mhz;  // DFT bin frequencies, ascending
    std::vector<double> psd;       // |A(f)|^2 scaled so sum * df = time-domain energy
    double df_mhz = 0.0;

    double energy() const;
    // Fraction of total energy inside [f_lo, f_hi] (MHz).
    double band_energy_fraction(double f_lo_mhz, double f_hi_mhz) const;
};

// DFT magnitude squared, normalized so Parseval holds.
PowerSpectrum pulse_spectrum(const PulseWaveform& w);

// Binary export: little-endian interleaved (re, im) float32 plus a text
// sidecar <path>.txt with sample_rate and duration.
void write_waveform(const PulseWaveform& w, const std::string& path);
PulseWaveform read_waveform(const std::string& path);
void write_spectrum(const PowerSpectrum& s, const std::string& path);

}  // namespace afc
