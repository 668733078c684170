#pragma once

// The AFC storage transform: echo efficiency of a comb (parametric formula
// and numeric profile route), decay with storage time, and the stochastic
// action on photon events: transmit, absorb, or re-emit at t + 1/delta.

#include <cstdint>
#include <optional>

#include "afc/events.hpp"
#include "afc/spectral.hpp"

namespace afc {

struct MemoryParams {
    CombSpec comb;
    std::optional<SpectralProfile> profile;  // overrides the parametric comb when set
    double t2_afc_us = 69.0;
    double signal_fwhm_mhz = 64.0;           // Lorentzian line of the stored photons
    double signal_center_mhz = 150.0;
    double echo_sigma_ns = 3.0;              // temporal spread of the re-emitted echo

    double storage_time_us() const { return 1.0 / comb.delta_mhz; }
    void validate() const;
};

// eta = (d/F)^2 sinc^2(pi/F) exp(-d/F) exp(-d0), in [0,1).
double echo_efficiency_parametric(double d, double finesse, double d0);

// d eta / dF, analytic.
double echo_efficiency_dF(double d, double finesse, double d0);

// Finesse maximizing the parametric efficiency at fixed d, d0
// (golden-section search; eta is unimodal in F).
double optimal_finesse(double d, double d0, double f_lo = 1.01, double f_hi = 64.0);

// Numeric route: first-harmonic amplitude of the depth profile at 1/delta,
// weighted by the signal line shape W over the comb band:
//   eta = | <d e^{i 2 pi delta_f / Delta}>_W |^2 exp(-<d>_W).
// Agrees with the parametric formula for ideal square combs.
// Throws if the analysis band holds fewer than 3 teeth.
double echo_efficiency_from_profile(const SpectralProfile& profile, double delta_mhz,
                                    double band_lo_mhz, double band_hi_mhz,
                                    const LorentzianLine* weight = nullptr);

// exp(-4 t / T2_afc), the two-pulse-echo intensity convention.
double decay_factor(double t_us, double t2_afc_us);

struct MemoryResponse {
    double p_echo = 0.0;   // absorbed_fraction x eta_comb x decay
    double p_trans = 0.0;  // spectrum-weighted exp(-d) through the coarse profile
};

// Resolve params to the per-photon echo and transmission probabilities.
MemoryResponse resolve_memory(const MemoryParams& params, const FrequencyGrid& grid);

// Map each signal photon independently to echo (delayed by 1/delta plus a
// Gaussian spread), direct transmission, or loss. Other channels pass
// through untouched. Output is time-sorted.
EventStream apply_memory(const EventStream& events, const MemoryParams& params,
                         const MemoryResponse& response, std::uint64_t rng_seed);

}  // namespace afc
