#include "afc/memory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "afc/rng.hpp"

namespace afc {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }
}  // namespace

void MemoryParams::validate() const {
    comb.validate();
    if (!(t2_afc_us > 0.0)) throw std::invalid_argument("MemoryParams: t2_afc must be positive");
}

double echo_efficiency_parametric(double d, double finesse, double d0) {
    if (!(d > 0.0) || !(finesse > 1.0) || d0 < 0.0)
        throw std::invalid_argument("echo_efficiency_parametric: need d > 0, F > 1, d0 >= 0");
    double x = d / finesse;
    double s = sinc(kPi / finesse);
    return x * x * s * s * std::exp(-x) * std::exp(-d0);
}

double echo_efficiency_dF(double d, double finesse, double d0) {
    // eta(F) = (d/F)^2 sinc^2(pi/F) e^{-d/F} e^{-d0}
    // d/dF log eta = -2/F + d/F^2 + 2 (u/F) (1/u - cot u)   with u = pi/F
    double u = kPi / finesse;
    double eta = echo_efficiency_parametric(d, finesse, d0);
    double dlog = -2.0 / finesse + d / (finesse * finesse) +
                  2.0 * (u / finesse) * (1.0 / u - 1.0 / std::tan(u));
    return eta * dlog;
}

double optimal_finesse(double d, double d0, double f_lo, double f_hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = f_lo, b = f_hi;
    double c = b - phi * (b - a), e = a + phi * (b - a);
    double fc = echo_efficiency_parametric(d, c, d0);
    double fe = echo_efficiency_parametric(d, e, d0);
    while (b - a > 1e-8) {
        if (fc < fe) {
            a = c;
            c = e;
            fc = fe;
            e = a + phi * (b - a);
            fe = echo_efficiency_parametric(d, e, d0);
        } else {
            b = e;
            e = c;
            fe = fc;
            c = b - phi * (b - a);
            fc = echo_efficiency_parametric(d, c, d0);
        }
    }
    return 0.5 * (a + b);
}

double echo_efficiency_from_profile(const SpectralProfile& profile, double delta_mhz,
                                    double band_lo_mhz, double band_hi_mhz,
                                    const LorentzianLine* weight) {
    if (!(delta_mhz > 0.0)) throw std::invalid_argument("echo_efficiency_from_profile: delta must be positive");
    if (band_hi_mhz - band_lo_mhz < 3.0 * delta_mhz)
        throw std::invalid_argument("echo_efficiency_from_profile: band narrower than 3 teeth");
    // snap the band to an integer number of periods to avoid window leakage
    std::size_t n_per = std::size_t((band_hi_mhz - band_lo_mhz) / delta_mhz);
    double hi = band_lo_mhz + double(n_per) * delta_mhz;

    const auto& g = profile.grid;
    std::complex<double> harm = 0.0;
    double mean = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < g.n_points; ++i) {
        double f = g.freq_at(i);
        if (f < band_lo_mhz || f >= hi) continue;
        double w = weight ? weight->density(f) : 1.0;
        double d = profile.optical_depth[i];
        norm += w;
        mean += w * d;
        double ph = 2.0 * kPi * f / delta_mhz;
        harm += w * d * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    if (norm <= 0.0) throw std::runtime_error("echo_efficiency_from_profile: empty band");
    mean /= norm;
    double a1 = std::abs(harm) / norm;  // |<d e^{i phi}>| = d1/2 for a cosine comb
    return a1 * a1 * std::exp(-mean);
}

double decay_factor(double t_us, double t2_afc_us) {
    if (t_us < 0.0) throw std::invalid_argument("decay_factor: negative time");
    return std::exp(-4.0 * t_us / t2_afc_us);
}

MemoryResponse resolve_memory(const MemoryParams& params, const FrequencyGrid& grid) {
    params.validate();
    SpectralProfile prof = params.profile ? *params.profile
                                          : build_comb_profile(params.comb, grid);
    // A photon much shorter than 1/delta sees the period-averaged depth for
    // prompt absorption and transmission; the comb structure acts later as
    // the echo.
    SpectralProfile coarse = period_averaged(prof, params.comb.delta_mhz);
    LorentzianLine line{params.signal_center_mhz, params.signal_fwhm_mhz};

    double absorbed = absorbed_fraction(coarse, line);
    double eta_comb = params.profile
                          ? echo_efficiency_from_profile(
                                prof, params.comb.delta_mhz,
                                params.comb.center_offset_mhz - 0.5 * params.comb.bandwidth_mhz,
                                params.comb.center_offset_mhz + 0.5 * params.comb.bandwidth_mhz,
                                &line)
                          : echo_efficiency_parametric(params.comb.peak_depth,
                                                       params.comb.finesse,
                                                       params.comb.background_depth);
    double decay = decay_factor(params.storage_time_us(), params.t2_afc_us);

    MemoryResponse r;
    r.p_echo = absorbed * eta_comb * decay;
    r.p_trans = transmitted_fraction(coarse, line);
    if (r.p_echo + r.p_trans > 1.0)
        throw std::runtime_error("resolve_memory: p_echo + p_trans > 1, inconsistent params");
    return r;
}

EventStream apply_memory(const EventStream& events, const MemoryParams& params,
                         const MemoryResponse& response, std::uint64_t rng_seed) {
    if (response.p_echo + response.p_trans > 1.0)
        throw std::invalid_argument("apply_memory: p_echo + p_trans > 1");
    const double storage_ps = 1e6 / params.comb.delta_mhz;  // 1/delta, MHz -> ps
    const double sigma_ps = params.echo_sigma_ns * 1e3;

    EventStream out;
    out.events.reserve(events.events.size());
    for (const auto& e : events.events) {
        if (e.channel != Channel::Signal) {
            out.events.push_back(e);
            continue;
        }
        // per-event substream keyed on the input timestamp: independent of
        // processing order
        Rng rng(rng_seed, e.time_ps);
        double u = rng.uniform();
        if (u < response.p_echo) {
            Event echo = e;
            double t = double(e.time_ps) + storage_ps + rng.normal(0.0, sigma_ps);
            echo.time_ps = t < 0.0 ? 0 : std::uint64_t(std::llround(t));
            out.events.push_back(echo);
        } else if (u < response.p_echo + response.p_trans) {
            out.events.push_back(e);
        }
        // otherwise absorbed without re-emission: lost
    }
    out.sort();
    return out;
}

}  // namespace afc
