#include "afc/source.hpp"

#include <cmath>
#include <stdexcept>

#include "afc/rng.hpp"
#include "afc/spectral.hpp"

namespace afc {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// exp(-|tau|/b) convolved with N(0, sigma), closed form
double smeared_exponential(double tau, double b, double sigma) {
    if (sigma <= 0.0) return std::exp(-std::abs(tau) / b);
    double a = 1.0 / b;
    double s2 = sigma * sigma;
    double pre = 0.5 * std::exp(0.5 * s2 * a * a);
    double q = sigma * a / std::sqrt(2.0);
    double t = tau / (sigma * std::sqrt(2.0));
    // guard the overflow of exp(±a tau) with the erfc via the scaled form
    auto term = [&](double sign) {
        double x = q - sign * t;
        // exp(-sign a tau) erfc(x) = exp(x^2 - (q - sign t)^2 ... ) -- use
        // erfcx when the argument is large
        double e = -sign * a * tau;
        if (x > 25.0) return std::exp(e + std::log(std::erfc(25.0)));  // negligible anyway
        return std::exp(e) * std::erfc(x);
    };
    return pre * (term(+1.0) + term(-1.0));
}
}  // namespace

void DetectorParams::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(efficiency_signal) || !in01(efficiency_idler) ||
        !in01(path_efficiency_signal) || !in01(path_efficiency_idler))
        throw std::invalid_argument("DetectorParams: efficiencies must be in [0,1]");
    if (dark_rate_signal_hz < 0.0 || dark_rate_idler_hz < 0.0 || background_signal_hz < 0.0)
        throw std::invalid_argument("DetectorParams: rates must be >= 0");
    if (jitter_fwhm_signal_ns < 0.0 || jitter_fwhm_idler_ns < 0.0)
        throw std::invalid_argument("DetectorParams: jitter must be >= 0");
}

void SequenceTiming::validate() const {
    if (!(repetition_rate_hz > 0.0) || !(gate_s > 0.0) || !(measurement_s > 0.0) ||
        preparation_s < 0.0)
        throw std::invalid_argument("SequenceTiming: durations must be positive");
    if (preparation_s + measurement_s > period_s())
        throw std::invalid_argument("SequenceTiming: sequence longer than the period");
    if (gates_per_period() == 0)
        throw std::invalid_argument("SequenceTiming: measurement block shorter than one gate pair");
}

double analytic_g2si(double mu, double eta_s, double eta_i, double noise_s, double noise_i) {
    if (mu < 0.0 || eta_s < 0.0 || eta_i < 0.0 || noise_s < 0.0 || noise_i < 0.0)
        throw std::invalid_argument("analytic_g2si: inputs must be >= 0");
    if (eta_s > 1.0 || eta_i > 1.0)
        throw std::invalid_argument("analytic_g2si: efficiencies must be <= 1");
    double ds = mu * eta_s + noise_s;
    double di = mu * eta_i + noise_i;
    if (ds <= 0.0 || di <= 0.0)
        throw std::invalid_argument("analytic_g2si: vanishing singles probability");
    return 1.0 + mu * eta_s * eta_i / (ds * di);
}

double autocorrelation_model(double coherence_ns, double jitter_fwhm_ns, double bin_ns) {
    if (!(coherence_ns > 0.0) || !(bin_ns > 0.0) || jitter_fwhm_ns < 0.0)
        throw std::invalid_argument("autocorrelation_model: bad parameters");
    // thermal light: g2(tau) = 1 + |g1|^2 = 1 + exp(-2|tau|/tau_c);
    // both detections jittered -> combined sigma = sqrt(2) sigma_j, then the
    // zero bin averages the smeared peak over its width
    double b = 0.5 * coherence_ns;
    double sigma = jitter_fwhm_ns / 2.3548200450309493 * std::sqrt(2.0);
    const int n = 200;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        double tau = -0.5 * bin_ns + bin_ns * double(i) / n;
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += w * smeared_exponential(tau, b, sigma);
    }
    return 1.0 + sum / double(n);
}

MemoryResponse run_memory_response(const RunSetup& setup) {
    switch (setup.memory_mode) {
        case MemoryMode::None: {
            MemoryResponse r;
            r.p_trans = 1.0;
            return r;
        }
        case MemoryMode::Transparency: {
            // reference path: pump the comb band fully transparent (residual
            // d0) in an otherwise untouched inhomogeneous envelope
            const auto& comb = setup.memory.comb;
            FrequencyGrid grid(comb.center_offset_mhz, 2000.0, 1u << 16);
            SpectralProfile env = inhomogeneous_envelope(grid);
            SpectralProfile ref = burn_transparency(
                env, comb.center_offset_mhz - 0.5 * comb.bandwidth_mhz,
                comb.center_offset_mhz + 0.5 * comb.bandwidth_mhz, setup.transparency_depth);
            LorentzianLine line{setup.memory.signal_center_mhz, setup.memory.signal_fwhm_mhz};
            MemoryResponse r;
            r.p_trans = transmitted_fraction(ref, line);
            return r;
        }
        case MemoryMode::Afc: {
            const auto& comb = setup.memory.comb;
            // fine enough for >= 8 samples per tooth at the 25 us preset
            double spacing_needed = comb.tooth_width_mhz() / 8.0;
            std::size_t n = std::size_t(2000.0 / spacing_needed) + 2;
            std::size_t np = 1;
            while (np < n) np <<= 1;
            FrequencyGrid grid(comb.center_offset_mhz, 2000.0, np);
            return resolve_memory(setup.memory, grid);
        }
    }
    throw std::logic_error("run_memory_response: unknown memory mode");
}

EventStream generate_events(const RunSetup& setup, std::uint64_t seed) {
    setup.detectors.validate();
    setup.timing.validate();
    const SourceParams& src = setup.source;
    const DetectorParams& det = setup.detectors;
    const SequenceTiming& seq = setup.timing;

    MemoryResponse mem = run_memory_response(setup);
    const double p_echo = mem.p_echo;
    const double p_trans = mem.p_trans;

    const double gate_ps = seq.gate_s * 1e12;
    const double period_ps = seq.period_s() * 1e12;
    const double meas_start_ps = seq.preparation_s * 1e12;
    const std::size_t gates = seq.gates_per_period();
    const std::size_t n_periods =
        std::size_t(std::llround(setup.run_length_s * seq.repetition_rate_hz));
    if (n_periods == 0) throw std::invalid_argument("generate_events: run shorter than one period");

    const double tau_c_ps = src.coherence_time_ns() * 1e3;
    const std::size_t modes = std::size_t(gate_ps / tau_c_ps);
    if (modes == 0) throw std::invalid_argument("generate_events: gate shorter than one mode");
    const double mu = src.effective_mu();
    const double p_occupied = mu / (1.0 + mu);
    const double b_ps = src.pair_correlation_ns() * 1e3;

    const double storage_ps = setup.memory.storage_time_us() * 1e6;
    const double echo_sigma_ps = setup.memory.echo_sigma_ns * 1e3;
    const double fiber_delay_ps = setup.fiber_km * setup.fiber_delay_us_per_km * 1e6;
    const double fiber_surv = std::pow(10.0, -0.1 * setup.fiber_km * setup.fiber_loss_db_per_km);

    const double eps_s = det.path_efficiency_signal * det.efficiency_signal;
    const double eps_i = det.path_efficiency_idler * det.efficiency_idler * fiber_surv;
    const double sig_s = det.jitter_fwhm_signal_ns * 1e3 / 2.3548200450309493;
    const double sig_i = det.jitter_fwhm_idler_ns * 1e3 / 2.3548200450309493;

    EventStream out;
    out.events.reserve(std::size_t(double(n_periods) * double(gates) *
                                   (1.0 + double(modes) * p_occupied * (eps_i + 0.01))));

    auto push = [&](double t, Channel c, std::uint32_t trial) {
        if (t < 0.0) t = 0.0;
        out.events.push_back({std::uint64_t(std::llround(t)), c, trial});
    };

    for (std::size_t p = 0; p < n_periods; ++p) {
        const double block = double(p) * period_ps + meas_start_ps;
        for (std::size_t g = 0; g < gates; ++g) {
            const std::uint64_t gate_index = std::uint64_t(p) * gates + g;
            Rng rng(seed, gate_index);
            // pump-on gate g, then a detection gate of the same length
            const double t_gate = block + double(g) * 2.0 * gate_ps;
            push(t_gate, Channel::Sync, std::uint32_t(gate_index));

            // occupied coherence modes (thermal occupation, small mu)
            std::uint64_t occupied = rng.poisson(double(modes) * p_occupied);
            for (std::uint64_t m = 0; m < occupied; ++m) {
                double mode_t0 = t_gate + std::floor(rng.uniform() * double(modes)) * tau_c_ps;
                // pair number conditioned on at least one
                std::uint64_t n_pairs = 1 + rng.thermal(mu);
                for (std::uint64_t q = 0; q < n_pairs; ++q) {
                    double t_emit = mode_t0 + rng.uniform() * tau_c_ps;
                    // signal-idler correlation: two-sided exponential offset
                    // on the signal arm (the narrow filter sits there)
                    double dt = rng.exponential(b_ps);
                    double t_sig = t_emit + (rng.bernoulli(0.5) ? dt : -dt);

                    if (rng.bernoulli(eps_i))
                        push(t_emit + fiber_delay_ps + rng.normal(0.0, sig_i), Channel::Idler,
                             std::uint32_t(gate_index));

                    double u = rng.uniform();
                    double t_out = -1.0;
                    if (u < p_echo)
                        t_out = t_sig + storage_ps + rng.normal(0.0, echo_sigma_ps);
                    else if (u < p_echo + p_trans)
                        t_out = t_sig;
                    if (t_out >= 0.0 && rng.bernoulli(eps_s))
                        push(t_out + rng.normal(0.0, sig_s), Channel::Signal,
                             std::uint32_t(gate_index));
                }
            }
        }

        // darks and background: homogeneous over the measurement block
        Rng drng(seed ^ 0x9e3779b97f4a7c15ULL, p);
        const double block_ps = seq.measurement_s * 1e12;
        double dark_s = (det.dark_rate_signal_hz + det.background_signal_hz) * seq.measurement_s;
        double dark_i = det.dark_rate_idler_hz * seq.measurement_s;
        std::uint64_t ns = drng.poisson(dark_s);
        for (std::uint64_t k = 0; k < ns; ++k)
            push(block + drng.uniform() * block_ps, Channel::Signal, 0);
        std::uint64_t ni = drng.poisson(dark_i);
        for (std::uint64_t k = 0; k < ni; ++k)
            push(block + drng.uniform() * block_ps, Channel::Idler, 0);
    }

    out.sort();
    return out;
}

}  // namespace afc
