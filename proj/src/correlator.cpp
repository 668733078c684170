#include "afc/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <stdexcept>

namespace afc {

std::uint64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t(0));
}

namespace {

void check_sorted(const std::vector<std::uint64_t>& v, const char* who) {
    if (!std::is_sorted(v.begin(), v.end()))
        throw std::invalid_argument(std::string(who) + ": input not time-sorted");
}

// counts pairs for stops[lo..hi) against all starts within the tau window
void histogram_range(const std::vector<std::uint64_t>& starts,
                     const std::vector<std::uint64_t>& stops,
                     std::size_t lo, std::size_t hi,
                     std::int64_t tau_min, std::int64_t tau_max, std::int64_t bin,
                     std::vector<std::uint64_t>& counts) {
    if (starts.empty()) return;
    // two-pointer window over starts; advances monotonically with the stops
    std::size_t a = 0, b = 0;
    if (lo < hi) {
        // position the window for the first stop in this range
        std::int64_t t0 = std::int64_t(stops[lo]);
        a = std::size_t(std::lower_bound(starts.begin(), starts.end(),
                                         std::uint64_t(std::max<std::int64_t>(0, t0 - tau_max + 1))) -
                        starts.begin());
        b = a;
    }
    for (std::size_t s = lo; s < hi; ++s) {
        std::int64_t ts = std::int64_t(stops[s]);
        while (a < starts.size() && std::int64_t(starts[a]) < ts - tau_max + 1) ++a;
        if (b < a) b = a;
        while (b < starts.size() && std::int64_t(starts[b]) <= ts - tau_min) ++b;
        for (std::size_t j = a; j < b; ++j) {
            std::int64_t tau = ts - std::int64_t(starts[j]);
            counts[std::size_t((tau - tau_min) / bin)]++;
        }
    }
}

}  // namespace

Histogram coincidence_histogram(const std::vector<std::uint64_t>& starts,
                                const std::vector<std::uint64_t>& stops,
                                std::int64_t tau_min_ps, std::int64_t tau_max_ps,
                                std::int64_t bin_ps, unsigned threads) {
    if (tau_max_ps <= tau_min_ps) throw std::invalid_argument("coincidence_histogram: empty window");
    if (bin_ps <= 0) throw std::invalid_argument("coincidence_histogram: bad bin width");
    check_sorted(starts, "coincidence_histogram(starts)");
    check_sorted(stops, "coincidence_histogram(stops)");

    Histogram h;
    h.tau_min_ps = tau_min_ps;
    h.bin_ps = bin_ps;
    std::size_t n_bins = std::size_t((tau_max_ps - tau_min_ps + bin_ps - 1) / bin_ps);
    h.counts.assign(n_bins, 0);
    // the loop bins tau in [tau_min, tau_min + n_bins*bin), upper bound exclusive
    std::int64_t tau_hi = tau_min_ps + std::int64_t(n_bins) * bin_ps;

    if (threads <= 1 || stops.size() < 4096) {
        histogram_range(starts, stops, 0, stops.size(), tau_min_ps, tau_hi, bin_ps, h.counts);
        return h;
    }
    unsigned n = std::min<unsigned>(threads, 64);
    std::vector<std::future<std::vector<std::uint64_t>>> futs;
    std::size_t chunk = (stops.size() + n - 1) / n;
    for (unsigned t = 0; t < n; ++t) {
        std::size_t lo = std::min(stops.size(), std::size_t(t) * chunk);
        std::size_t hi = std::min(stops.size(), lo + chunk);
        futs.push_back(std::async(std::launch::async, [&, lo, hi] {
            std::vector<std::uint64_t> c(n_bins, 0);
            histogram_range(starts, stops, lo, hi, tau_min_ps, tau_hi, bin_ps, c);
            return c;
        }));
    }
    for (auto& f : futs) {
        auto c = f.get();
        for (std::size_t i = 0; i < n_bins; ++i) h.counts[i] += c[i];
    }
    return h;
}

Histogram coincidence_histogram(const EventStream& events, Channel start_ch,
                                Channel stop_ch, std::int64_t tau_min_ps,
                                std::int64_t tau_max_ps, std::int64_t bin_ps,
                                unsigned threads) {
    if (!events.is_sorted())
        throw std::invalid_argument("coincidence_histogram: event stream not sorted");
    return coincidence_histogram(events.channel_times(start_ch), events.channel_times(stop_ch),
                                 tau_min_ps, tau_max_ps, bin_ps, threads);
}

std::size_t G2Result::bin_at(double tau) const {
    std::size_t best = 0;
    double d = 1e300;
    for (std::size_t i = 0; i < tau_ns.size(); ++i) {
        double e = std::abs(tau_ns[i] - tau);
        if (e < d) {
            d = e;
            best = i;
        }
    }
    return best;
}

void G2Result::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("G2Result: cannot open " + path);
    os << "tau_ns,counts,g2,sigma\n";
    os.precision(10);
    for (std::size_t i = 0; i < tau_ns.size(); ++i)
        os << tau_ns[i] << ',' << counts[i] << ',' << g2[i] << ',' << sigma[i] << '\n';
}

G2Result normalize_g2(const Histogram& hist,
                      const std::vector<std::uint64_t>& starts,
                      const std::vector<std::uint64_t>& stops,
                      const G2Options& opt) {
    const std::size_t n = hist.counts.size();
    std::vector<double> acc(n, 0.0);

    if (opt.method == AccidentalMethod::TrialShifted) {
        if (opt.shift_period_ps <= 0)
            throw std::invalid_argument("normalize_g2: shift_period_ps required for TrialShifted");
        // accidental level from the same histogram displaced by whole trial
        // periods; the displaced copies share the gate-overlap structure of
        // the prompt histogram, so the ratio is bias-free at every tau
        std::int64_t span = std::int64_t(n) * hist.bin_ps;
        std::vector<double> raw(n, 0.0);
        for (unsigned k = 1; k <= opt.n_shifts; ++k) {
            for (int sgn : {-1, +1}) {
                std::int64_t off = sgn * std::int64_t(k) * opt.shift_period_ps;
                Histogram s = coincidence_histogram(starts, stops, hist.tau_min_ps + off,
                                                    hist.tau_min_ps + off + span, hist.bin_ps,
                                                    opt.threads);
                for (std::size_t i = 0; i < n; ++i) raw[i] += double(s.counts[i]);
            }
        }
        double inv = 1.0 / double(2 * opt.n_shifts);
        // moving average: the accidental floor is smooth on the bin scale
        unsigned w = std::max(1u, opt.smooth_bins);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t a = i >= w / 2 ? i - w / 2 : 0;
            std::size_t b = std::min(n, i + w / 2 + 1);
            double s = 0.0;
            for (std::size_t j = a; j < b; ++j) s += raw[j];
            acc[i] = s * inv / double(b - a);
        }
    } else {
        // mean of sideband bins away from the configured peak regions
        double s = 0.0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t tc = hist.tau_center_ps(i);
            bool excluded = false;
            for (const auto& [c, hw] : opt.sideband_exclusions_ps)
                if (std::llabs(tc - c) < hw) excluded = true;
            if (excluded) continue;
            s += double(hist.counts[i]);
            ++m;
        }
        if (m == 0) throw std::runtime_error("normalize_g2: no valid sideband region in window");
        std::fill(acc.begin(), acc.end(), s / double(m));
    }

    G2Result r;
    r.tau_ns.resize(n);
    r.counts = hist.counts;
    r.g2.resize(n);
    r.sigma.resize(n);
    r.accidental = acc;
    double mean_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.tau_ns[i] = double(hist.tau_center_ps(i)) * 1e-3;
        double a = acc[i];
        double c = double(hist.counts[i]);
        r.g2[i] = a > 0.0 ? c / a : 0.0;
        r.sigma[i] = (a > 0.0 && c > 0.0) ? r.g2[i] / std::sqrt(c) : 0.0;
        mean_acc += a;
    }
    r.mean_accidental = n ? mean_acc / double(n) : 0.0;
    return r;
}

CauchySchwarzResult cauchy_schwarz(double g2si_peak, double g2ss0, double g2ii0) {
    if (!(g2si_peak > 0.0) || !(g2ss0 > 0.0) || !(g2ii0 > 0.0))
        throw std::invalid_argument("cauchy_schwarz: inputs must be positive");
    CauchySchwarzResult r;
    r.r = g2si_peak * g2si_peak / (g2ss0 * g2ii0);
    r.nonclassical = r.r > 1.0;
    r.conservative_pass = g2si_peak > 2.0;
    return r;
}

EfficiencyEstimate efficiency_estimate(double n_echo, double n_ref_raw, double d0,
                                       double ref_scale) {
    if (d0 < 0.0) throw std::invalid_argument("efficiency_estimate: d0 must be >= 0");
    double corrected = n_ref_raw * ref_scale / std::exp(-d0);
    if (!(corrected > 0.0))
        throw std::invalid_argument("efficiency_estimate: nonpositive corrected reference");
    EfficiencyEstimate e;
    e.corrected_reference = corrected;
    e.eta = n_echo / corrected;
    // Poisson errors on both raw counts
    double rel2 = 0.0;
    if (n_echo > 0.0) rel2 += 1.0 / n_echo;
    if (n_ref_raw > 0.0) rel2 += 1.0 / n_ref_raw;
    e.sigma = e.eta * std::sqrt(rel2);
    return e;
}

void MultimodeResult::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("MultimodeResult: cannot open " + path);
    os << "k,cum_counts,g2,sigma\n";
    os.precision(10);
    for (std::size_t i = 0; i < cumulative_coincidences.size(); ++i)
        os << (i + 1) << ',' << cumulative_coincidences[i] << ',' << g2_integrated[i]
           << ',' << g2_sigma[i] << '\n';
}

MultimodeResult multimode_analysis(const EventStream& events, const MultimodeOptions& opt) {
    auto syncs = events.channel_times(Channel::Sync);
    if (syncs.empty()) throw std::invalid_argument("multimode_analysis: missing sync events");
    auto idlers = events.channel_times(Channel::Idler);
    auto signals = events.channel_times(Channel::Signal);
    check_sorted(idlers, "multimode_analysis");
    check_sorted(signals, "multimode_analysis");

    const std::int64_t tm = std::int64_t(opt.mode_duration_ns * 1e3);
    const std::size_t n_modes = std::size_t(opt.gate_ps / tm);
    const std::int64_t trial_ps = 2 * opt.gate_ps;

    // per-mode prompt and shifted (accidental) coincidence counts
    std::vector<std::uint64_t> prompt(n_modes, 0);
    std::vector<double> shifted(n_modes, 0.0);

    auto accumulate = [&](std::int64_t extra_shift, bool into_prompt) {
        // pair every idler with signals in the echo window, displaced by
        // extra_shift trial periods for the accidental estimate
        std::size_t a = 0, b = 0;
        for (std::size_t i = 0; i < idlers.size(); ++i) {
            std::int64_t t_emit = std::int64_t(idlers[i]) - opt.idler_delay_ps;
            // locate the pump gate via the last sync at or before emission
            auto it = std::upper_bound(syncs.begin(), syncs.end(), std::uint64_t(std::max<std::int64_t>(0, t_emit)));
            if (it == syncs.begin()) continue;
            std::int64_t gate_start = std::int64_t(*(it - 1));
            std::int64_t in_gate = t_emit - gate_start;
            if (in_gate < 0 || in_gate >= opt.gate_ps) continue;
            std::size_t mode = std::size_t(in_gate / tm);
            if (mode >= n_modes) continue;
            std::int64_t center = t_emit + opt.storage_ps + extra_shift;
            std::int64_t lo = center - opt.echo_half_window_ps;
            std::int64_t hi = center + opt.echo_half_window_ps;
            while (a < signals.size() && std::int64_t(signals[a]) < lo) ++a;
            if (b < a) b = a;
            while (b < signals.size() && std::int64_t(signals[b]) < hi) ++b;
            std::uint64_t c = b - a;
            if (into_prompt)
                prompt[mode] += c;
            else
                shifted[mode] += double(c);
        }
    };

    accumulate(0, true);
    for (unsigned k = 1; k <= opt.n_shifts; ++k) {
        accumulate(std::int64_t(k) * trial_ps, false);
        accumulate(-std::int64_t(k) * trial_ps, false);
    }
    for (auto& v : shifted) v /= double(2 * opt.n_shifts);

    MultimodeResult r;
    r.mode_duration_ns = opt.mode_duration_ns;
    r.n_modes = n_modes;
    r.cumulative_coincidences.resize(n_modes);
    r.g2_integrated.resize(n_modes);
    r.g2_sigma.resize(n_modes);
    std::uint64_t cum = 0;
    double cum_acc = 0.0;
    for (std::size_t k = 0; k < n_modes; ++k) {
        cum += prompt[k];
        cum_acc += shifted[k];
        r.cumulative_coincidences[k] = cum;
        if (cum_acc > 0.0) {
            r.g2_integrated[k] = double(cum) / cum_acc;
            r.g2_sigma[k] = cum > 0 ? r.g2_integrated[k] / std::sqrt(double(cum)) : 0.0;
        }
    }
    r.plateau_g2 = r.g2_integrated.back();
    r.plateau_sigma = r.g2_sigma.back();

    // R^2 of the linear fit of cumulative counts vs k
    double n = double(n_modes), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n_modes; ++k) {
        double x = double(k + 1), y = double(r.cumulative_coincidences[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double cov = sxy - sx * sy / n;
    double vx = sxx - sx * sx / n;
    double vy = syy - sy * sy / n;
    r.linearity_r2 = (vx > 0 && vy > 0) ? cov * cov / (vx * vy) : 0.0;
    return r;
}

FiberScenarioResult fiber_scenario_analysis(const EventStream& events,
                                            std::int64_t storage_ps,
                                            std::int64_t idler_delay_ps,
                                            const G2Options& opt) {
    auto idlers = events.channel_times(Channel::Idler);
    auto signals = events.channel_times(Channel::Signal);

    auto analyze_peak = [&](std::int64_t expected_tau) {
        std::int64_t half = 400000;  // +-400 ns window
        Histogram h = coincidence_histogram(idlers, signals, expected_tau - half,
                                            expected_tau + half, opt.bin_ps, opt.threads);
        G2Result g = normalize_g2(h, idlers, signals, opt);
        // peak = largest g2 bin in the window
        std::size_t best = 0;
        for (std::size_t i = 1; i < g.g2.size(); ++i)
            if (g.g2[i] > g.g2[best]) best = i;
        PeakReport p;
        p.tau_us = g.tau_ns[best] * 1e-3;
        p.g2 = g.g2[best];
        p.sigma = g.sigma[best];
        double excess = double(g.counts[best]) - g.accidental[best];
        p.significant = g.accidental[best] > 0.0 &&
                        excess >= 3.0 * std::sqrt(std::max(1.0, double(g.counts[best])));
        return p;
    };

    FiberScenarioResult r;
    r.transmission = analyze_peak(-idler_delay_ps);
    r.echo = analyze_peak(storage_ps - idler_delay_ps);
    if (!r.transmission.significant && !r.echo.significant)
        throw std::runtime_error("fiber_scenario_analysis: no significant peaks (SNR < 3)");
    r.heralded_before_release = r.echo.tau_us > 0.0;
    return r;
}

}  // namespace afc
