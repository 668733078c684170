#include "afc/pumping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace afc {

void HyperfineSystem::validate() const {
    for (std::size_t e = 0; e < kExcitedLevels; ++e) {
        double s = 0.0;
        for (double b : branching[e]) {
            if (b < 0.0) throw std::invalid_argument("HyperfineSystem: negative branching ratio");
            s += b;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw std::invalid_argument("HyperfineSystem: branching row does not sum to 1");
    }
    auto check_manifold = [](const auto& levels) {
        for (std::size_t i = 1; i < levels.size(); ++i) {
            double gap = levels[i] - levels[i - 1];
            if (gap < 288.0)
                throw std::invalid_argument("HyperfineSystem: splitting below 288 MHz");
        }
        if (levels.back() - levels.front() > 2623.0)
            throw std::invalid_argument("HyperfineSystem: splitting above 2623 MHz");
    };
    check_manifold(ground_levels_mhz);
    check_manifold(excited_levels_mhz);
    if (!(excited_lifetime_s > 0.0) || !(ground_relaxation_s > 0.0))
        throw std::invalid_argument("HyperfineSystem: lifetimes must be positive");
}

double PopulationState::sum() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

namespace {

using Vec = std::array<double, kLevels>;

// dp/dt for the hole-burning rate equations. Columns of the implied
// generator sum to zero, so every stage conserves the total population.
Vec derivative(const Vec& p, const HyperfineSystem& sys, const DriveRates& drive) {
    Vec d{};
    // stimulated rates, symmetric on each driven transition
    for (std::size_t t = 0; t < 4; ++t) {
        if (drive[t] <= 0.0) continue;
        std::size_t g = sys.transitions[t].ground;
        std::size_t e = kGroundLevels + sys.transitions[t].excited;
        double flow = drive[t] * (p[g] - p[e]);
        d[g] -= flow;
        d[e] += flow;
    }
    // spontaneous decay through the branching table
    double gamma = 1.0 / sys.excited_lifetime_s;
    for (std::size_t e = 0; e < kExcitedLevels; ++e) {
        std::size_t ie = kGroundLevels + e;
        double out = gamma * p[ie];
        d[ie] -= out;
        for (std::size_t g = 0; g < kGroundLevels; ++g)
            d[g] += out * sys.branching[e][g];
    }
    // ground-state cross-relaxation, pairwise exchange
    double r = 1.0 / sys.ground_relaxation_s;
    for (std::size_t i = 0; i < kGroundLevels; ++i)
        for (std::size_t j = i + 1; j < kGroundLevels; ++j) {
            double flow = r * (p[i] - p[j]);
            d[i] -= flow;
            d[j] += flow;
        }
    return d;
}

double shortest_timescale(const HyperfineSystem& sys, const DriveRates& drive) {
    double max_rate = 1.0 / sys.excited_lifetime_s + (kGroundLevels - 1) / sys.ground_relaxation_s;
    for (double r : drive) max_rate = std::max(max_rate, r + 1.0 / sys.excited_lifetime_s);
    return 1.0 / max_rate;
}

}  // namespace

PopulationState rate_step(const PopulationState& state, const HyperfineSystem& sys,
                          const DriveRates& drive, double dt) {
    for (double r : drive)
        if (r < 0.0) throw std::invalid_argument("rate_step: negative drive coefficient");
    if (dt > 0.1 * shortest_timescale(sys, drive))
        throw std::invalid_argument("rate_step: dt exceeds 0.1x shortest timescale");

    const Vec& p = state.p;
    Vec k1 = derivative(p, sys, drive);
    Vec tmp;
    for (std::size_t i = 0; i < kLevels; ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
    Vec k2 = derivative(tmp, sys, drive);
    for (std::size_t i = 0; i < kLevels; ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
    Vec k3 = derivative(tmp, sys, drive);
    for (std::size_t i = 0; i < kLevels; ++i) tmp[i] = p[i] + dt * k3[i];
    Vec k4 = derivative(tmp, sys, drive);

    PopulationState out;
    for (std::size_t i = 0; i < kLevels; ++i) {
        out.p[i] = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (out.p[i] < -1e-12)
            throw std::runtime_error("rate_step: negative population, dt too large");
    }
    return out;
}

PopulationState evolve(PopulationState state, const HyperfineSystem& sys,
                       const DriveRates& drive, double duration, double dt) {
    double t = 0.0;
    while (t < duration - 1e-15) {
        double step = std::min(dt, duration - t);
        state = rate_step(state, sys, drive, step);
        t += step;
    }
    return state;
}

std::vector<SequenceStep> PreparationSequence::expand() const {
    std::vector<SequenceStep> steps;
    double t = 0.0;
    std::size_t which = 1;  // cycle transitions (2),(3),(4)
    while (t < polarization_duration_s - 1e-12) {
        steps.push_back({which, step_duration_s, polarization_rate, band_lo_mhz, band_hi_mhz});
        which = which == 3 ? 1 : which + 1;
        t += step_duration_s;
    }
    steps.push_back({0, burn_duration_s, burn_rate, band_lo_mhz, band_hi_mhz});
    return steps;
}

void PreparationSequence::validate() const {
    comb.validate();
    if (strict_timing) {
        if (std::abs(polarization_duration_s - 0.2) > 1e-9 ||
            std::abs(step_duration_s - 1e-3) > 1e-9 ||
            std::abs(burn_duration_s - 0.05) > 1e-9)
            throw std::invalid_argument(
                "PreparationSequence: timing inconsistent with the 200 ms / 1 ms / 50 ms template (strict mode)");
    }
    if (band_hi_mhz <= band_lo_mhz)
        throw std::invalid_argument("PreparationSequence: empty band");
}

PreparationResult simulate_preparation(const HyperfineSystem& sys,
                                       const PreparationSequence& seq,
                                       const FrequencyGrid& grid,
                                       const EnvelopeParams& env,
                                       std::size_t n_classes) {
    sys.validate();
    seq.validate();
    if (n_classes < 8) throw std::invalid_argument("simulate_preparation: too few classes");

    // Populations depend only on whether a class sits in the chirped band and,
    // during the burn, on its phase within one comb period. Classes therefore
    // resolve the phase within a single period; the slow envelope multiplies
    // the depth afterwards.
    const double delta = seq.comb.delta_mhz;
    const double tooth = seq.comb.tooth_width_mhz();
    std::size_t n_phase = std::min<std::size_t>(n_classes, 1024);

    // polarization, common to every in-band class
    PopulationState polarized;
    {
        PopulationState s;
        for (const auto& st : seq.expand()) {
            if (st.transition == 0) break;  // burn handled phase-resolved below
            DriveRates d{0, 0, 0, 0};
            d[st.transition] = st.drive_rate;
            s = evolve(s, sys, d, st.duration_s, seq.dt_s);
        }
        polarized = s;
    }

    // burn, per phase class; anti-tooth classes see the drive on (1)
    std::vector<double> n4g(n_phase);
    for (std::size_t c = 0; c < n_phase; ++c) {
        double phase = (double(c) + 0.5) / double(n_phase);  // position in [0,1) of one period
        double dist = std::abs(phase - std::round(phase)) * delta;
        bool on_tooth = dist <= 0.5 * tooth;
        PopulationState s = polarized;
        if (!on_tooth) {
            DriveRates d{seq.burn_rate, 0, 0, 0};
            s = evolve(s, sys, d, seq.burn_duration_s, seq.dt_s);
        } else {
            s = evolve(s, sys, DriveRates{0, 0, 0, 0}, seq.burn_duration_s, seq.dt_s);
        }
        n4g[c] = s.p[3];
    }

    // relaxed, undriven population outside the band
    double n4g_out = evolve(PopulationState{}, sys, DriveRates{0, 0, 0, 0},
                            seq.polarization_duration_s + seq.burn_duration_s, seq.dt_s).p[3];

    PreparationResult res;
    res.profile = inhomogeneous_envelope(grid, env);
    double tooth_acc = 0.0, anti_acc = 0.0;
    std::size_t tooth_n = 0, anti_n = 0;
    const double band_c = 0.5 * (seq.band_lo_mhz + seq.band_hi_mhz);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        double f = grid.freq_at(i);
        if (f < seq.band_lo_mhz || f > seq.band_hi_mhz) {
            res.profile.optical_depth[i] *= n4g_out;
            continue;
        }
        double u = (f - band_c) / delta;
        double phase = u - std::floor(u);
        std::size_t c = std::min<std::size_t>(std::size_t(phase * double(n_phase)), n_phase - 1);
        res.profile.optical_depth[i] *= n4g[c];
        double dist = std::abs(phase - std::round(phase)) * delta;
        if (dist <= 0.5 * tooth) {
            tooth_acc += res.profile.optical_depth[i];
            ++tooth_n;
        } else {
            anti_acc += res.profile.optical_depth[i];
            ++anti_n;
        }
    }
    res.tooth_depth = tooth_n ? tooth_acc / double(tooth_n) : 0.0;
    res.antitooth_depth = anti_n ? anti_acc / double(anti_n) : 0.0;
    // in-band polarization before the burn carves the anti-teeth
    res.in_band_polarization = polarized.p[3];
    return res;
}

}  // namespace afc
