#include <doctest.h>

#include <cmath>

#include "afc/pumping.hpp"

using namespace afc;

TEST_CASE("hyperfine system validation") {
    HyperfineSystem sys;
    CHECK_NOTHROW(sys.validate());
    HyperfineSystem bad = sys;
    bad.branching[0][0] = 0.5;  // row no longer sums to 1
    CHECK_THROWS(bad.validate());
    bad = sys;
    bad.ground_levels_mhz[1] = 100.0;  // splitting below the quoted range
    CHECK_THROWS(bad.validate());
}

TEST_CASE("rate step conserves population and respects the dt guard") {
    HyperfineSystem sys;
    PopulationState s;
    s.p = {0.4, 0.3, 0.2, 0.1, 0, 0, 0, 0};
    DriveRates drive{2e3, 0, 0, 0};
    PopulationState out = rate_step(s, sys, drive, 2e-5);
    CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(rate_step(s, sys, drive, 1e-2));
    CHECK_THROWS(rate_step(s, sys, DriveRates{-1.0, 0, 0, 0}, 1e-6));
}

TEST_CASE("undriven excited population decays at 1/T1 through the branching table") {
    HyperfineSystem sys;
    sys.ground_relaxation_s = 1e9;  // freeze ground exchange for this check
    PopulationState s;
    s.p = {0, 0, 0, 0, 1.0, 0, 0, 0};
    double t = 5e-4;
    PopulationState out = evolve(s, sys, DriveRates{0, 0, 0, 0}, t, 1e-5);
    double surv = std::exp(-t / sys.excited_lifetime_s);
    CHECK(out.p[kGroundLevels] == doctest::Approx(surv).epsilon(1e-6));
    // equal branching: the decayed share splits evenly over the ground levels
    for (std::size_t g = 0; g < kGroundLevels; ++g)
        CHECK(out.p[g] == doctest::Approx(0.25 * (1.0 - surv)).epsilon(1e-6));
}

TEST_CASE("RK4 step-halving oracle") {
    HyperfineSystem sys;
    DriveRates drive{1.5e3, 0, 400.0, 0};
    PopulationState a = evolve(PopulationState{}, sys, drive, 2e-3, 2e-5);
    PopulationState b = evolve(PopulationState{}, sys, drive, 2e-3, 2.5e-6);
    for (std::size_t i = 0; i < kLevels; ++i)
        CHECK(a.p[i] == doctest::Approx(b.p[i]).epsilon(1e-6));
}

TEST_CASE("driven steady state empties the pumped ground level") {
    HyperfineSystem sys;
    sys.ground_relaxation_s = 1e6;
    PopulationState s = evolve(PopulationState{}, sys, DriveRates{0, 2e3, 0, 0}, 0.05, 2e-5);
    // transition (2) drives |3g> -> |1e>; the level drains into the others
    CHECK(s.p[2] < 0.01);
    CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sequence template expansion and strict timing") {
    PreparationSequence seq;
    auto steps = seq.expand();
    // 200 polarization steps cycling (2),(3),(4) plus the final burn on (1)
    REQUIRE(steps.size() == 201);
    CHECK(steps[0].transition == 1);
    CHECK(steps[1].transition == 2);
    CHECK(steps[2].transition == 3);
    CHECK(steps[3].transition == 1);
    CHECK(steps.back().transition == 0);
    CHECK(steps.back().duration_s == doctest::Approx(0.05));
    CHECK_NOTHROW(seq.validate());

    seq.burn_duration_s = 0.04;
    CHECK_THROWS(seq.validate());
    seq.strict_timing = false;
    CHECK_NOTHROW(seq.validate());
}

TEST_CASE("preparation carves a polarized comb") {
    HyperfineSystem sys;
    PreparationSequence seq;
    seq.comb.bandwidth_mhz = 100.0;
    seq.comb.delta_mhz = 1.0;  // coarse comb keeps the grid small
    seq.comb.finesse = 2.0;
    FrequencyGrid grid(150.0, 400.0, 1u << 13);
    PreparationResult res = simulate_preparation(sys, seq, grid, {}, 64);

    CHECK(res.in_band_polarization > 0.9);
    // teeth deeper than the fresh envelope thanks to the polarization gain
    CHECK(res.tooth_depth > 1.9 * 0.25 * EnvelopeParams{}.peak_depth());
    CHECK(res.antitooth_depth < 0.05 * res.tooth_depth);
    // out-of-band depth relaxes toward the unpolarized envelope
    double out_depth = res.profile.at(res.profile.grid.index_of(320.0));
    double fresh = inhomogeneous_envelope(grid).at(grid.index_of(320.0));
    CHECK(out_depth == doctest::Approx(0.25 * fresh).epsilon(0.1));
}
