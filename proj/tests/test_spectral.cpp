#include <doctest.h>

#include <cmath>
#include <sstream>

#include "afc/spectral.hpp"

using namespace afc;

TEST_CASE("comb spec derived quantities") {
    CombSpec s;
    s.bandwidth_mhz = 100.0;
    s.delta_mhz = 0.04;
    s.finesse = 2.0;
    s.peak_depth = 2.0;
    s.background_depth = 0.2;
    CHECK(s.n_teeth() == 2500);
    CHECK(s.tooth_width_mhz() == doctest::Approx(0.02));
    CHECK(s.storage_time_us() == doctest::Approx(25.0));
    CHECK_NOTHROW(s.validate());

    s.finesse = 0.5;
    CHECK_THROWS(s.validate());
}

TEST_CASE("comb profile: tooth depth and background") {
    CombSpec s;
    s.bandwidth_mhz = 10.0;
    s.delta_mhz = 0.1;
    s.finesse = 2.0;
    s.peak_depth = 2.0;
    s.background_depth = 0.2;
    FrequencyGrid g(0.0, 20.0, 1u << 15);
    SpectralProfile p = build_comb_profile(s, g);

    // teeth sit on multiples of delta around the band center
    std::size_t i_center = g.index_of(0.0);
    CHECK(p.at(i_center) == doctest::Approx(2.2));
    std::size_t i_anti = g.index_of(0.05);
    CHECK(p.at(i_anti) == doctest::Approx(0.2));
    std::size_t i_out = g.index_of(8.0);
    CHECK(p.at(i_out) == doctest::Approx(0.2));

    // mean added depth over the band approaches d/F
    double mean = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.n_points; ++i) {
        double f = g.freq_at(i);
        if (f < -5.0 || f > 5.0) continue;
        mean += p.at(i) - 0.2;
        ++n;
    }
    mean /= double(n);
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("vanishing tooth width removes added depth") {
    CombSpec s;
    s.bandwidth_mhz = 10.0;
    s.delta_mhz = 0.1;
    s.peak_depth = 2.0;
    s.background_depth = 0.0;
    FrequencyGrid g(0.0, 20.0, 1u << 18);
    double prev = 1e300;
    for (double f : {4.0, 16.0, 64.0}) {
        s.finesse = f;
        SpectralProfile p = build_comb_profile(s, g);
        double mean = 0.0;
        for (std::size_t i = 0; i < g.n_points; ++i) mean += p.at(i);
        mean /= double(g.n_points);
        CHECK(mean < prev);
        prev = mean;
    }
    CHECK(prev < 0.05);  // duty 1/64 over half the grid
}

TEST_CASE("grid too coarse for the teeth throws") {
    CombSpec s;
    s.bandwidth_mhz = 100.0;
    s.delta_mhz = 0.04;
    s.finesse = 2.0;
    FrequencyGrid g(0.0, 400.0, 1u << 10);  // 0.39 MHz spacing vs 20 kHz teeth
    CHECK_THROWS(build_comb_profile(s, g));
}

TEST_CASE("inhomogeneous envelope peak depth") {
    EnvelopeParams env;
    CHECK(env.peak_depth() == doctest::Approx(7.68));
    FrequencyGrid g(0.0, 4000.0, 1u << 14);
    SpectralProfile p = inhomogeneous_envelope(g, env);
    CHECK(p.at(g.index_of(0.0)) == doctest::Approx(7.68).epsilon(1e-3));
    // half depth at +-FWHM/2
    CHECK(p.at(g.index_of(650.0)) == doctest::Approx(3.84).epsilon(1e-2));
}

TEST_CASE("absorbed fraction quadrature oracle: flat depth") {
    // uniform depth d everywhere: absorbed = 1 - exp(-d) regardless of line
    FrequencyGrid g(150.0, 2000.0, 1u << 14);
    SpectralProfile p(g, 1.3);
    LorentzianLine line{150.0, 64.0};
    CHECK(absorbed_fraction(p, line) == doctest::Approx(1.0 - std::exp(-1.3)).epsilon(1e-6));
    CHECK(transmitted_fraction(p, line) == doctest::Approx(std::exp(-1.3)).epsilon(1e-6));
    CHECK(absorbed_fraction(p, line) + transmitted_fraction(p, line) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("absorbed fraction: saturated band matches the analytic line weight") {
    // opaque inside [100, 200], transparent outside: absorbed equals the
    // line-shape weight of the band, (2/pi) atan(50/32) with tail
    // renormalization on the finite grid
    FrequencyGrid g(150.0, 10000.0, 1u << 16);
    SpectralProfile p(g, 0.0);
    for (std::size_t i = 0; i < g.n_points; ++i) {
        double f = g.freq_at(i);
        if (f >= 100.0 && f <= 200.0) p.at(i) = 60.0;
    }
    LorentzianLine line{150.0, 64.0};
    double w = absorbed_fraction(p, line);
    double analytic = 2.0 / 3.141592653589793 * std::atan(50.0 / 32.0);
    CHECK(w == doctest::Approx(analytic).epsilon(0.01));
}

TEST_CASE("period averaging of a square comb") {
    CombSpec s;
    s.bandwidth_mhz = 10.0;
    s.delta_mhz = 0.1;
    s.finesse = 2.0;
    s.peak_depth = 2.0;
    s.background_depth = 0.2;
    FrequencyGrid g(0.0, 20.0, 1u << 16);
    SpectralProfile coarse = period_averaged(build_comb_profile(s, g), s.delta_mhz);
    // inside the band the boxcar average is d/F + d0
    CHECK(coarse.at(g.index_of(0.0)) == doctest::Approx(1.2).epsilon(0.01));
    CHECK(coarse.at(g.index_of(2.025)) == doctest::Approx(1.2).epsilon(0.01));
}

TEST_CASE("burn transparency and profile IO round trip") {
    FrequencyGrid g(0.0, 100.0, 1u << 10);
    SpectralProfile env = inhomogeneous_envelope(g);
    SpectralProfile burned = burn_transparency(env, -10.0, 10.0, 0.2);
    CHECK(burned.at(g.index_of(0.0)) == doctest::Approx(0.2));
    CHECK(burned.at(g.index_of(30.0)) == doctest::Approx(env.at(g.index_of(30.0))));
    CHECK_THROWS(burn_transparency(env, -500.0, 10.0, 0.2));

    std::stringstream ss;
    write_profile(burned, ss);
    SpectralProfile back = read_profile(ss);
    REQUIRE(back.optical_depth.size() == burned.optical_depth.size());
    for (std::size_t i = 0; i < back.optical_depth.size(); i += 97)
        CHECK(back.at(i) == doctest::Approx(burned.at(i)).epsilon(1e-9));
}
