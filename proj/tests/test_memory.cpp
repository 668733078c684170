#include <doctest.h>

#include <cmath>

#include "afc/memory.hpp"
#include "afc/spectral.hpp"

using namespace afc;

TEST_CASE("parametric echo efficiency pinned values") {
    // d = 2.15, F = 2, d0 = 0.2 with 5 us decay reproduces the broad-band point
    double eta = echo_efficiency_parametric(2.15, 2.0, 0.2);
    CHECK(eta * decay_factor(5.0, 69.0) == doctest::Approx(0.098).epsilon(0.01));
    // limits
    CHECK_THROWS(echo_efficiency_parametric(0.0, 2.0, 0.0));
    CHECK(echo_efficiency_parametric(1e-12, 2.0, 0.0) == doctest::Approx(0.0));
    CHECK(echo_efficiency_parametric(1.0, 2.0, 0.0) <
          echo_efficiency_parametric(2.0, 2.0, 0.0));
    // d0 only attenuates
    CHECK(echo_efficiency_parametric(2.0, 2.0, 0.5) ==
          doctest::Approx(echo_efficiency_parametric(2.0, 2.0, 0.0) * std::exp(-0.5)));
}

TEST_CASE("decay factor pinned values") {
    CHECK(decay_factor(5.0, 69.0) == doctest::Approx(0.748).epsilon(1e-3));
    CHECK(decay_factor(20.0, 69.0) == doctest::Approx(std::exp(-80.0 / 69.0)).epsilon(1e-12));
    CHECK(std::exp(-80.0 / 69.0) == doctest::Approx(0.314).epsilon(2e-3));
    CHECK(decay_factor(0.0, 69.0) == doctest::Approx(1.0));
}

TEST_CASE("efficiency derivative matches finite differences") {
    const double h = 1e-6;
    for (double d : {0.5, 2.0, 7.68}) {
        for (double f : {2.0, 3.0, 4.0, 8.0}) {
            double fd = (echo_efficiency_parametric(d, f + h, 0.2) -
                         echo_efficiency_parametric(d, f - h, 0.2)) /
                        (2.0 * h);
            CHECK(echo_efficiency_dF(d, f, 0.2) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("optimal finesse: golden section agrees with a grid scan") {
    for (double d : {1.0, 2.0, 7.68}) {
        double f_star = optimal_finesse(d, 0.2);
        // derivative vanishes at the optimum
        CHECK(std::abs(echo_efficiency_dF(d, f_star, 0.2)) < 1e-6);
        double best_f = 0.0, best = -1.0;
        for (double f = 1.01; f < 64.0; f += 0.001) {
            double e = echo_efficiency_parametric(d, f, 0.2);
            if (e > best) { best = e; best_f = f; }
        }
        CHECK(f_star == doctest::Approx(best_f).epsilon(1e-2));
        CHECK(echo_efficiency_parametric(d, f_star, 0.2) >= best - 1e-9);
    }
}

TEST_CASE("profile route agrees with the parametric formula for square combs") {
    for (double d : {0.5, 2.0, 7.68}) {
        for (double f : {2.0, 4.0, 8.0}) {
            CombSpec s;
            s.bandwidth_mhz = 20.0;
            s.delta_mhz = 0.1;
            s.finesse = f;
            s.peak_depth = d;
            s.background_depth = 0.2;
            FrequencyGrid g(0.0, 40.0, 1u << 16);
            SpectralProfile p = build_comb_profile(s, g);
            double num = echo_efficiency_from_profile(p, s.delta_mhz, -10.0, 10.0);
            double par = echo_efficiency_parametric(d, f, 0.2);
            CHECK(num == doctest::Approx(par).epsilon(0.05));
        }
    }
}

TEST_CASE("profile route needs at least three teeth in the band") {
    CombSpec s;
    s.bandwidth_mhz = 20.0;
    s.delta_mhz = 0.1;
    FrequencyGrid g(0.0, 40.0, 1u << 16);
    SpectralProfile p = build_comb_profile(s, g);
    CHECK_THROWS(echo_efficiency_from_profile(p, s.delta_mhz, -0.1, 0.1));
}

TEST_CASE("resolve_memory splits absorption between echo and transmission") {
    MemoryParams mp;
    mp.comb.bandwidth_mhz = 100.0;
    mp.comb.delta_mhz = 0.2;  // 5 us preset
    mp.comb.finesse = 2.0;
    mp.comb.peak_depth = 1.55;
    mp.comb.background_depth = 0.2;
    mp.comb.center_offset_mhz = 150.0;
    FrequencyGrid g(150.0, 2000.0, 1u << 18);
    MemoryResponse r = resolve_memory(mp, g);

    CHECK(r.p_echo > 0.0);
    CHECK(r.p_trans > 0.0);
    CHECK(r.p_echo + r.p_trans < 1.0);
    // echo bounded by absorbed x parametric efficiency x decay
    double cap = echo_efficiency_parametric(1.55, 2.0, 0.2) * decay_factor(5.0, 69.0);
    CHECK(r.p_echo < cap);
    CHECK(r.p_echo > 0.3 * cap);
    // most of the out-of-band Lorentzian wing passes straight through
    CHECK(r.p_trans > 0.3);
}

TEST_CASE("apply_memory: echoes arrive one storage time late") {
    MemoryParams mp;
    mp.comb.delta_mhz = 0.2;  // 5 us storage
    mp.comb.bandwidth_mhz = 100.0;
    mp.echo_sigma_ns = 0.0;
    MemoryResponse resp;
    resp.p_echo = 1.0;
    resp.p_trans = 0.0;

    EventStream in;
    in.events.push_back({1'000'000'000, Channel::Signal, 0});
    in.events.push_back({1'000'000'000, Channel::Idler, 0});
    EventStream out = apply_memory(in, mp, resp, 42);
    REQUIRE(out.events.size() == 2);
    CHECK(out.is_sorted());
    auto sig = out.channel_times(Channel::Signal);
    REQUIRE(sig.size() == 1);
    CHECK(sig[0] == 1'000'000'000 + 5'000'000);  // + 1/delta in ps
    // idler untouched
    CHECK(out.channel_times(Channel::Idler)[0] == 1'000'000'000);
}

TEST_CASE("apply_memory branching statistics follow the response probabilities") {
    MemoryParams mp;
    mp.comb.delta_mhz = 0.2;
    mp.comb.bandwidth_mhz = 100.0;
    MemoryResponse resp;
    resp.p_echo = 0.3;
    resp.p_trans = 0.5;

    EventStream in;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i)
        in.events.push_back({std::uint64_t(1'000'000) * (i + 1), Channel::Signal, 0});
    EventStream out = apply_memory(in, mp, resp, 7);
    std::size_t echoes = 0, prompt = 0;
    for (const auto& e : out.events) {
        // storage shift is 5e6 ps; events on the 1e6 grid are prompt
        if (e.time_ps % 1'000'000 == 0) ++prompt; else ++echoes;
    }
    double p_e = double(echoes) / double(n);
    double p_t = double(prompt) / double(n);
    CHECK(p_e == doctest::Approx(0.3).epsilon(0.05));
    CHECK(p_t == doctest::Approx(0.5).epsilon(0.05));
}
