#pragma once

// Counter-based random streams: every trial draws from its own generator
// seeded by (seed, stream index), so results do not depend on scheduling
// or on how many trials preceded.

#include <cstdint>
#include <cmath>

namespace afc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** seeded via splitmix64 from (seed, stream).
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x2545f4914f6cdd1dULL);
        for (auto& w : s_) {
            x = splitmix64(x);
            w = x;
        }
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    double normal(double mean = 0.0, double sigma = 1.0) {
        // Box-Muller, one value per call
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(6.283185307179586 * u2);
    }

    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            double l = std::exp(-mean), p = 1.0;
            std::uint64_t k = 0;
            do {
                ++k;
                p *= uniform();
            } while (p > l);
            return k - 1;
        }
        // normal approximation for large means
        double v = std::round(normal(mean, std::sqrt(mean)));
        return v < 0.0 ? 0 : std::uint64_t(v);
    }

    // thermal (geometric on {0,1,...}) photon number with the given mean
    std::uint64_t thermal(double mean) {
        if (mean <= 0.0) return 0;
        double u = uniform();
        // P(n >= k) = (mean/(1+mean))^k
        return std::uint64_t(std::floor(std::log1p(-u) / std::log(mean / (1.0 + mean))));
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::uint64_t s_[4];
};

}  // namespace afc
