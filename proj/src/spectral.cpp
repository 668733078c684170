#include "afc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace afc {

FrequencyGrid::FrequencyGrid(double center_mhz, double span, std::size_t n)
    : center_offset_mhz(center_mhz), span_mhz(span), n_points(n) {
    if (n_points < 2)
        throw std::invalid_argument("FrequencyGrid: n_points must be >= 2");
    if (!(span_mhz > 0.0))
        throw std::invalid_argument("FrequencyGrid: span must be positive");
}

std::size_t FrequencyGrid::index_of(double f_mhz) const {
    double x = (f_mhz - min_mhz()) / spacing_mhz();
    if (x < 0.0) return 0;
    std::size_t i = std::size_t(std::lround(x));
    return std::min(i, n_points - 1);
}

void CombSpec::validate() const {
    if (!(delta_mhz > 0.0)) throw std::invalid_argument("CombSpec: delta must be positive");
    if (!(bandwidth_mhz > 0.0)) throw std::invalid_argument("CombSpec: bandwidth must be positive");
    if (!(finesse > 1.0)) throw std::invalid_argument("CombSpec: finesse must be > 1");
    if (!(peak_depth > background_depth) || background_depth < 0.0)
        throw std::invalid_argument("CombSpec: need d > d0 >= 0");
}

SpectralProfile::SpectralProfile(const FrequencyGrid& g, double fill)
    : grid(g), optical_depth(g.n_points, fill) {}

SpectralProfile inhomogeneous_envelope(const FrequencyGrid& grid, const EnvelopeParams& env) {
    SpectralProfile p(grid);
    const double d0 = env.peak_depth();
    const double sig = env.fwhm_mhz / 2.3548200450309493;  // FWHM -> sigma
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        double f = grid.freq_at(i);
        p.optical_depth[i] = d0 * std::exp(-0.5 * f * f / (sig * sig));
    }
    return p;
}

double LorentzianLine::density(double f_mhz) const {
    double x = 2.0 * (f_mhz - center_mhz) / fwhm_mhz;
    return 1.0 / (1.0 + x * x);
}

SpectralProfile build_comb_profile(const CombSpec& spec, const FrequencyGrid& grid) {
    spec.validate();
    const double tooth = spec.tooth_width_mhz();
    if (grid.spacing_mhz() > tooth / 8.0)
        throw std::invalid_argument("build_comb_profile: grid too coarse, need >= 8 samples per tooth FWHM");
    const double lo = spec.center_offset_mhz - 0.5 * spec.bandwidth_mhz;
    const double hi = spec.center_offset_mhz + 0.5 * spec.bandwidth_mhz;
    if (lo < grid.min_mhz() - 1e-9 || hi > grid.max_mhz() + 1e-9)
        throw std::invalid_argument("build_comb_profile: bandwidth exceeds grid span");

    SpectralProfile p(grid, spec.background_depth);
    const double d = spec.peak_depth;
    const double gsig = tooth / 2.3548200450309493;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        double f = grid.freq_at(i);
        if (f < lo || f > hi) continue;
        // distance to the nearest tooth center (teeth on multiples of delta
        // around the band center)
        double u = (f - spec.center_offset_mhz) / spec.delta_mhz;
        double frac = u - std::round(u);
        double dist = std::abs(frac) * spec.delta_mhz;
        if (spec.tooth_shape == ToothShape::Square) {
            if (dist <= 0.5 * tooth) p.optical_depth[i] += d;
        } else {
            p.optical_depth[i] += d * std::exp(-0.5 * dist * dist / (gsig * gsig));
        }
    }
    return p;
}

SpectralProfile burn_transparency(const SpectralProfile& profile,
                                  double f_lo_mhz, double f_hi_mhz,
                                  double residual_depth) {
    const auto& g = profile.grid;
    if (f_lo_mhz > f_hi_mhz)
        throw std::invalid_argument("burn_transparency: inverted window");
    if (f_lo_mhz < g.min_mhz() - 1e-9 || f_hi_mhz > g.max_mhz() + 1e-9)
        throw std::invalid_argument("burn_transparency: window outside grid");
    SpectralProfile out = profile;
    for (std::size_t i = 0; i < g.n_points; ++i) {
        double f = g.freq_at(i);
        if (f >= f_lo_mhz && f <= f_hi_mhz) out.optical_depth[i] = residual_depth;
    }
    return out;
}

namespace {
// Trapezoid weights: interior points weight 1, end points 1/2.
inline double trap_w(std::size_t i, std::size_t n) {
    return (i == 0 || i == n - 1) ? 0.5 : 1.0;
}
}  // namespace

double absorbed_fraction(const SpectralProfile& profile, const LorentzianLine& line) {
    const auto& g = profile.grid;
    double norm = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < g.n_points; ++i) {
        double s = line.density(g.freq_at(i)) * trap_w(i, g.n_points);
        norm += s;
        acc += s * (1.0 - std::exp(-profile.optical_depth[i]));
    }
    if (norm <= 0.0) throw std::runtime_error("absorbed_fraction: degenerate line shape");
    double f = acc / norm;
    return std::clamp(f, 0.0, 1.0);
}

double transmitted_fraction(const SpectralProfile& profile, const LorentzianLine& line) {
    const auto& g = profile.grid;
    double norm = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < g.n_points; ++i) {
        double s = line.density(g.freq_at(i)) * trap_w(i, g.n_points);
        norm += s;
        acc += s * std::exp(-profile.optical_depth[i]);
    }
    return std::clamp(acc / norm, 0.0, 1.0);
}

SpectralProfile period_averaged(const SpectralProfile& profile, double delta_mhz) {
    if (!(delta_mhz > 0.0))
        throw std::invalid_argument("period_averaged: delta must be positive");
    const auto& g = profile.grid;
    std::size_t half = std::size_t(0.5 * delta_mhz / g.spacing_mhz());
    if (half == 0) return profile;
    // prefix sums for the boxcar
    std::vector<double> ps(g.n_points + 1, 0.0);
    for (std::size_t i = 0; i < g.n_points; ++i) ps[i + 1] = ps[i] + profile.optical_depth[i];
    SpectralProfile out(g);
    for (std::size_t i = 0; i < g.n_points; ++i) {
        std::size_t a = i > half ? i - half : 0;
        std::size_t b = std::min(i + half + 1, g.n_points);
        out.optical_depth[i] = (ps[b] - ps[a]) / double(b - a);
    }
    return out;
}

void write_profile(const SpectralProfile& profile, std::ostream& os) {
    os.precision(12);
    for (std::size_t i = 0; i < profile.grid.n_points; ++i)
        os << profile.grid.freq_at(i) << ' ' << profile.optical_depth[i] << '\n';
}

void write_profile(const SpectralProfile& profile, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_profile: cannot open " + path);
    write_profile(profile, os);
}

SpectralProfile read_profile(std::istream& is) {
    std::vector<double> f, d;
    double a, b;
    while (is >> a >> b) {
        f.push_back(a);
        d.push_back(b);
    }
    if (f.size() < 2) throw std::runtime_error("read_profile: need at least two points");
    SpectralProfile p;
    p.grid = FrequencyGrid(0.5 * (f.front() + f.back()), f.back() - f.front(), f.size());
    p.optical_depth = std::move(d);
    return p;
}

SpectralProfile read_profile_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_profile: cannot open " + path);
    return read_profile(is);
}

}  // namespace afc
