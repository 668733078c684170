#pragma once

// Frequency-domain types shared by the physics modules: detuning grids,
// optical-depth profiles, comb descriptions and the overlap/absorption
// arithmetic built on them. Detunings are in MHz relative to the line
// center of the memory transition, optical depths are dimensionless
// Beer-Lambert exponents.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace afc {

struct FrequencyGrid {
    double center_offset_mhz = 0.0;
    double span_mhz = 400.0;
    std::size_t n_points = 1u << 20;

    FrequencyGrid() = default;
    FrequencyGrid(double center_mhz, double span, std::size_t n);

    double spacing_mhz() const { return span_mhz / double(n_points - 1); }
    double min_mhz() const { return center_offset_mhz - 0.5 * span_mhz; }
    double max_mhz() const { return center_offset_mhz + 0.5 * span_mhz; }
    double freq_at(std::size_t i) const { return min_mhz() + spacing_mhz() * double(i); }
    // Nearest grid index, clamped to the grid.
    std::size_t index_of(double f_mhz) const;

    bool operator==(const FrequencyGrid&) const = default;
};

enum class ToothShape { Square, Gaussian };

// Parametric description of a target AFC. Tooth FWHM is delta/finesse,
// storage time is 1/delta.
struct CombSpec {
    double bandwidth_mhz = 100.0;
    double delta_mhz = 0.04;           // comb periodicity
    double finesse = 2.0;              // F = delta / tooth FWHM
    ToothShape tooth_shape = ToothShape::Square;
    double peak_depth = 2.0;           // d, added on top of background
    double background_depth = 0.2;     // d0
    double center_offset_mhz = 0.0;    // band center on the grid

    double tooth_width_mhz() const { return delta_mhz / finesse; }
    std::size_t n_teeth() const { return std::size_t(bandwidth_mhz / delta_mhz); }
    double storage_time_us() const { return 1.0 / delta_mhz; }  // 1/delta in us when delta is MHz
    void validate() const;  // throws std::invalid_argument
};

struct SpectralProfile {
    FrequencyGrid grid;
    std::vector<double> optical_depth;  // d(delta) >= 0, one value per grid point

    SpectralProfile() = default;
    explicit SpectralProfile(const FrequencyGrid& g, double fill = 0.0);

    double& at(std::size_t i) { return optical_depth[i]; }
    double at(std::size_t i) const { return optical_depth[i]; }
};

// Inhomogeneous-envelope constants of the nominal crystal.
// alpha = 1.6 cm^-1, L = 1.2 cm, Gaussian FWHM 1.3 GHz, quadruple pass.
struct EnvelopeParams {
    double alpha_per_cm = 1.6;
    double length_cm = 1.2;
    double fwhm_mhz = 1300.0;
    int passes = 4;
    double peak_depth() const { return alpha_per_cm * length_cm * passes; }
};

// Fresh memory: Gaussian inhomogeneous envelope, peak d = passes * alpha * L.
SpectralProfile inhomogeneous_envelope(const FrequencyGrid& grid,
                                       const EnvelopeParams& env = {});

// Lorentzian photon line shape, normalized to unit integral over the grid
// span when sampled (truncation at the grid edges is renormalized away).
struct LorentzianLine {
    double center_mhz = 150.0;
    double fwhm_mhz = 64.0;
    double density(double f_mhz) const;  // un-normalized 1/(1+(2(f-f0)/G)^2)
};

// d(delta) = d * T(delta) + d0 with T the periodic tooth indicator.
// Teeth are centered on multiples of delta around the band center and span
// the bandwidth; outside the band the profile equals d0.
// Throws if the grid is too coarse (< 8 samples per tooth FWHM) or the
// band does not fit in the grid span.
SpectralProfile build_comb_profile(const CombSpec& spec, const FrequencyGrid& grid);

// Pump a transparency window: d := residual inside [f_lo, f_hi], unchanged
// outside. Throws if the window lies outside the grid span.
SpectralProfile burn_transparency(const SpectralProfile& profile,
                                  double f_lo_mhz, double f_hi_mhz,
                                  double residual_depth);

// integral S(delta) * (1 - exp(-d(delta))) ddelta by grid quadrature,
// with S the truncated-and-renormalized line shape. Result in [0, 1].
double absorbed_fraction(const SpectralProfile& profile, const LorentzianLine& line);

// Spectrum-weighted direct transmission, integral S(delta) exp(-d) ddelta.
double transmitted_fraction(const SpectralProfile& profile, const LorentzianLine& line);

// Boxcar average of the depth over one comb period. A photon much shorter
// than 1/delta sees this coarse profile for prompt absorption; the comb
// fine structure only shows up in the delayed echo.
SpectralProfile period_averaged(const SpectralProfile& profile, double delta_mhz);

// Two-column text format: detuning_MHz optical_depth.
void write_profile(const SpectralProfile& profile, std::ostream& os);
void write_profile(const SpectralProfile& profile, const std::string& path);
SpectralProfile read_profile(std::istream& is);
SpectralProfile read_profile_file(const std::string& path);

}  // namespace afc
