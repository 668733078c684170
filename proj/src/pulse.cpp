#include "afc/pulse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace afc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

// In-place forward (-1) or backward (+1) DFT, unnormalized.
void dft(std::vector<std::complex<double>>& data, int sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        plan = fftw_plan_dft_1d(int(data.size()),
                                reinterpret_cast<fftw_complex*>(data.data()),
                                reinterpret_cast<fftw_complex*>(data.data()),
                                sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
}

void normalize_peak(PulseWaveform& w) {
    double peak = 0.0;
    for (const auto& a : w.envelope) peak = std::max(peak, std::abs(a));
    if (peak <= 0.0) throw std::runtime_error("waveform is identically zero");
    for (auto& a : w.envelope) a /= peak;
}

}  // namespace

PulseWaveform sech_chirp(const SechChirpParams& p) {
    if (!(p.chirp_bandwidth_mhz >= 0.0) || !(p.duration > 0.0))
        throw std::invalid_argument("sech_chirp: bad bandwidth or duration");
    double f_max = (std::abs(p.center_frequency_mhz) + p.chirp_bandwidth_mhz) * 1e6;
    if (p.sample_rate < 8.0 * f_max)
        throw std::invalid_argument("sech_chirp: sample rate below 8x max frequency");

    const std::size_t n = std::size_t(std::llround(p.sample_rate * p.duration));
    PulseWaveform w;
    w.sample_rate = p.sample_rate;
    w.duration = p.duration;
    w.envelope.resize(n);

    const double t0 = 0.5 * p.duration;
    const double beta = p.truncation;
    const double f_c = p.center_frequency_mhz * 1e6;
    const double bw = p.chirp_bandwidth_mhz * 1e6;
    // f_inst(t) = f_c + (bw/2) tanh(beta (t-t0)/t0)
    // phi(t) = 2 pi [ f_c (t-t0) + (bw/2) (t0/beta) log cosh(beta (t-t0)/t0) ]
    for (std::size_t i = 0; i < n; ++i) {
        double t = (double(i) + 0.5) / p.sample_rate;
        double x = beta * (t - t0) / t0;
        double amp = 1.0 / std::cosh(x);
        // log(cosh x) computed overflow-safe
        double lc = std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::log(2.0);
        double phi = 2.0 * kPi * (f_c * (t - t0) + 0.5 * bw * (t0 / beta) * lc);
        w.envelope[i] = std::polar(amp, phi);
    }
    normalize_peak(w);
    return w;
}

std::vector<double> schroeder_phases(std::size_t n_tones) {
    if (n_tones < 1) throw std::invalid_argument("schroeder_phases: need n >= 1");
    std::vector<double> th(n_tones);
    for (std::size_t k = 0; k < n_tones; ++k)
        th[k] = kPi * double(k) * double(k) / double(n_tones);
    return th;
}

PulseWaveform multi_tooth_pulse(const CombSpec& spec,
                                const std::vector<double>& phases,
                                const MultiToothParams& params) {
    spec.validate();
    const std::size_t n_comp = spec.n_teeth();
    if (phases.size() != n_comp)
        throw std::invalid_argument("multi_tooth_pulse: phases length != component count");
    if (spec.delta_mhz * 1e6 * params.duration < 4.0)
        throw std::invalid_argument("multi_tooth_pulse: delta * duration < 4, components unresolvable");

    // The comb factor sum_k exp(i theta_k + 2 pi i k delta t) is periodic with
    // period 1/delta; synthesis tiles one period, so the sample rate must be
    // commensurate with delta.
    const double delta_hz = spec.delta_mhz * 1e6;
    const double m_exact = params.sample_rate / delta_hz;
    const std::size_t m = std::size_t(std::llround(m_exact));
    if (m < 2 * n_comp || std::abs(m_exact - double(m)) > 1e-6)
        throw std::invalid_argument("multi_tooth_pulse: sample rate must be an integer multiple of delta (and resolve all components)");

    // One period of the comb factor via an inverse DFT with the component
    // phases loaded into the first n_comp bins.
    std::vector<std::complex<double>> comb(m, 0.0);
    for (std::size_t k = 0; k < n_comp; ++k) comb[k] = std::polar(1.0, phases[k]);
    dft(comb, +1);

    // Slow shared sweep across one hole width (= delta - tooth width): each
    // comb line becomes a square burn band. Constant amplitude with a tanh
    // frequency law keeps the crest factor at the Schroeder multi-tone level.
    const double bw_hz = spec.delta_mhz * (1.0 - 1.0 / spec.finesse) * 1e6;
    const double beta = params.chirp_truncation;

    const std::size_t n = std::size_t(std::llround(params.sample_rate * params.duration));
    PulseWaveform w;
    w.sample_rate = params.sample_rate;
    w.duration = params.duration;
    w.envelope.resize(n);
    // Components sit at carrier - B/2 + (k + 1/2) delta, i.e. the anti-tooth
    // (burn target) frequencies; f_ref is the k=0 component.
    const double f_ref = (params.carrier_offset_mhz - 0.5 * spec.bandwidth_mhz + 0.5 * spec.delta_mhz) * 1e6;
    const double t0 = 0.5 * params.duration;
    for (std::size_t i = 0; i < n; ++i) {
        double t = (double(i) + 0.5) / params.sample_rate;
        double x = beta * (t - t0) / t0;
        // f_inst = f_ref + (bw/2) tanh(x); overflow-safe log cosh
        double lc = std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::log(2.0);
        double phi = 2.0 * kPi * (f_ref * t + 0.5 * bw_hz * (t0 / beta) * lc);
        w.envelope[i] = comb[i % m] * std::polar(1.0, phi);
    }
    normalize_peak(w);
    return w;
}

double mean_power(const PulseWaveform& w) {
    if (w.envelope.empty()) throw std::invalid_argument("mean_power: empty waveform");
    double acc = 0.0;
    for (const auto& a : w.envelope) acc += std::norm(a);
    return acc / double(w.size());
}

double crest_factor(const PulseWaveform& w) {
    if (w.envelope.empty()) throw std::invalid_argument("crest_factor: empty waveform");
    double peak = 0.0, acc = 0.0;
    for (const auto& a : w.envelope) {
        double p = std::norm(a);
        peak = std::max(peak, p);
        acc += p;
    }
    if (acc <= 0.0) throw std::invalid_argument("crest_factor: all-zero waveform");
    return peak / (acc / double(w.size()));
}

double PowerSpectrum::energy() const {
    double e = std::accumulate(psd.begin(), psd.end(), 0.0);
    return e * df_mhz * 1e6;
}

double PowerSpectrum::band_energy_fraction(double f_lo_mhz, double f_hi_mhz) const {
    double tot = 0.0, band = 0.0;
    for (std::size_t i = 0; i < freq_mhz.size(); ++i) {
        tot += psd[i];
        if (freq_mhz[i] >= f_lo_mhz && freq_mhz[i] <= f_hi_mhz) band += psd[i];
    }
    return tot > 0.0 ? band / tot : 0.0;
}

PowerSpectrum pulse_spectrum(const PulseWaveform& w) {
    if (w.envelope.empty()) throw std::invalid_argument("pulse_spectrum: empty waveform");
    const std::size_t n = w.size();
    std::vector<std::complex<double>> buf = w.envelope;
    dft(buf, -1);

    // psd_k = |A_k dt|^2; then sum(psd) * df equals the time-domain
    // energy sum(|a|^2) dt (Parseval)
    PowerSpectrum s;
    s.df_mhz = w.sample_rate / double(n) * 1e-6;
    s.freq_mhz.resize(n);
    s.psd.resize(n);
    const double scale = 1.0 / (w.sample_rate * w.sample_rate);
    // fftshift: order bins from -sr/2 to +sr/2
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = (i + half) % n;  // source bin
        double f = double(k) / double(n);
        if (f >= 0.5) f -= 1.0;
        s.freq_mhz[i] = f * w.sample_rate * 1e-6;
        s.psd[i] = std::norm(buf[k]) * scale;
    }
    return s;
}

void write_waveform(const PulseWaveform& w, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_waveform: cannot open " + path);
    std::vector<float> buf(2 * w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        buf[2 * i] = float(w.envelope[i].real());
        buf[2 * i + 1] = float(w.envelope[i].imag());
    }
    os.write(reinterpret_cast<const char*>(buf.data()),
             std::streamsize(buf.size() * sizeof(float)));
    std::ofstream sc(path + ".txt");
    sc.precision(17);
    sc << "sample_rate " << w.sample_rate << "\nduration " << w.duration << "\n";
}

PulseWaveform read_waveform(const std::string& path) {
    PulseWaveform w;
    {
        std::ifstream sc(path + ".txt");
        if (!sc) throw std::runtime_error("read_waveform: missing sidecar " + path + ".txt");
        std::string key;
        while (sc >> key) {
            if (key == "sample_rate") sc >> w.sample_rate;
            else if (key == "duration") sc >> w.duration;
        }
    }
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_waveform: cannot open " + path);
    is.seekg(0, std::ios::end);
    std::size_t bytes = std::size_t(is.tellg());
    is.seekg(0);
    std::vector<float> buf(bytes / sizeof(float));
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(bytes));
    w.envelope.resize(buf.size() / 2);
    for (std::size_t i = 0; i < w.envelope.size(); ++i)
        w.envelope[i] = {double(buf[2 * i]), double(buf[2 * i + 1])};
    return w;
}

void write_spectrum(const PowerSpectrum& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_spectrum: cannot open " + path);
    os.precision(12);
    for (std::size_t i = 0; i < s.freq_mhz.size(); ++i)
        os << s.freq_mhz[i] << ' ' << s.psd[i] << '\n';
}

}  // namespace afc
