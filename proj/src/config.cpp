#include "afc/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace afc {

double default_run_length_s(double storage_time_us) {
    if (storage_time_us <= 1.0) return 69.0;    // 1.15 min
    if (storage_time_us <= 5.0) return 138.0;   // 2.3 min
    if (storage_time_us <= 10.0) return 276.0;  // 4.6 min
    return 489.0;                               // 8.15 min
}

NodeConfig NodeConfig::nominal(double storage_time_us) {
    NodeConfig c;
    c.run.memory.comb.bandwidth_mhz = 100.0;
    c.run.memory.comb.finesse = 2.0;
    c.run.memory.comb.tooth_shape = ToothShape::Square;
    c.run.memory.comb.peak_depth = 1.55;       // calibrated 100 MHz comb depth
    c.run.memory.comb.background_depth = 0.2;
    c.run.memory.comb.center_offset_mhz = 150.0;
    c.prep.comb = c.run.memory.comb;
    c.pulse.carrier_offset_mhz = 150.0;
    c.set_storage_time(storage_time_us);
    return c;
}

void NodeConfig::set_storage_time(double storage_time_us) {
    if (!(storage_time_us > 0.0))
        throw std::invalid_argument("set_storage_time: storage time must be positive");
    double delta = 1.0 / storage_time_us;  // MHz
    run.memory.comb.delta_mhz = delta;
    prep.comb.delta_mhz = delta;
    run.timing.gate_s = storage_time_us * 1e-6;
    run.run_length_s = default_run_length_s(storage_time_us);
}

void NodeConfig::validate() const {
    run.source.coherence_time_ns();  // field sanity via use
    run.detectors.validate();
    run.timing.validate();
    run.memory.validate();
    double rel = std::abs(run.timing.gate_s * 1e6 - run.memory.storage_time_us()) /
                 run.memory.storage_time_us();
    if (rel > 1e-9)
        throw std::invalid_argument("NodeConfig: gate length inconsistent with comb spacing");
    if (run.fiber_km < 0.0 || run.run_length_s <= 0.0)
        throw std::invalid_argument("NodeConfig: bad fiber length or run length");
    hyperfine.validate();
}

namespace {

using Section = std::map<std::string, std::string>;
using Tree = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Tree parse_tree(std::istream& is) {
    Tree tree;
    std::string line, section = "global";
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        tree[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return tree;
}

struct Reader {
    const Tree& tree;

    const std::string* find(const std::string& sec, const std::string& key) const {
        auto s = tree.find(sec);
        if (s == tree.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }
    void num(const std::string& sec, const std::string& key, double& out) const {
        if (const auto* v = find(sec, key)) {
            try {
                out = std::stod(*v);
            } catch (const std::exception&) {
                throw std::runtime_error("config " + sec + "." + key + ": not a number");
            }
        }
    }
    void u64(const std::string& sec, const std::string& key, std::uint64_t& out) const {
        if (const auto* v = find(sec, key)) out = std::stoull(*v);
    }
    void flag(const std::string& sec, const std::string& key, bool& out) const {
        if (const auto* v = find(sec, key)) {
            if (*v == "true" || *v == "1")
                out = true;
            else if (*v == "false" || *v == "0")
                out = false;
            else
                throw std::runtime_error("config " + sec + "." + key + ": expected true/false");
        }
    }
};

MemoryMode parse_mode(const std::string& s) {
    if (s == "none") return MemoryMode::None;
    if (s == "transparency") return MemoryMode::Transparency;
    if (s == "afc") return MemoryMode::Afc;
    throw std::runtime_error("config: unknown memory_mode '" + s + "'");
}

const char* mode_name(MemoryMode m) {
    switch (m) {
        case MemoryMode::None: return "none";
        case MemoryMode::Transparency: return "transparency";
        case MemoryMode::Afc: return "afc";
    }
    return "afc";
}

}  // namespace

NodeConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_config: cannot open " + path);
    Tree tree = parse_tree(is);
    Reader r{tree};

    NodeConfig c = NodeConfig::nominal();
    r.u64("run", "seed", c.seed);
    r.num("run", "run_length_s", c.run.run_length_s);
    r.num("run", "fiber_km", c.run.fiber_km);
    r.num("run", "fiber_delay_us_per_km", c.run.fiber_delay_us_per_km);
    r.num("run", "fiber_loss_db_per_km", c.run.fiber_loss_db_per_km);
    r.num("run", "transparency_depth", c.run.transparency_depth);
    if (const auto* v = r.find("run", "memory_mode")) c.run.memory_mode = parse_mode(*v);

    auto& s = c.run.source;
    r.num("source", "mean_pairs_per_mode", s.mean_pairs_per_mode);
    r.num("source", "signal_filter_fwhm_mhz", s.signal_filter_fwhm_mhz);
    r.num("source", "idler_filter_fwhm_mhz", s.idler_filter_fwhm_mhz);
    r.num("source", "pump_power_uw", s.pump_power_uw);
    r.num("source", "nominal_pump_power_uw", s.nominal_pump_power_uw);

    auto& d = c.run.detectors;
    r.num("detectors", "efficiency_signal", d.efficiency_signal);
    r.num("detectors", "efficiency_idler", d.efficiency_idler);
    r.num("detectors", "path_efficiency_signal", d.path_efficiency_signal);
    r.num("detectors", "path_efficiency_idler", d.path_efficiency_idler);
    r.num("detectors", "dark_rate_signal_hz", d.dark_rate_signal_hz);
    r.num("detectors", "dark_rate_idler_hz", d.dark_rate_idler_hz);
    r.num("detectors", "background_signal_hz", d.background_signal_hz);
    r.num("detectors", "jitter_fwhm_signal_ns", d.jitter_fwhm_signal_ns);
    r.num("detectors", "jitter_fwhm_idler_ns", d.jitter_fwhm_idler_ns);

    auto& t = c.run.timing;
    r.num("timing", "repetition_rate_hz", t.repetition_rate_hz);
    r.num("timing", "preparation_s", t.preparation_s);
    r.num("timing", "measurement_s", t.measurement_s);
    r.num("timing", "gate_s", t.gate_s);

    auto& m = c.run.memory;
    r.num("memory", "delta_mhz", m.comb.delta_mhz);
    r.num("memory", "bandwidth_mhz", m.comb.bandwidth_mhz);
    r.num("memory", "finesse", m.comb.finesse);
    r.num("memory", "peak_depth", m.comb.peak_depth);
    r.num("memory", "background_depth", m.comb.background_depth);
    r.num("memory", "center_offset_mhz", m.comb.center_offset_mhz);
    if (const auto* v = r.find("memory", "tooth_shape")) {
        if (*v == "square")
            m.comb.tooth_shape = ToothShape::Square;
        else if (*v == "gaussian")
            m.comb.tooth_shape = ToothShape::Gaussian;
        else
            throw std::runtime_error("config: unknown tooth_shape '" + *v + "'");
    }
    r.num("memory", "t2_afc_us", m.t2_afc_us);
    r.num("memory", "signal_fwhm_mhz", m.signal_fwhm_mhz);
    r.num("memory", "signal_center_mhz", m.signal_center_mhz);
    r.num("memory", "echo_sigma_ns", m.echo_sigma_ns);

    auto& p = c.pulse;
    r.num("pulse", "carrier_offset_mhz", p.carrier_offset_mhz);
    r.num("pulse", "duration_s", p.duration);
    r.num("pulse", "sample_rate_hz", p.sample_rate);
    r.num("pulse", "chirp_truncation", p.chirp_truncation);

    auto& q = c.prep;
    r.num("prep", "polarization_duration_s", q.polarization_duration_s);
    r.num("prep", "step_duration_s", q.step_duration_s);
    r.num("prep", "polarization_rate", q.polarization_rate);
    r.num("prep", "burn_duration_s", q.burn_duration_s);
    r.num("prep", "burn_rate", q.burn_rate);
    r.num("prep", "band_lo_mhz", q.band_lo_mhz);
    r.num("prep", "band_hi_mhz", q.band_hi_mhz);
    r.num("prep", "dt_s", q.dt_s);
    r.flag("prep", "strict_timing", q.strict_timing);
    q.comb = m.comb;

    return c;
}

void save_config(const NodeConfig& c, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_config: cannot open " + path);
    os.precision(17);

    os << "# resolved node configuration\n";
    os << "[run]\n";
    os << "seed = " << c.seed << "\n";
    os << "run_length_s = " << c.run.run_length_s << "\n";
    os << "memory_mode = " << mode_name(c.run.memory_mode) << "\n";
    os << "fiber_km = " << c.run.fiber_km << "\n";
    os << "fiber_delay_us_per_km = " << c.run.fiber_delay_us_per_km << "\n";
    os << "fiber_loss_db_per_km = " << c.run.fiber_loss_db_per_km << "\n";
    os << "transparency_depth = " << c.run.transparency_depth << "\n\n";

    const auto& s = c.run.source;
    os << "[source]\n";
    os << "mean_pairs_per_mode = " << s.mean_pairs_per_mode << "\n";
    os << "signal_filter_fwhm_mhz = " << s.signal_filter_fwhm_mhz << "\n";
    os << "idler_filter_fwhm_mhz = " << s.idler_filter_fwhm_mhz << "\n";
    os << "pump_power_uw = " << s.pump_power_uw << "\n";
    os << "nominal_pump_power_uw = " << s.nominal_pump_power_uw << "\n\n";

    const auto& d = c.run.detectors;
    os << "[detectors]\n";
    os << "efficiency_signal = " << d.efficiency_signal << "\n";
    os << "efficiency_idler = " << d.efficiency_idler << "\n";
    os << "path_efficiency_signal = " << d.path_efficiency_signal << "\n";
    os << "path_efficiency_idler = " << d.path_efficiency_idler << "\n";
    os << "dark_rate_signal_hz = " << d.dark_rate_signal_hz << "\n";
    os << "dark_rate_idler_hz = " << d.dark_rate_idler_hz << "\n";
    os << "background_signal_hz = " << d.background_signal_hz << "\n";
    os << "jitter_fwhm_signal_ns = " << d.jitter_fwhm_signal_ns << "\n";
    os << "jitter_fwhm_idler_ns = " << d.jitter_fwhm_idler_ns << "\n\n";

    const auto& t = c.run.timing;
    os << "[timing]\n";
    os << "repetition_rate_hz = " << t.repetition_rate_hz << "\n";
    os << "preparation_s = " << t.preparation_s << "\n";
    os << "measurement_s = " << t.measurement_s << "\n";
    os << "gate_s = " << t.gate_s << "\n\n";

    const auto& m = c.run.memory;
    os << "[memory]\n";
    os << "delta_mhz = " << m.comb.delta_mhz << "\n";
    os << "bandwidth_mhz = " << m.comb.bandwidth_mhz << "\n";
    os << "finesse = " << m.comb.finesse << "\n";
    os << "tooth_shape = "
       << (m.comb.tooth_shape == ToothShape::Square ? "square" : "gaussian") << "\n";
    os << "peak_depth = " << m.comb.peak_depth << "\n";
    os << "background_depth = " << m.comb.background_depth << "\n";
    os << "center_offset_mhz = " << m.comb.center_offset_mhz << "\n";
    os << "t2_afc_us = " << m.t2_afc_us << "\n";
    os << "signal_fwhm_mhz = " << m.signal_fwhm_mhz << "\n";
    os << "signal_center_mhz = " << m.signal_center_mhz << "\n";
    os << "echo_sigma_ns = " << m.echo_sigma_ns << "\n\n";

    const auto& p = c.pulse;
    os << "[pulse]\n";
    os << "carrier_offset_mhz = " << p.carrier_offset_mhz << "\n";
    os << "duration_s = " << p.duration << "\n";
    os << "sample_rate_hz = " << p.sample_rate << "\n";
    os << "chirp_truncation = " << p.chirp_truncation << "\n\n";

    const auto& q = c.prep;
    os << "[prep]\n";
    os << "polarization_duration_s = " << q.polarization_duration_s << "\n";
    os << "step_duration_s = " << q.step_duration_s << "\n";
    os << "polarization_rate = " << q.polarization_rate << "\n";
    os << "burn_duration_s = " << q.burn_duration_s << "\n";
    os << "burn_rate = " << q.burn_rate << "\n";
    os << "band_lo_mhz = " << q.band_lo_mhz << "\n";
    os << "band_hi_mhz = " << q.band_hi_mhz << "\n";
    os << "dt_s = " << q.dt_s << "\n";
    os << "strict_timing = " << (q.strict_timing ? "true" : "false") << "\n";
}

}  // namespace afc
