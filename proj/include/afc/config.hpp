#pragma once

// Flat key = value configuration with section headers, plus the nominal
// preset that encodes the calibrated end-to-end parameter set. Storage-time
// presets (1, 5, 10, 25 us) adjust the comb spacing, gate length and
// acquisition time together.

#include <cstdint>
#include <string>

#include "afc/pulse.hpp"
#include "afc/pumping.hpp"
#include "afc/source.hpp"

namespace afc {

struct NodeConfig {
    RunSetup run;
    MultiToothParams pulse;
    PreparationSequence prep;
    HyperfineSystem hyperfine;
    std::uint64_t seed = 1234;

    // Calibrated defaults reproducing the measured correlation ladder,
    // storage efficiency and multimode plateau.
    static NodeConfig nominal(double storage_time_us = 25.0);

    // Switch the storage-time preset: comb delta, gate length, prep comb and
    // the default acquisition time move together.
    void set_storage_time(double storage_time_us);

    double storage_time_us() const { return run.memory.storage_time_us(); }
    void validate() const;  // throws on inconsistent timing / out-of-range fields
};

// Default acquisition wall time per storage preset (shorter storage -> higher
// count rate -> shorter run).
double default_run_length_s(double storage_time_us);

NodeConfig load_config(const std::string& path);
void save_config(const NodeConfig& cfg, const std::string& path);

}  // namespace afc
