#pragma once

// Channel-tagged, time-sorted photon detection records and the timetag file
// format shared between the event generator and the correlator.

#include <cstdint>
#include <string>
#include <vector>

namespace afc {

enum class Channel : std::uint8_t { Signal = 0, Idler = 1, Sync = 2 };

struct Event {
    std::uint64_t time_ps = 0;
    Channel channel = Channel::Signal;
    std::uint32_t trial = 0;

    friend bool operator<(const Event& a, const Event& b) { return a.time_ps < b.time_ps; }
};

struct EventStream {
    std::vector<Event> events;  // sorted by time

    bool is_sorted() const;
    void sort();
    // times (ps) of one channel, in order
    std::vector<std::uint64_t> channel_times(Channel c) const;
    std::size_t count(Channel c) const;
};

// Binary timetag format: a short text header
//   TIMETAG 1
//   t0_ps <offset>
//   channel 0 signal
//   channel 1 idler
//   channel 2 sync
//   DATA
// followed by little-endian records { channel: u8, time_ps: u64 }.
void write_timetags(const EventStream& s, const std::string& path);
EventStream read_timetags(const std::string& path);

// CSV alternative, "channel,time_ps" with an optional header line.
void write_timetags_csv(const EventStream& s, const std::string& path);
EventStream read_timetags_csv(const std::string& path);

// Dispatch on extension: .csv -> CSV, otherwise binary.
EventStream read_events(const std::string& path);

}  // namespace afc
