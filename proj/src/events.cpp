#include "afc/events.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace afc {

bool EventStream::is_sorted() const {
    return std::is_sorted(events.begin(), events.end());
}

void EventStream::sort() { std::stable_sort(events.begin(), events.end()); }

std::vector<std::uint64_t> EventStream::channel_times(Channel c) const {
    std::vector<std::uint64_t> t;
    for (const auto& e : events)
        if (e.channel == c) t.push_back(e.time_ps);
    return t;
}

std::size_t EventStream::count(Channel c) const {
    std::size_t n = 0;
    for (const auto& e : events)
        if (e.channel == c) ++n;
    return n;
}

namespace {

// trial index = number of sync events at or before each record
void assign_trials(EventStream& s) {
    std::uint32_t trial = 0;
    bool seen_sync = false;
    for (auto& e : s.events) {
        if (e.channel == Channel::Sync) {
            if (seen_sync) ++trial;
            seen_sync = true;
        }
        e.trial = trial;
    }
}

}  // namespace

void write_timetags(const EventStream& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_timetags: cannot open " + path);
    os << "TIMETAG 1\n"
          "t0_ps 0\n"
          "channel 0 signal\n"
          "channel 1 idler\n"
          "channel 2 sync\n"
          "DATA\n";
    for (const auto& e : s.events) {
        std::uint8_t ch = std::uint8_t(e.channel);
        std::uint64_t t = e.time_ps;  // little-endian on every supported target
        os.write(reinterpret_cast<const char*>(&ch), 1);
        os.write(reinterpret_cast<const char*>(&t), 8);
    }
}

EventStream read_timetags(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_timetags: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("TIMETAG", 0) != 0)
        throw std::runtime_error("read_timetags: bad magic in " + path);
    while (std::getline(is, line) && line != "DATA") {
    }
    EventStream s;
    char buf[9];
    while (is.read(buf, 9)) {
        Event e;
        e.channel = Channel(std::uint8_t(buf[0]));
        std::uint64_t t;
        std::memcpy(&t, buf + 1, 8);
        e.time_ps = t;
        s.events.push_back(e);
    }
    s.sort();
    assign_trials(s);
    return s;
}

void write_timetags_csv(const EventStream& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_timetags_csv: cannot open " + path);
    os << "channel,time_ps\n";
    for (const auto& e : s.events)
        os << unsigned(std::uint8_t(e.channel)) << ',' << e.time_ps << '\n';
}

EventStream read_timetags_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_timetags_csv: cannot open " + path);
    EventStream s;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
        std::istringstream ls(line);
        unsigned ch;
        char comma;
        std::uint64_t t;
        if (ls >> ch >> comma >> t) s.events.push_back({t, Channel(std::uint8_t(ch)), 0});
    }
    s.sort();
    assign_trials(s);
    return s;
}

EventStream read_events(const std::string& path) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return read_timetags_csv(path);
    return read_timetags(path);
}

}  // namespace afc
