#include "evclust/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace evclust {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'V', 'C', '1'};
constexpr std::size_t kRecordSize = 16;
constexpr const char* kEventHeader = "t_us,x,y,p";
constexpr const char* kClusterHeader =
    "root_t_us,root_x,root_y,end_t_us,event_count,pixel_count";

[[noreturn]] void fail(const std::string& what, std::size_t line) {
    throw ParseError("line " + std::to_string(line) + ": " + what, line);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view field, const char* name, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '-')
        fail(std::string(name) + " must be non-negative", line);
    T value{};
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail("cannot parse " + std::string(name) + " from '" +
                 std::string(field) + "'",
             line);
    return value;
}

Polarity parse_polarity(std::string_view field, std::size_t line) {
    field = trim(field);
    if (field == "1") return 1;
    if (field == "-1") return -1;
    fail("polarity must be 1 or -1, got '" + std::string(field) + "'", line);
}

}  // namespace

EventFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".csv")
        return EventFormat::Csv;
    return EventFormat::Evc1;
}

EventFileHeaderInfo describe_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    EventFileHeaderInfo info;
    info.format = (in.gcount() == 4 && head == kMagic) ? EventFormat::Evc1
                                                       : EventFormat::Csv;
    return info;
}

std::vector<Event> read_events_csv(std::istream& in) {
    std::vector<Event> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        if (line_no == 1 && body == kEventHeader) continue;

        std::array<std::string_view, 4> fields;
        std::size_t start = 0, count = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i == body.size() || body[i] == ',') {
                if (count == 4) fail("expected 4 comma-separated fields", line_no);
                fields[count++] = body.substr(start, i - start);
                start = i + 1;
            }
        }
        if (count != 4) fail("expected 4 comma-separated fields", line_no);

        Event e;
        e.t = parse_number<Timestamp>(fields[0], "timestamp", line_no);
        e.x = parse_number<std::uint16_t>(fields[1], "x", line_no);
        e.y = parse_number<std::uint16_t>(fields[2], "y", line_no);
        e.p = parse_polarity(fields[3], line_no);
        events.push_back(e);
    }
    return events;
}

void write_events_csv(const std::vector<Event>& events, std::ostream& out) {
    out << kEventHeader << '\n';
    for (const Event& e : events)
        out << e.t << ',' << e.x << ',' << e.y << ','
            << static_cast<int>(e.p) << '\n';
}

std::vector<Event> read_events_binary(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw ParseError("missing EVC1 magic bytes", 0);

    std::vector<Event> events;
    std::array<unsigned char, kRecordSize> rec{};
    std::size_t index = 0;
    while (in.read(reinterpret_cast<char*>(rec.data()), rec.size())) {
        ++index;
        Event e;
        std::uint64_t t = 0;
        for (int i = 7; i >= 0; --i) t = t << 8 | rec[i];
        e.t = t;
        e.x = static_cast<std::uint16_t>(rec[8] | rec[9] << 8);
        e.y = static_cast<std::uint16_t>(rec[10] | rec[11] << 8);
        const auto p = static_cast<std::int8_t>(rec[12]);
        if (p != 1 && p != -1)
            throw ParseError("record " + std::to_string(index) +
                                 ": polarity must be 1 or -1",
                             index);
        e.p = p;
        if (rec[13] != 0 || rec[14] != 0 || rec[15] != 0)
            throw ParseError("record " + std::to_string(index) +
                                 ": nonzero padding",
                             index);
        events.push_back(e);
    }
    if (in.gcount() != 0)
        throw ParseError("truncated record at index " +
                             std::to_string(index + 1),
                         index + 1);
    return events;
}

void write_events_binary(const std::vector<Event>& events, std::ostream& out) {
    out.write(kMagic.data(), kMagic.size());
    std::array<unsigned char, kRecordSize> rec{};
    for (const Event& e : events) {
        for (int i = 0; i < 8; ++i)
            rec[i] = static_cast<unsigned char>(e.t >> (8 * i));
        rec[8] = static_cast<unsigned char>(e.x);
        rec[9] = static_cast<unsigned char>(e.x >> 8);
        rec[10] = static_cast<unsigned char>(e.y);
        rec[11] = static_cast<unsigned char>(e.y >> 8);
        rec[12] = static_cast<unsigned char>(e.p);
        rec[13] = rec[14] = rec[15] = 0;
        out.write(reinterpret_cast<const char*>(rec.data()), rec.size());
    }
}

std::vector<Event> read_events_file(const std::string& path,
                                    std::optional<EventFormat> format) {
    const EventFormat fmt = format.value_or(format_from_path(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return fmt == EventFormat::Csv ? read_events_csv(in)
                                   : read_events_binary(in);
}

void write_events_file(const std::vector<Event>& events,
                       const std::string& path,
                       std::optional<EventFormat> format) {
    const EventFormat fmt = format.value_or(format_from_path(path));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    if (fmt == EventFormat::Csv)
        write_events_csv(events, out);
    else
        write_events_binary(events, out);
    if (!out) throw Error("write to " + path + " failed");
}

std::optional<std::size_t> validate_monotonic(
    const std::vector<Event>& events) {
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].t < events[i - 1].t) return i;
    return std::nullopt;
}

void write_clusters_csv(const std::vector<ClusterRecord>& records,
                        std::ostream& out) {
    out << kClusterHeader << '\n';
    for (const ClusterRecord& r : records)
        out << r.root_t << ',' << r.root_x << ',' << r.root_y << ','
            << r.end_t << ',' << r.event_count << ',' << r.pixel_count
            << '\n';
}

}  // namespace evclust
