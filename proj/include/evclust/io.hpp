#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evclust/core.hpp"

namespace evclust {

/// Event stream serialization. Two formats, both bit-exact:
///   csv   "t,x,y,p" lines with an optional "t_us,x,y,p" header -- for
///         humans and small fixtures;
///   evc1  magic "EVC1" then packed 16-byte little-endian records -- for
///         cheap bulk parsing in benchmarks.
/// Readers never reorder, dedupe, or drop events.

enum class EventFormat { Csv, Evc1 };

/// What a stream header declares about its contents. Neither format
/// carries a sensor geometry, so `geometry` stays empty for both and the
/// caller supplies one; when a future format does declare it, it must
/// bound every event in the file.
struct EventFileHeaderInfo {
    EventFormat format = EventFormat::Csv;
    std::optional<SensorGeometry> geometry;
};

/// Picks the format from a file name: ".csv" means csv, anything else the
/// binary format.
EventFormat format_from_path(const std::string& path);

/// Inspects the leading bytes of a file: the EVC1 magic marks the binary
/// format, anything else is treated as csv. Throws Error when the file
/// cannot be opened.
EventFileHeaderInfo describe_file(const std::string& path);

/// Parses "t,x,y,p" lines in file order (no sorting). A single leading
/// header line is skipped. Throws ParseError naming the 1-based line on
/// malformed input, polarity outside {1,-1}, or out-of-range fields.
std::vector<Event> read_events_csv(std::istream& in);

/// Writes the header line then one "t,x,y,p" row per event.
void write_events_csv(const std::vector<Event>& events, std::ostream& out);

/// Binary reader. Record layout, little-endian: t u64 at offset 0,
/// x u16 at 8, y u16 at 10, p i8 at 12, three zero pad bytes at 13..15.
/// Throws ParseError (line = record index, 1-based) on a bad magic,
/// truncated record, nonzero padding, or polarity outside {1,-1}.
std::vector<Event> read_events_binary(std::istream& in);

void write_events_binary(const std::vector<Event>& events, std::ostream& out);

/// Reads a file in the given format (default: by extension).
std::vector<Event> read_events_file(const std::string& path,
                                    std::optional<EventFormat> format = {});

void write_events_file(const std::vector<Event>& events,
                       const std::string& path,
                       std::optional<EventFormat> format = {});

/// Index of the first event with a timestamp below its predecessor's, or
/// empty when the list is sorted (equal timestamps are in order).
std::optional<std::size_t> validate_monotonic(const std::vector<Event>& events);

/// Writes "root_t_us,root_x,root_y,end_t_us,event_count,pixel_count" and
/// one row per record, in the given order.
void write_clusters_csv(const std::vector<ClusterRecord>& records,
                        std::ostream& out);

}  // namespace evclust
