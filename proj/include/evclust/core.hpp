#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evclust {

/// Timestamps are microseconds since stream start, unsigned 64-bit.
/// All delta comparisons subtract the smaller value from the larger one
/// after an explicit ordering check, so wraparound cannot occur.
using Timestamp = std::uint64_t;

/// Polarity of an event: +1 for a brightness increase, -1 for a decrease.
using Polarity = std::int8_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input stream violates an ordering or bounds requirement.
struct StreamError : Error {
    StreamError(const std::string& what, std::size_t index)
        : Error(what), event_index(index) {}
    std::size_t event_index;
};

/// A file or byte stream could not be decoded.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_number(line) {}
    std::size_t line_number;
};

/// One camera report: timestamp, pixel coordinates, polarity.
struct Event {
    Timestamp t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    Polarity p = 1;

    friend bool operator==(const Event&, const Event&) = default;
};

/// A pixel location. x is the column index, y the row index.
struct PixelCoord {
    std::uint16_t x = 0;
    std::uint16_t y = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Raster comparison: ascending y, then ascending x. The canonical
/// iteration and tie-break order everywhere in this library.
inline bool raster_less(PixelCoord a, PixelCoord b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

/// Dimensions of the pixel array.
struct SensorGeometry {
    int width = 0;
    int height = 0;

    bool contains(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    bool contains(PixelCoord c) const { return contains(c.x, c.y); }
    std::int64_t pixel_count() const {
        return static_cast<std::int64_t>(width) * height;
    }

    /// Throws Error unless 1 <= width,height <= 65535 (coordinates are
    /// carried as unsigned 16-bit throughout).
    void validate() const;

    friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

/// The four constants of the detector.
struct ClusterParams {
    /// Maximal temporal distance (microseconds) between events of one cluster.
    Timestamp delta = 2000;
    /// Maximal spatial distance in pixels (Chebyshev metric).
    int d = 1;
    /// Minimal number of events for a reported cluster. Must be >= 3.
    std::uint64_t n = 10;
    /// Minimal number of contributing pixels for a reported cluster.
    std::uint64_t m = 5;

    /// Throws Error unless delta >= 1, d >= 0, n >= 3, m >= 1.
    void validate() const;

    friend bool operator==(const ClusterParams&, const ClusterParams&) = default;
};

/// One output row: the root event of a detected cluster plus the running
/// extent and size of that cluster.
struct ClusterRecord {
    Timestamp root_t = 0;
    std::uint16_t root_x = 0;
    std::uint16_t root_y = 0;
    Timestamp end_t = 0;
    std::uint64_t event_count = 0;
    std::uint64_t pixel_count = 0;

    friend bool operator==(const ClusterRecord&, const ClusterRecord&) = default;
};

/// All in-bounds coordinates of the (2d+1) x (2d+1) square centered at
/// `center`, clipped at the sensor borders, in raster order. The center
/// pixel itself is included.
std::vector<PixelCoord> chebyshev_neighbors(PixelCoord center, int d,
                                            const SensorGeometry& geom);

/// Chebyshev (L-infinity) distance between two pixels.
inline int chebyshev_distance(PixelCoord a, PixelCoord b) {
    int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx > dy ? dx : dy;
}

}  // namespace evclust
