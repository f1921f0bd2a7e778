#pragma once

#include <cstdint>
#include <vector>

#include "evclust/core.hpp"

namespace evclust {

/// Deterministic test-stream generation. Every generator is a pure
/// function of its config; the only randomness source is SplitMix64, so
/// streams are reproducible from a 64-bit seed alone (the exact generator
/// is documented in the README together with test vectors).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound), bound >= 1, by 128-bit multiply.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Periodic two-polarity burst signal, the shape an incandescent lamp on a
/// rectified mains supply produces: per period one positive burst (rising
/// edge) and one negative burst half a period later.
struct LampConfig {
    /// Rectified signal frequency in Hz.
    double frequency = 100.0;
    std::uint32_t periods = 10;
    /// Events per burst, per polarity.
    std::uint32_t events_per_burst = 40;
    /// Burst duration in microseconds.
    Timestamp burst_width = 1500;
    PixelCoord roi_center{32, 32};
    /// Chebyshev radius of the square ROI the burst pixels come from.
    int roi_radius = 3;
    SensorGeometry geometry{64, 64};
    std::uint64_t seed = 1;

    /// Throws Error unless the burst fits a quarter period, the ROI fits
    /// the geometry, and events_per_burst is in [1, burst_width].
    void validate() const;
};

/// Point-noise configuration: hot pixels firing at fixed rates plus a
/// uniform background, over a fixed duration.
struct NoiseConfig {
    struct HotPixel {
        PixelCoord coord;
        double rate_hz = 0.0;
    };

    std::vector<HotPixel> hot_pixels;
    /// Events per second per pixel, uniformly over the sensor.
    double background_rate = 0.0;
    Timestamp duration = 0;
    SensorGeometry geometry{64, 64};
    std::uint64_t seed = 1;

    void validate() const;
};

/// Generates the lamp stream. Bursts start at k * period (positive) and
/// k * period + period/2 (negative). Within a burst the first event fires
/// exactly at the burst start and strictly before the rest, consecutive
/// gaps are uniform in [1, burst_width / events_per_burst] microseconds,
/// and every pixel is drawn adjacent to (or on) the pixels already used by
/// the burst, so each burst forms a single Chebyshev-connected cluster
/// rooted at its first event.
std::vector<Event> gen_lamp(const LampConfig& config);

/// Near-periodic events of one polarity-alternating pixel: consecutive
/// gaps are uniform in [0.9, 1.1] of the nominal period 1/rate.
std::vector<Event> gen_hot_pixel(PixelCoord coord, double rate_hz,
                                 Timestamp duration, std::uint64_t seed);

/// Uniform background noise: exponential inter-arrival times at the
/// aggregate rate, each event on a uniformly random pixel.
std::vector<Event> gen_background(const SensorGeometry& geometry,
                                  double rate_hz_per_pixel,
                                  Timestamp duration, std::uint64_t seed);

/// All noise sources of a NoiseConfig, merged.
std::vector<Event> gen_noise(const NoiseConfig& config);

/// Stable merge of sorted streams: output is sorted by timestamp and ties
/// keep input order, earlier stream first.
std::vector<Event> merge_streams(const std::vector<std::vector<Event>>& streams);

}  // namespace evclust
