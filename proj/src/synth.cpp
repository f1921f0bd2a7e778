#include "evclust/synth.hpp"

#include <algorithm>
#include <cmath>

namespace evclust {

namespace {

Timestamp lamp_period_us(const LampConfig& c) {
    return static_cast<Timestamp>(std::llround(1e6 / c.frequency));
}

}  // namespace

void LampConfig::validate() const {
    geometry.validate();
    if (frequency <= 0.0) throw Error("lamp frequency must be positive");
    if (events_per_burst < 1)
        throw Error("lamp needs at least one event per burst");
    const Timestamp period = lamp_period_us(*this);
    if (burst_width == 0 || burst_width >= period / 4)
        throw Error("burst width must be positive and below a quarter period");
    if (burst_width < events_per_burst)
        throw Error("burst width (us) must be at least events_per_burst");
    if (roi_radius < 0) throw Error("roi radius must be non-negative");
    if (roi_center.x < roi_radius || roi_center.y < roi_radius ||
        roi_center.x + roi_radius >= geometry.width ||
        roi_center.y + roi_radius >= geometry.height)
        throw Error("lamp ROI does not fit the sensor geometry");
}

void NoiseConfig::validate() const {
    geometry.validate();
    if (background_rate < 0.0) throw Error("background rate must be >= 0");
    for (const HotPixel& hp : hot_pixels) {
        if (hp.rate_hz < 0.0) throw Error("hot pixel rate must be >= 0");
        if (!geometry.contains(hp.coord))
            throw Error("hot pixel lies outside the sensor geometry");
    }
}

namespace {

/// One burst: `count` events of polarity `p` starting exactly at `start`,
/// pixels grown as a connected blob inside the ROI box.
void append_burst(std::vector<Event>& out, const LampConfig& c,
                  Timestamp start, std::uint32_t count, Polarity p,
                  SplitMix64& rng) {
    const int x_lo = c.roi_center.x - c.roi_radius;
    const int x_hi = c.roi_center.x + c.roi_radius;
    const int y_lo = c.roi_center.y - c.roi_radius;
    const int y_hi = c.roi_center.y + c.roi_radius;
    const Timestamp max_gap =
        std::max<Timestamp>(1, c.burst_width / c.events_per_burst);

    std::vector<PixelCoord> occupied;
    occupied.reserve(count);
    Timestamp t = start;
    for (std::uint32_t i = 0; i < count; ++i) {
        PixelCoord px;
        if (i == 0) {
            px = c.roi_center;
        } else {
            t += 1 + rng.below(max_gap);
            const PixelCoord base = occupied[rng.below(occupied.size())];
            const int dx = static_cast<int>(rng.below(3)) - 1;
            const int dy = static_cast<int>(rng.below(3)) - 1;
            px.x = static_cast<std::uint16_t>(
                std::clamp(base.x + dx, x_lo, x_hi));
            px.y = static_cast<std::uint16_t>(
                std::clamp(base.y + dy, y_lo, y_hi));
        }
        occupied.push_back(px);
        out.push_back({t, px.x, px.y, p});
    }
}

}  // namespace

std::vector<Event> gen_lamp(const LampConfig& config) {
    config.validate();
    const Timestamp period = lamp_period_us(config);
    SplitMix64 rng(config.seed);

    std::vector<Event> out;
    out.reserve(static_cast<std::size_t>(config.periods) *
                config.events_per_burst * 2);
    for (std::uint32_t k = 0; k < config.periods; ++k) {
        const Timestamp base = k * period;
        append_burst(out, config, base, config.events_per_burst, 1, rng);
        append_burst(out, config, base + period / 2, config.events_per_burst,
                     -1, rng);
    }
    return out;
}

std::vector<Event> gen_hot_pixel(PixelCoord coord, double rate_hz,
                                 Timestamp duration, std::uint64_t seed) {
    std::vector<Event> out;
    if (rate_hz <= 0.0 || duration == 0) return out;
    const double period_us = 1e6 / rate_hz;
    SplitMix64 rng(seed);
    Polarity p = 1;
    double t = period_us * (0.95 + 0.1 * rng.unit());
    while (t < static_cast<double>(duration)) {
        out.push_back({static_cast<Timestamp>(t), coord.x, coord.y, p});
        p = static_cast<Polarity>(-p);
        t += period_us * (0.95 + 0.1 * rng.unit());
    }
    return out;
}

std::vector<Event> gen_background(const SensorGeometry& geometry,
                                  double rate_hz_per_pixel,
                                  Timestamp duration, std::uint64_t seed) {
    geometry.validate();
    std::vector<Event> out;
    if (rate_hz_per_pixel <= 0.0 || duration == 0) return out;
    const double events_per_us =
        rate_hz_per_pixel * static_cast<double>(geometry.pixel_count()) / 1e6;
    SplitMix64 rng(seed);
    double t = 0.0;
    for (;;) {
        t += -std::log(1.0 - rng.unit()) / events_per_us;
        if (t >= static_cast<double>(duration)) break;
        const std::uint64_t cell =
            rng.below(static_cast<std::uint64_t>(geometry.pixel_count()));
        const Polarity p = rng.next() & 1 ? 1 : -1;
        out.push_back({static_cast<Timestamp>(t),
                       static_cast<std::uint16_t>(cell % geometry.width),
                       static_cast<std::uint16_t>(cell / geometry.width), p});
    }
    return out;
}

std::vector<Event> gen_noise(const NoiseConfig& config) {
    config.validate();
    std::vector<std::vector<Event>> parts;
    std::uint64_t salt = 0;
    for (const NoiseConfig::HotPixel& hp : config.hot_pixels)
        parts.push_back(gen_hot_pixel(hp.coord, hp.rate_hz, config.duration,
                                      config.seed + ++salt));
    parts.push_back(gen_background(config.geometry, config.background_rate,
                                   config.duration, config.seed));
    return merge_streams(parts);
}

std::vector<Event> merge_streams(
    const std::vector<std::vector<Event>>& streams) {
    std::vector<Event> out;
    std::size_t total = 0;
    for (const auto& s : streams) total += s.size();
    out.reserve(total);
    for (const auto& s : streams) out.insert(out.end(), s.begin(), s.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return out;
}

}  // namespace evclust
