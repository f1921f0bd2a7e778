#pragma once

#include <algorithm>
#include <vector>

#include "evclust/core.hpp"
#include "evclust/synth.hpp"

namespace evclust::fixtures {

/// Random stream whose ground-truth components are pairwise separated by
/// more than any delta up to kMaxDelta: bursts are strictly sequential in
/// time with inter-burst gaps above kMaxDelta. Within a burst, every event
/// sits at most 1 pixel away from its predecessor and at most 400 us after
/// it, so each burst is exactly one component for every delta >= 400 and
/// d >= 1, regardless of the burst's total span. Burst mix: singletons,
/// single-pixel (hot-style) runs, and random-walk blobs, with random
/// polarities.
inline std::vector<Event> well_separated_stream(std::uint64_t seed,
                                                std::size_t max_events = 5000,
                                                SensorGeometry geom = {64, 64}) {
    constexpr Timestamp kMaxDelta = 2000;
    constexpr int kRadius = 3;
    SplitMix64 rng(seed);
    std::vector<Event> out;
    Timestamp t = rng.below(1000);
    while (out.size() < max_events) {
        const std::uint64_t kind = rng.below(10);
        const bool single_pixel = kind <= 2;
        std::size_t size =
            kind == 0 ? 1
                      : (single_pixel ? 1 + rng.below(20) : 2 + rng.below(39));
        size = std::min(size, max_events - out.size());

        const int cx = kRadius + static_cast<int>(
                                     rng.below(geom.width - 2 * kRadius));
        const int cy = kRadius + static_cast<int>(
                                     rng.below(geom.height - 2 * kRadius));
        PixelCoord px{static_cast<std::uint16_t>(cx),
                      static_cast<std::uint16_t>(cy)};
        for (std::size_t i = 0; i < size; ++i) {
            if (i > 0) {
                t += 1 + rng.below(400);
                if (!single_pixel) {
                    px.x = static_cast<std::uint16_t>(
                        std::clamp(px.x + static_cast<int>(rng.below(3)) - 1,
                                   cx - kRadius, cx + kRadius));
                    px.y = static_cast<std::uint16_t>(
                        std::clamp(px.y + static_cast<int>(rng.below(3)) - 1,
                                   cy - kRadius, cy + kRadius));
                }
            }
            out.push_back({t, px.x, px.y,
                           rng.next() & 1 ? Polarity{1} : Polarity{-1}});
        }
        t += kMaxDelta + 1 + rng.below(3000);
    }
    return out;
}

/// Unconstrained random stream: uniform pixels in a small window, bursty
/// gaps, random polarities. Components can touch and interleave freely.
inline std::vector<Event> random_stream(std::uint64_t seed,
                                        std::size_t count = 150,
                                        SensorGeometry geom = {16, 16}) {
    SplitMix64 rng(seed);
    std::vector<Event> out;
    Timestamp t = 0;
    for (std::size_t i = 0; i < count; ++i) {
        t += rng.below(300);
        out.push_back({t, static_cast<std::uint16_t>(rng.below(geom.width)),
                       static_cast<std::uint16_t>(rng.below(geom.height)),
                       rng.next() & 1 ? Polarity{1} : Polarity{-1}});
    }
    return out;
}

}  // namespace evclust::fixtures
