#include "evclust/bench.hpp"

#include <algorithm>
#include <chrono>

#include "evclust/clusterer.hpp"
#include "evclust/synth.hpp"

namespace evclust {

namespace {

std::uint64_t median(std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_us(Clock::time_point from, Clock::time_point to) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(to - from)
            .count());
}

}  // namespace

std::vector<Event> gen_bench_stream(std::size_t event_count,
                                    std::uint64_t seed) {
    constexpr int kRegion = 128;
    constexpr std::uint32_t kBurstEvents = 50;
    constexpr Timestamp kBurstSpacing = 800;
    constexpr Timestamp kMaxGap = 8;
    constexpr int kRadius = 2;

    SplitMix64 rng(seed);
    std::vector<Event> out;
    out.reserve(event_count);
    Timestamp burst_start = 0;
    while (out.size() < event_count) {
        const int cx =
            kRadius + static_cast<int>(rng.below(kRegion - 2 * kRadius));
        const int cy =
            kRadius + static_cast<int>(rng.below(kRegion - 2 * kRadius));
        std::vector<PixelCoord> occupied;
        Timestamp t = burst_start;
        for (std::uint32_t i = 0;
             i < kBurstEvents && out.size() < event_count; ++i) {
            PixelCoord px;
            if (i == 0) {
                px = {static_cast<std::uint16_t>(cx),
                      static_cast<std::uint16_t>(cy)};
            } else {
                t += 1 + rng.below(kMaxGap);
                const PixelCoord base = occupied[rng.below(occupied.size())];
                px.x = static_cast<std::uint16_t>(std::clamp(
                    base.x + static_cast<int>(rng.below(3)) - 1, cx - kRadius,
                    cx + kRadius));
                px.y = static_cast<std::uint16_t>(std::clamp(
                    base.y + static_cast<int>(rng.below(3)) - 1, cy - kRadius,
                    cy + kRadius));
            }
            occupied.push_back(px);
            out.push_back({t, px.x, px.y, rng.next() & 1 ? Polarity{1}
                                                         : Polarity{-1}});
        }
        burst_start += kBurstSpacing;
    }
    return out;
}

BenchMeasurement measure_throughput(const std::vector<Event>& events,
                                    const SensorGeometry& geometry,
                                    const ClusterParams& params, int repeat) {
    BenchMeasurement m;
    m.geometry = geometry;
    m.events = events.size();
    if (repeat < 1) repeat = 1;

    std::vector<std::uint64_t> alloc_samples, run_samples;
    for (int r = -1; r < repeat; ++r) {
        const auto t0 = Clock::now();
        StreamClusterer clusterer(geometry, params);
        const auto t1 = Clock::now();
        for (const Event& e : events) clusterer.process(e);
        const auto t2 = Clock::now();
        if (r < 0) continue;  // warm-up
        alloc_samples.push_back(elapsed_us(t0, t1));
        run_samples.push_back(elapsed_us(t1, t2));
        m.state_bytes = clusterer.state_memory_bytes();
        m.rows = clusterer.results().size();
    }
    m.alloc_us = median(alloc_samples);
    m.total_us = median(run_samples);
    m.ns_per_event =
        events.empty()
            ? 0.0
            : static_cast<double>(m.total_us) * 1000.0 /
                  static_cast<double>(events.size());
    return m;
}

}  // namespace evclust
