#pragma once

#include <cstdint>
#include <vector>

#include "evclust/core.hpp"

namespace evclust {

/// Throughput measurement for one (stream, geometry) pair.
struct BenchMeasurement {
    SensorGeometry geometry;
    std::size_t events = 0;
    /// Median time to construct and initialize the per-pixel state.
    std::uint64_t alloc_us = 0;
    /// Median time of the pure event loop, allocation excluded.
    std::uint64_t total_us = 0;
    double ns_per_event = 0.0;
    std::size_t state_bytes = 0;
    /// Output rows of the last run, as a sanity anchor.
    std::size_t rows = 0;
};

/// Deterministic benchmark load: short connected bursts at random
/// locations inside a 128 x 128 region, one burst every 800 us, so the
/// event density per microsecond does not depend on the stream length.
/// The stream fits any geometry of at least 128 x 128.
std::vector<Event> gen_bench_stream(std::size_t event_count,
                                    std::uint64_t seed);

/// Runs the detector `repeat` times over the events on a fresh state each
/// time and reports medians. One untimed warm-up run precedes the
/// measured ones.
BenchMeasurement measure_throughput(const std::vector<Event>& events,
                                    const SensorGeometry& geometry,
                                    const ClusterParams& params, int repeat);

}  // namespace evclust
