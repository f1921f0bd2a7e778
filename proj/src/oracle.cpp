#include "evclust/oracle.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace evclust {

namespace {

std::uint32_t pack(std::uint16_t x, std::uint16_t y) {
    return static_cast<std::uint32_t>(y) << 16 | x;
}

bool within_delta(Timestamp earlier, Timestamp later, Timestamp delta) {
    return later - earlier <= delta;
}

}  // namespace

Polyforest build_polyforest(const std::vector<Event>& events, Timestamp delta,
                            int d) {
    Polyforest forest;
    forest.vertices = events;
    forest.component_of.reserve(events.size());

    for (std::size_t k = 0; k < events.size(); ++k) {
        const Event& e = events[k];
        if (k > 0 && e.t < events[k - 1].t)
            throw StreamError("events are not sorted by timestamp", k);

        // Rule 1: a component with a vertex at this very pixel that was
        // active within delta. At most one component can qualify; more
        // than one means the forest construction itself is broken.
        std::size_t same_pixel = forest.components.size();
        int same_pixel_hits = 0;
        for (std::size_t c = 0; c < forest.components.size(); ++c) {
            const PolyComponent& comp = forest.components[c];
            if (!within_delta(comp.max_t, e.t, delta)) continue;
            if (comp.occupied.count(pack(e.x, e.y))) {
                same_pixel = c;
                ++same_pixel_hits;
            }
        }
        if (same_pixel_hits > 1)
            throw Error("polyforest invariant violated: " +
                        std::to_string(same_pixel_hits) +
                        " same-pixel components qualify for event " +
                        std::to_string(k));

        std::size_t target = forest.components.size();
        if (same_pixel_hits == 1) {
            target = same_pixel;
        } else {
            // Rule 2: the nearest-in-time vertex within Chebyshev distance
            // d and within delta decides the component; ties fall to the
            // raster-first vertex, then the oldest one.
            bool have_best = false;
            Timestamp best_gap = 0;
            PixelCoord best_px{};
            for (std::size_t c = 0; c < forest.components.size(); ++c) {
                const PolyComponent& comp = forest.components[c];
                // A component whose last vertex is already out of reach
                // has no vertex within delta at all.
                if (!within_delta(comp.max_t, e.t, delta)) continue;
                for (std::size_t vi : comp.vertex_indices) {
                    const Event& v = forest.vertices[vi];
                    if (!within_delta(v.t, e.t, delta)) continue;
                    if (chebyshev_distance({v.x, v.y}, {e.x, e.y}) > d)
                        continue;
                    const Timestamp gap = e.t - v.t;
                    const PixelCoord vpx{v.x, v.y};
                    if (!have_best || gap < best_gap ||
                        (gap == best_gap && raster_less(vpx, best_px))) {
                        have_best = true;
                        best_gap = gap;
                        best_px = vpx;
                        target = c;
                    }
                }
            }
            if (!have_best) target = forest.components.size();
        }

        if (target == forest.components.size()) {
            // Rule 3: new singleton component.
            PolyComponent comp;
            comp.vertex_indices.push_back(k);
            comp.max_t = e.t;
            comp.occupied.insert(pack(e.x, e.y));
            forest.components.push_back(std::move(comp));
            forest.component_of.push_back(forest.components.size() - 1);
        } else {
            PolyComponent& comp = forest.components[target];
            forest.edges.push_back({comp.root_index(), k});
            comp.vertex_indices.push_back(k);
            comp.max_t = e.t;
            comp.occupied.insert(pack(e.x, e.y));
            forest.component_of.push_back(target);
        }
    }
    return forest;
}

std::vector<ComponentSummary> component_summaries(const Polyforest& forest) {
    std::vector<ComponentSummary> out;
    out.reserve(forest.components.size());
    for (const PolyComponent& comp : forest.components) {
        const Event& root = forest.vertices[comp.root_index()];
        ComponentSummary s;
        s.root_t = root.t;
        s.root_x = root.x;
        s.root_y = root.y;
        s.end_t = comp.max_t;
        s.event_count = comp.vertex_indices.size();
        s.distinct_pixels = comp.occupied.size();
        out.push_back(s);
    }
    return out;
}

std::vector<ClusterRecord> qualifying_roots(
    const std::vector<ComponentSummary>& summaries, std::uint64_t n,
    std::uint64_t m) {
    std::vector<ClusterRecord> out;
    for (const ComponentSummary& s : summaries) {
        if (s.event_count < n || s.distinct_pixels < m) continue;
        out.push_back({s.root_t, s.root_x, s.root_y, s.end_t, s.event_count,
                       s.distinct_pixels});
    }
    return out;
}

std::optional<std::size_t> first_qualifying_index(const Polyforest& forest,
                                                  std::size_t component,
                                                  std::uint64_t n,
                                                  std::uint64_t m) {
    const PolyComponent& comp = forest.components.at(component);
    std::unordered_set<std::uint32_t> seen;
    std::uint64_t count = 0;
    for (std::size_t vi : comp.vertex_indices) {
        const Event& v = forest.vertices[vi];
        ++count;
        seen.insert(pack(v.x, v.y));
        if (count >= n && seen.size() >= m) return vi;
    }
    return std::nullopt;
}

bool EquivalenceReport::pixel_count_divergence_only() const {
    if (!oracle_only.empty() || !stream_only.empty()) return false;
    for (const FieldMismatch& mm : field_mismatches)
        for (const std::string& f : mm.fields)
            if (f != "pixel_count") return false;
    return true;
}

EquivalenceReport equivalence_report(const std::vector<ClusterRecord>& oracle,
                                     const std::vector<ClusterRecord>& stream) {
    using Key = std::tuple<Timestamp, std::uint16_t, std::uint16_t>;
    std::map<Key, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < oracle.size(); ++i)
        by_root[{oracle[i].root_t, oracle[i].root_x, oracle[i].root_y}]
            .push_back(i);

    EquivalenceReport report;
    std::vector<bool> oracle_used(oracle.size(), false);
    for (const ClusterRecord& s : stream) {
        auto it = by_root.find({s.root_t, s.root_x, s.root_y});
        if (it == by_root.end() || it->second.empty()) {
            report.stream_only.push_back(s);
            continue;
        }
        const std::size_t oi = it->second.front();
        it->second.erase(it->second.begin());
        oracle_used[oi] = true;

        const ClusterRecord& o = oracle[oi];
        std::vector<std::string> fields;
        if (o.end_t != s.end_t) fields.push_back("end_t");
        if (o.event_count != s.event_count) fields.push_back("event_count");
        if (o.pixel_count != s.pixel_count) fields.push_back("pixel_count");
        if (fields.empty())
            report.matched.push_back({o, s});
        else
            report.field_mismatches.push_back({o, s, std::move(fields)});
    }
    for (std::size_t i = 0; i < oracle.size(); ++i)
        if (!oracle_used[i]) report.oracle_only.push_back(oracle[i]);
    return report;
}

}  // namespace evclust
