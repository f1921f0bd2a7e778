#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "evclust/core.hpp"

namespace evclust {

/// Brute-force ground truth for the streaming detector. Events become
/// vertices of a DAG built by three inductive rules; each connected
/// component is one cluster and its minimal-index vertex is the root.
/// Correctness over speed: every event scans the existing components.

/// Directed edge from a component's root vertex to a later vertex.
struct PolyforestEdge {
    std::size_t root;
    std::size_t vertex;

    friend bool operator==(const PolyforestEdge&, const PolyforestEdge&) = default;
};

struct PolyComponent {
    /// Global event indices, increasing; the first one is the root.
    std::vector<std::size_t> vertex_indices;
    /// Largest timestamp in the component (the last vertex, input is sorted).
    Timestamp max_t = 0;
    /// Packed (y << 16 | x) coordinates of the occupied pixels.
    std::unordered_set<std::uint32_t> occupied;

    std::size_t root_index() const { return vertex_indices.front(); }
};

struct Polyforest {
    std::vector<Event> vertices;
    std::vector<PolyforestEdge> edges;
    /// vertex index -> component id.
    std::vector<std::size_t> component_of;
    std::vector<PolyComponent> components;
};

/// Per-component digest in the output-row format.
struct ComponentSummary {
    Timestamp root_t = 0;
    std::uint16_t root_x = 0;
    std::uint16_t root_y = 0;
    Timestamp end_t = 0;
    std::uint64_t event_count = 0;
    std::uint64_t distinct_pixels = 0;
};

/// Builds the polyforest over a time-sorted event list.
///
/// For each event, in order: if a component has a vertex at the same pixel
/// and was active within delta, the event joins it (this component is
/// provably unique; violations raise Error as a diagnostic). Otherwise,
/// if any component has a vertex within Chebyshev distance d and within
/// delta in time, the event joins the component of the vertex with the
/// smallest time distance (raster order of the vertex, then lowest index,
/// on ties) -- the same policy the streaming detector uses. Otherwise the
/// event starts a singleton component.
///
/// Throws StreamError on unsorted input.
Polyforest build_polyforest(const std::vector<Event>& events, Timestamp delta,
                            int d);

/// One summary per component, in component-creation (= root timestamp)
/// order.
std::vector<ComponentSummary> component_summaries(const Polyforest& forest);

/// Filters summaries down to event_count >= n and distinct_pixels >= m and
/// maps them to output rows, preserving order.
std::vector<ClusterRecord> qualifying_roots(
    const std::vector<ComponentSummary>& summaries, std::uint64_t n,
    std::uint64_t m);

/// Global index of the event at which the component first satisfies both
/// thresholds, or empty if it never does.
std::optional<std::size_t> first_qualifying_index(const Polyforest& forest,
                                                  std::size_t component,
                                                  std::uint64_t n,
                                                  std::uint64_t m);

/// Diff between the oracle's qualifying roots and the streaming output.
struct EquivalenceReport {
    struct FieldMismatch {
        ClusterRecord oracle;
        ClusterRecord stream;
        /// Names of the differing fields: end_t, event_count, pixel_count.
        std::vector<std::string> fields;
    };

    /// Rows equal in every field, paired (oracle, stream).
    std::vector<std::pair<ClusterRecord, ClusterRecord>> matched;
    /// Rows matched by root (t, x, y) but differing elsewhere.
    std::vector<FieldMismatch> field_mismatches;
    std::vector<ClusterRecord> oracle_only;
    std::vector<ClusterRecord> stream_only;

    bool exact() const {
        return field_mismatches.empty() && oracle_only.empty() &&
               stream_only.empty();
    }
    /// True when the only differences are pixel-count fields.
    bool pixel_count_divergence_only() const;
};

/// Pairs up records from both sides by root (t, x, y) and reports the
/// differences; both lists must come from the same stream and parameters.
EquivalenceReport equivalence_report(const std::vector<ClusterRecord>& oracle,
                                     const std::vector<ClusterRecord>& stream);

}  // namespace evclust
