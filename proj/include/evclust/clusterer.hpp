#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "evclust/core.hpp"
#include "evclust/grid.hpp"

namespace evclust {

/// time_surface value of a pixel that has never reported an event. A
/// distinct sentinel (not 0) so that start-of-stream events cannot look
/// like fresh neighbors.
inline constexpr Timestamp kNever = std::numeric_limits<Timestamp>::max();

/// root_link_x/root_link_y value of a pixel that is not related to any
/// cluster.
inline constexpr std::int32_t kUnlinked = -1;

/// cluster_id value of a pixel that never rooted an output row.
inline constexpr std::int64_t kNoRow = -1;

/// The per-pixel dynamic arrays driving the detector. One cell per pixel,
/// dense; memory scales with the pixel count, never with the event count.
struct PixelState {
    /// Timestamp of the pixel's last event, or kNever.
    Grid<Timestamp> time_surface;
    /// Coordinates of the root pixel of the last cluster this pixel was
    /// related to, or kUnlinked. Both are unlinked or both valid.
    Grid<std::int32_t> root_link_x;
    Grid<std::int32_t> root_link_y;
    /// Event count of the last cluster rooted at this pixel.
    Grid<std::uint32_t> grade;
    /// Contributing-pixel count of the cluster rooted at this pixel.
    Grid<std::uint32_t> pixels;
    /// Timestamp of the first event of the cluster rooted at this pixel.
    Grid<Timestamp> cluster_begin;
    /// Timestamp of the last event of the cluster rooted at this pixel.
    Grid<Timestamp> cluster_end;
    /// Output-row index of the last cluster rooted at this pixel, or kNoRow.
    Grid<std::int64_t> cluster_id;
    /// Begin-timestamp of the last cluster this pixel was related to; a
    /// mismatch against the root's cluster_begin marks the link as stale.
    Grid<Timestamp> compatibility;

    explicit PixelState(const SensorGeometry& geom);

    std::size_t size_bytes() const;
};

/// Row action taken on the output list by one event.
struct DetectionEvent {
    enum class Freshness { NewRow, UpdatedRow };

    std::size_t row_index = 0;
    Freshness freshness = Freshness::NewRow;
    /// Snapshot of the row right after this event's update.
    ClusterRecord record;
};

/// What one event did to the state.
struct StepOutcome {
    enum class Kind { Isolated, ClusterFounded, ClusterExtended, PixelAttached };

    Kind kind = Kind::Isolated;
    /// Present only when the event crossed or maintained the reporting
    /// thresholds, which can happen on extend/attach but never on founding
    /// (founding sets the event count to 2 and n >= 3).
    std::optional<DetectionEvent> detection;
};

/// Single-pass, event-driven cluster detector.
///
/// Consumes a time-sorted event stream one event at a time and maintains
/// the per-pixel arrays above. Pixels remember the root of the cluster
/// they last joined, so every decision needs only the event's own pixel
/// and its (2d+1) x (2d+1) neighborhood: the cost per event is constant in
/// both the stream length and the sensor resolution. Root links always
/// point directly at root pixels (never at other members), so there is no
/// chain chasing.
///
/// An event is handled by the first matching rule:
///   1. Its pixel links to a root whose cluster is still live
///      (t - cluster_end <= delta): the event extends that cluster.
///   2. Some neighbor within Chebyshev distance d reported an event at
///      most delta ago: the neighbor with the smallest time distance
///      (raster order on ties) becomes the anchor. If the anchor links to
///      a live, non-replaced cluster, the event's pixel attaches to that
///      cluster's root; otherwise the anchor's previous event becomes the
///      root of a new cluster.
///   3. Otherwise the event is isolated and only refreshes the time
///      surface.
///
/// A cluster is reported (appended to results()) the moment it reaches n
/// events on m distinct pixels, and its row is updated in place while it
/// keeps growing. A root pixel that later starts a new cluster after a
/// quiet gap gets a fresh row; rows are never deleted.
class StreamClusterer {
public:
    /// Throws Error on zero-area geometry or invalid parameters.
    StreamClusterer(const SensorGeometry& geom, const ClusterParams& params);

    /// Processes the next event of the stream.
    /// Throws StreamError if e is out of bounds or earlier than the
    /// previous event (equal timestamps are fine, in arrival order).
    StepOutcome process(const Event& e);

    /// Output rows in creation order.
    const std::vector<ClusterRecord>& results() const { return rows_; }

    // --- decision steps, exposed for targeted testing ---

    /// Clears the pixel's root link (and compatibility) iff it points at a
    /// root that has since begun a newer cluster. Returns true when the
    /// reset happened; false leaves the state untouched.
    bool check_and_clear_stale_link(PixelCoord px);

    /// True iff the pixel links to a root and t is within delta of that
    /// cluster's end: the event at (px, t) belongs to the linked cluster.
    bool is_cluster_member(PixelCoord px, Timestamp t) const;

    /// Among the in-bounds pixels of the d-neighborhood of px (px itself
    /// included) whose time surface is within delta of t, returns the one
    /// with the smallest time distance; raster order breaks ties. Empty
    /// when no neighbor qualifies.
    std::optional<PixelCoord> select_anchor(PixelCoord px, Timestamp t) const;

    // --- introspection ---

    const PixelState& state() const { return state_; }
    const SensorGeometry& geometry() const { return geom_; }
    const ClusterParams& params() const { return params_; }

    bool is_linked(PixelCoord px) const {
        return state_.root_link_x.at(px) >= 0;
    }
    /// Root this pixel points at; only meaningful when is_linked(px).
    PixelCoord root_link(PixelCoord px) const {
        return {static_cast<std::uint16_t>(state_.root_link_x.at(px)),
                static_cast<std::uint16_t>(state_.root_link_y.at(px))};
    }

    std::uint64_t events_processed() const { return events_processed_; }

    /// Bytes held by the per-pixel arrays (excludes the output list).
    std::size_t state_memory_bytes() const { return state_.size_bytes(); }

private:
    bool anchor_attachable(PixelCoord anchor, Timestamp t) const;
    StepOutcome start_cluster(PixelCoord anchor, PixelCoord px, Timestamp t);
    StepOutcome extend_cluster(PixelCoord root, Timestamp t);
    StepOutcome attach_pixel(PixelCoord px, PixelCoord anchor, Timestamp t);
    std::optional<DetectionEvent> publish_or_update(PixelCoord root, Timestamp t);

    SensorGeometry geom_;
    ClusterParams params_;
    PixelState state_;
    std::vector<ClusterRecord> rows_;
    Timestamp last_t_ = 0;
    std::uint64_t events_processed_ = 0;
};

}  // namespace evclust
