#include "evclust/clusterer.hpp"

#include <algorithm>
#include <string>

namespace evclust {

namespace {
const SensorGeometry& validated(const SensorGeometry& geom) {
    geom.validate();
    return geom;
}
}  // namespace

PixelState::PixelState(const SensorGeometry& geom)
    : time_surface(geom, kNever),
      root_link_x(geom, kUnlinked),
      root_link_y(geom, kUnlinked),
      grade(geom, 0),
      pixels(geom, 0),
      cluster_begin(geom, 0),
      cluster_end(geom, 0),
      cluster_id(geom, kNoRow),
      compatibility(geom, 0) {}

std::size_t PixelState::size_bytes() const {
    return time_surface.size_bytes() + root_link_x.size_bytes() +
           root_link_y.size_bytes() + grade.size_bytes() +
           pixels.size_bytes() + cluster_begin.size_bytes() +
           cluster_end.size_bytes() + cluster_id.size_bytes() +
           compatibility.size_bytes();
}

StreamClusterer::StreamClusterer(const SensorGeometry& geom,
                                 const ClusterParams& params)
    : geom_(geom), params_(params), state_(validated(geom)) {
    params_.validate();
}

StepOutcome StreamClusterer::process(const Event& e) {
    if (e.t < last_t_)
        throw StreamError("event timestamp " + std::to_string(e.t) +
                              " is earlier than its predecessor " +
                              std::to_string(last_t_),
                          events_processed_);
    if (!geom_.contains(e.x, e.y))
        throw StreamError("event pixel (" + std::to_string(e.x) + "," +
                              std::to_string(e.y) + ") is out of bounds",
                          events_processed_);

    const PixelCoord px{e.x, e.y};
    check_and_clear_stale_link(px);

    StepOutcome out;
    if (is_cluster_member(px, e.t)) {
        out = extend_cluster(root_link(px), e.t);
    } else if (auto anchor = select_anchor(px, e.t)) {
        if (anchor_attachable(*anchor, e.t))
            out = attach_pixel(px, *anchor, e.t);
        else
            out = start_cluster(*anchor, px, e.t);
    } else {
        out = {StepOutcome::Kind::Isolated, std::nullopt};
    }

    // The time surface is written last: an event never sees itself as a
    // fresh neighbor, only strictly earlier events.
    state_.time_surface.at(px) = e.t;
    last_t_ = e.t;
    ++events_processed_;
    return out;
}

bool StreamClusterer::check_and_clear_stale_link(PixelCoord px) {
    if (!is_linked(px)) return false;
    if (state_.compatibility.at(px) == state_.cluster_begin.at(root_link(px)))
        return false;
    state_.root_link_x.at(px) = kUnlinked;
    state_.root_link_y.at(px) = kUnlinked;
    state_.compatibility.at(px) = 0;
    return true;
}

bool StreamClusterer::is_cluster_member(PixelCoord px, Timestamp t) const {
    if (!is_linked(px)) return false;
    const Timestamp end = state_.cluster_end.at(root_link(px));
    return t <= end || t - end <= params_.delta;
}

std::optional<PixelCoord> StreamClusterer::select_anchor(PixelCoord px,
                                                         Timestamp t) const {
    const int x0 = std::max(px.x - params_.d, 0);
    const int x1 = std::min(px.x + params_.d, geom_.width - 1);
    const int y0 = std::max(px.y - params_.d, 0);
    const int y1 = std::min(px.y + params_.d, geom_.height - 1);

    std::optional<PixelCoord> best;
    Timestamp best_surface = 0;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Timestamp ts = state_.time_surface.at(x, y);
            if (ts == kNever || (t > ts && t - ts > params_.delta)) continue;
            // Strict improvement keeps the raster-first pixel on ties.
            if (!best || ts > best_surface) {
                best = PixelCoord{static_cast<std::uint16_t>(x),
                                  static_cast<std::uint16_t>(y)};
                best_surface = ts;
            }
        }
    }
    return best;
}

bool StreamClusterer::anchor_attachable(PixelCoord anchor, Timestamp t) const {
    if (!is_linked(anchor)) return false;
    const PixelCoord root = root_link(anchor);
    // The link must not have been superseded by a newer cluster at the
    // same root, and the linked cluster must still be live; otherwise the
    // anchor acts as if unlinked and a new cluster starts at it.
    return state_.compatibility.at(anchor) == state_.cluster_begin.at(root) &&
           is_cluster_member(anchor, t);
}

StepOutcome StreamClusterer::start_cluster(PixelCoord anchor, PixelCoord px,
                                           Timestamp t) {
    const Timestamp root_t = state_.time_surface.at(anchor);
    state_.root_link_x.at(anchor) = anchor.x;
    state_.root_link_y.at(anchor) = anchor.y;
    state_.root_link_x.at(px) = anchor.x;
    state_.root_link_y.at(px) = anchor.y;
    state_.cluster_begin.at(anchor) = root_t;
    state_.compatibility.at(anchor) = root_t;
    state_.compatibility.at(px) = root_t;
    state_.cluster_end.at(anchor) = t;
    state_.grade.at(anchor) = 2;
    state_.pixels.at(anchor) = anchor == px ? 1 : 2;
    return {StepOutcome::Kind::ClusterFounded, std::nullopt};
}

StepOutcome StreamClusterer::extend_cluster(PixelCoord root, Timestamp t) {
    state_.cluster_end.at(root) = t;
    state_.grade.at(root) += 1;
    return {StepOutcome::Kind::ClusterExtended, publish_or_update(root, t)};
}

StepOutcome StreamClusterer::attach_pixel(PixelCoord px, PixelCoord anchor,
                                          Timestamp t) {
    const PixelCoord root = root_link(anchor);
    state_.root_link_x.at(px) = root.x;
    state_.root_link_y.at(px) = root.y;
    state_.compatibility.at(px) = state_.compatibility.at(anchor);
    state_.cluster_end.at(root) = t;
    state_.grade.at(root) += 1;
    state_.pixels.at(root) += 1;
    return {StepOutcome::Kind::PixelAttached, publish_or_update(root, t)};
}

std::optional<DetectionEvent> StreamClusterer::publish_or_update(
    PixelCoord root, Timestamp t) {
    if (state_.grade.at(root) < params_.n || state_.pixels.at(root) < params_.m)
        return std::nullopt;

    const std::int64_t id = state_.cluster_id.at(root);
    if (id > kNoRow && t - rows_[static_cast<std::size_t>(id)].end_t <=
                           params_.delta) {
        ClusterRecord& row = rows_[static_cast<std::size_t>(id)];
        row.end_t = state_.cluster_end.at(root);
        row.event_count = state_.grade.at(root);
        row.pixel_count = state_.pixels.at(root);
        return DetectionEvent{static_cast<std::size_t>(id),
                              DetectionEvent::Freshness::UpdatedRow, row};
    }

    ClusterRecord row;
    row.root_t = state_.cluster_begin.at(root);
    row.root_x = root.x;
    row.root_y = root.y;
    row.end_t = state_.cluster_end.at(root);
    row.event_count = state_.grade.at(root);
    row.pixel_count = state_.pixels.at(root);
    rows_.push_back(row);
    state_.cluster_id.at(root) = static_cast<std::int64_t>(rows_.size() - 1);
    return DetectionEvent{rows_.size() - 1, DetectionEvent::Freshness::NewRow,
                          row};
}

}  // namespace evclust
