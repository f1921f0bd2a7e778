#pragma once

#include <cstddef>
#include <vector>

#include "evclust/core.hpp"

namespace evclust {

/// Dense row-major width x height array, one cell per pixel.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(const SensorGeometry& geom, T initial)
        : width_(geom.width),
          cells_(static_cast<std::size_t>(geom.pixel_count()), initial) {}

    T& at(int x, int y) { return cells_[idx(x, y)]; }
    const T& at(int x, int y) const { return cells_[idx(x, y)]; }
    T& at(PixelCoord c) { return at(c.x, c.y); }
    const T& at(PixelCoord c) const { return at(c.x, c.y); }

    void fill(T value) { cells_.assign(cells_.size(), value); }

    std::size_t size_bytes() const { return cells_.size() * sizeof(T); }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    std::vector<T> cells_;
};

}  // namespace evclust
