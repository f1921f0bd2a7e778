#include "evclust/core.hpp"

#include <algorithm>

namespace evclust {

void SensorGeometry::validate() const {
    if (width < 1 || height < 1)
        throw Error("sensor geometry must have positive width and height");
    if (width > 65535 || height > 65535)
        throw Error("sensor geometry exceeds the 16-bit coordinate range");
}

void ClusterParams::validate() const {
    if (delta < 1) throw Error("delta must be at least 1 microsecond");
    if (d < 0) throw Error("spatial radius d must be non-negative");
    if (n < 3) throw Error("event threshold n must be at least 3");
    if (m < 1) throw Error("pixel threshold m must be at least 1");
}

std::vector<PixelCoord> chebyshev_neighbors(PixelCoord center, int d,
                                            const SensorGeometry& geom) {
    const int x0 = std::max(center.x - d, 0);
    const int x1 = std::min(center.x + d, geom.width - 1);
    const int y0 = std::max(center.y - d, 0);
    const int y1 = std::min(center.y + d, geom.height - 1);

    std::vector<PixelCoord> out;
    out.reserve(static_cast<std::size_t>(x1 - x0 + 1) * (y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            out.push_back({static_cast<std::uint16_t>(x),
                           static_cast<std::uint16_t>(y)});
    return out;
}

}  // namespace evclust
