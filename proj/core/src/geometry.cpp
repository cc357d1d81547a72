#include "deltacnn/geometry.hpp"

#include <algorithm>
#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

std::size_t WindowGeometry::output_extent(std::size_t in) const {
    if (kernel == 0 || stride == 0) {
        throw GeometryError("kernel and stride must be >= 1");
    }
    const std::size_t padded = in + 2 * padding;
    if (in == 0 || padded < kernel) {
        throw GeometryError("window k=" + std::to_string(kernel) + " p=" + std::to_string(padding) +
                            " does not fit input extent " + std::to_string(in));
    }
    return (padded - kernel) / stride + 1;
}

ClippedWindow clip(const RfWindow& window, std::size_t height, std::size_t width) {
    const auto k = static_cast<std::int64_t>(window.k);
    const auto h = static_cast<std::int64_t>(height);
    const auto w = static_cast<std::int64_t>(width);
    ClippedWindow out;
    out.y_begin = static_cast<std::size_t>(std::clamp<std::int64_t>(window.y0, 0, h));
    out.y_end = static_cast<std::size_t>(std::clamp<std::int64_t>(window.y0 + k, 0, h));
    out.x_begin = static_cast<std::size_t>(std::clamp<std::int64_t>(window.x0, 0, w));
    out.x_end = static_cast<std::size_t>(std::clamp<std::int64_t>(window.x0 + k, 0, w));
    return out;
}

}  // namespace deltacnn
