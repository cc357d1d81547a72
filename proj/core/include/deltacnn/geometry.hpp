#pragma once

#include <cstddef>
#include <cstdint>

namespace deltacnn {

// Square k x k input window of one output position. Offsets are signed
// because zero padding roots border windows outside the input.
struct RfWindow {
    std::int64_t y0 = 0;
    std::int64_t x0 = 0;
    std::size_t k = 1;
};

// Sliding-window geometry shared by convolution and pooling.
struct WindowGeometry {
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;

    // floor((in + 2p - k) / s) + 1; throws GeometryError when that is < 1
    // or when kernel/stride are zero.
    std::size_t output_extent(std::size_t in) const;

    RfWindow window(std::size_t out_y, std::size_t out_x) const {
        return {static_cast<std::int64_t>(out_y * stride) - static_cast<std::int64_t>(padding),
                static_cast<std::int64_t>(out_x * stride) - static_cast<std::int64_t>(padding),
                kernel};
    }
};

struct ConvGeometry {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;

    WindowGeometry window() const { return {kernel, stride, padding}; }

    // Multiply-accumulates needed to produce all channels of one output position.
    std::size_t macs_per_position() const {
        return out_channels * in_channels * kernel * kernel;
    }
};

// Clips a window against an H x W grid: [y_begin, y_end) x [x_begin, x_end).
struct ClippedWindow {
    std::size_t y_begin = 0;
    std::size_t y_end = 0;
    std::size_t x_begin = 0;
    std::size_t x_end = 0;

    bool empty() const { return y_begin >= y_end || x_begin >= x_end; }
};

ClippedWindow clip(const RfWindow& window, std::size_t height, std::size_t width);

}  // namespace deltacnn
