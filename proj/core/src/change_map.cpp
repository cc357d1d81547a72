#include "deltacnn/change_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

MagnitudeMap::MagnitudeMap(std::size_t height, std::size_t width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
    if (height == 0 || width == 0) throw ShapeError("magnitude map dimensions must be >= 1");
    if (values_.size() != height * width) {
        throw ShapeError("magnitude map value count does not match " + std::to_string(height) +
                         "x" + std::to_string(width));
    }
}

ChangeMap::ChangeMap(std::size_t height, std::size_t width, std::uint8_t fill)
    : height_(height), width_(width), bits_(height * width, fill) {}

ChangeMap ChangeMap::zeros(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) throw ShapeError("change map dimensions must be >= 1");
    return ChangeMap(height, width, 0);
}

ChangeMap ChangeMap::ones(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) throw ShapeError("change map dimensions must be >= 1");
    return ChangeMap(height, width, 1);
}

std::size_t ChangeMap::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void DeltaPolicy::validate() const {
    if (!std::isfinite(tau) || tau < 0.0f) {
        throw ConfigError("tau must be finite and >= 0, got " + std::to_string(tau));
    }
    if (mark == MarkMode::ValueCompare && (!std::isfinite(epsilon) || epsilon < 0.0f)) {
        throw ConfigError("epsilon must be finite and >= 0, got " + std::to_string(epsilon));
    }
}

ChangeMap initial_map(std::size_t height, std::size_t width) {
    return ChangeMap::ones(height, width);
}

MagnitudeMap magnitude_from_diff(const Tensor& diff) {
    const Shape& s = diff.shape();
    validate_shape(s);
    std::vector<float> values(s.plane(), 0.0f);
    auto src = diff.data();
    for (std::size_t i = 0; i < s.plane(); ++i) values[i] = src[i];
    for (std::size_t c = 1; c < s.channels; ++c) {
        const float* plane = src.data() + c * s.plane();
        for (std::size_t i = 0; i < s.plane(); ++i) values[i] = std::max(values[i], plane[i]);
    }
    return MagnitudeMap(s.height, s.width, std::move(values));
}

bool rf_changed(const MagnitudeMap& mag, const RfWindow& window, const DeltaPolicy& policy) {
    const ClippedWindow w = clip(window, mag.height(), mag.width());
    float acc = 0.0f;
    if (policy.norm == Norm::L1) {
        for (std::size_t y = w.y_begin; y < w.y_end; ++y)
            for (std::size_t x = w.x_begin; x < w.x_end; ++x) acc += mag(y, x);
        return acc > policy.tau;
    }
    for (std::size_t y = w.y_begin; y < w.y_end; ++y)
        for (std::size_t x = w.x_begin; x < w.x_end; ++x) acc += mag(y, x) * mag(y, x);
    return std::sqrt(acc) > policy.tau;
}

bool any_changed(const ChangeMap& map, const RfWindow& window) {
    const ClippedWindow w = clip(window, map.height(), map.width());
    for (std::size_t y = w.y_begin; y < w.y_end; ++y)
        for (std::size_t x = w.x_begin; x < w.x_end; ++x)
            if (map.test(y, x)) return true;
    return false;
}

ChangeMap downsample(const ChangeMap& map, std::size_t k, std::size_t s, std::size_t p) {
    const WindowGeometry g{k, s, p};
    const std::size_t out_h = g.output_extent(map.height());
    const std::size_t out_w = g.output_extent(map.width());
    ChangeMap out = ChangeMap::zeros(out_h, out_w);
    for (std::size_t i = 0; i < out_h; ++i)
        for (std::size_t j = 0; j < out_w; ++j)
            if (any_changed(map, g.window(i, j))) out.set(i, j);
    return out;
}

ChangeMap threshold_pixels(const MagnitudeMap& mag, float tau) {
    ChangeMap out = ChangeMap::zeros(mag.height(), mag.width());
    for (std::size_t y = 0; y < mag.height(); ++y)
        for (std::size_t x = 0; x < mag.width(); ++x)
            if (mag(y, x) > tau) out.set(y, x);
    return out;
}

}  // namespace deltacnn
