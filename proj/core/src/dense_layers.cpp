#include "deltacnn/dense_layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

namespace {

bool all_finite(const std::vector<float>& v) {
    return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

}  // namespace

void ConvWeights::validate(const ConvGeometry& g) const {
    if (weights.size() != g.macs_per_position()) {
        throw ShapeError("conv weight count " + std::to_string(weights.size()) +
                         " does not match geometry (" + std::to_string(g.macs_per_position()) + ")");
    }
    if (bias.size() != g.out_channels) {
        throw ShapeError("conv bias count " + std::to_string(bias.size()) + " does not match " +
                         std::to_string(g.out_channels) + " output channels");
    }
    if (!all_finite(weights) || !all_finite(bias)) throw ConfigError("conv weights must be finite");
}

void FcWeights::validate() const {
    if (in == 0 || out == 0) throw ShapeError("fc dimensions must be >= 1");
    if (weights.size() != in * out || bias.size() != out) {
        throw ShapeError("fc weight/bias sizes do not match " + std::to_string(out) + "x" +
                         std::to_string(in));
    }
    if (!all_finite(weights) || !all_finite(bias)) throw ConfigError("fc weights must be finite");
}

Shape conv_output_shape(const Shape& in, const ConvGeometry& g) {
    if (in.channels != g.in_channels) {
        throw ShapeError("conv expects " + std::to_string(g.in_channels) + " input channels, got " +
                         std::to_string(in.channels));
    }
    if (g.out_channels == 0) throw GeometryError("conv needs >= 1 output channel");
    const WindowGeometry w = g.window();
    return {g.out_channels, w.output_extent(in.height), w.output_extent(in.width)};
}

Shape pool_output_shape(const Shape& in, const PoolGeometry& g) {
    if (in.height < g.kernel || in.width < g.kernel) {
        throw GeometryError("pool window " + std::to_string(g.kernel) +
                            " larger than input plane " + std::to_string(in.height) + "x" +
                            std::to_string(in.width));
    }
    const WindowGeometry w = g.window();
    return {in.channels, w.output_extent(in.height), w.output_extent(in.width)};
}

void conv_position(const Tensor& input, const ConvGeometry& g, const ConvWeights& w,
                   std::size_t oy, std::size_t ox, std::span<float> out) {
    const Shape& s = input.shape();
    const ClippedWindow win = clip(g.window().window(oy, ox), s.height, s.width);
    const auto y0 = static_cast<std::int64_t>(oy * g.stride) - static_cast<std::int64_t>(g.padding);
    const auto x0 = static_cast<std::int64_t>(ox * g.stride) - static_cast<std::int64_t>(g.padding);
    const std::size_t kk = g.kernel * g.kernel;
    const float* in = input.data().data();
    for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
        const float* filter = w.weights.data() + oc * g.in_channels * kk;
        float acc = 0.0f;
        for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
            const float* plane = in + ic * s.plane();
            const float* taps = filter + ic * kk;
            for (std::size_t y = win.y_begin; y < win.y_end; ++y) {
                const std::size_t ky = static_cast<std::size_t>(static_cast<std::int64_t>(y) - y0);
                const float* row = plane + y * s.width;
                const float* trow = taps + ky * g.kernel;
                for (std::size_t x = win.x_begin; x < win.x_end; ++x) {
                    const std::size_t kx =
                        static_cast<std::size_t>(static_cast<std::int64_t>(x) - x0);
                    acc += trow[kx] * row[x];
                }
            }
        }
        out[oc] = acc + w.bias[oc];
    }
}

void pool_position(const Tensor& input, const PoolGeometry& g, std::size_t oy, std::size_t ox,
                   std::span<float> out) {
    const Shape& s = input.shape();
    const std::size_t y0 = oy * g.stride;
    const std::size_t x0 = ox * g.stride;
    for (std::size_t c = 0; c < s.channels; ++c) {
        float best = input(c, y0, x0);
        for (std::size_t y = y0; y < y0 + g.kernel; ++y)
            for (std::size_t x = x0; x < x0 + g.kernel; ++x) {
                const float v = input(c, y, x);
                if (v > best) best = v;
            }
        out[c] = best;
    }
}

Tensor conv2d_dense(const Tensor& input, const ConvGeometry& g, const ConvWeights& w) {
    const Shape out_shape = conv_output_shape(input.shape(), g);
    w.validate(g);
    Tensor out = Tensor::zeros(out_shape);
    std::vector<float> column(g.out_channels);
    for (std::size_t i = 0; i < out_shape.height; ++i)
        for (std::size_t j = 0; j < out_shape.width; ++j) {
            conv_position(input, g, w, i, j, column);
            for (std::size_t oc = 0; oc < g.out_channels; ++oc) out(oc, i, j) = column[oc];
        }
    return out;
}

Tensor maxpool2d_dense(const Tensor& input, const PoolGeometry& g) {
    const Shape out_shape = pool_output_shape(input.shape(), g);
    Tensor out = Tensor::zeros(out_shape);
    std::vector<float> column(out_shape.channels);
    for (std::size_t i = 0; i < out_shape.height; ++i)
        for (std::size_t j = 0; j < out_shape.width; ++j) {
            pool_position(input, g, i, j, column);
            for (std::size_t c = 0; c < out_shape.channels; ++c) out(c, i, j) = column[c];
        }
    return out;
}

Tensor relu_dense(const Tensor& input) {
    Tensor out = Tensor::zeros(input.shape());
    auto src = input.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = relu(src[i]);
    return out;
}

std::vector<float> fc_dense(std::span<const float> input, const FcWeights& w) {
    if (input.size() != w.in) {
        throw ShapeError("fc expects " + std::to_string(w.in) + " inputs, got " +
                         std::to_string(input.size()));
    }
    if (w.weights.size() != w.in * w.out || w.bias.size() != w.out) {
        throw ShapeError("fc weight/bias sizes do not match declared dimensions");
    }
    std::vector<float> out(w.out);
    for (std::size_t i = 0; i < w.out; ++i) {
        const float* row = w.weights.data() + i * w.in;
        float acc = 0.0f;
        for (std::size_t j = 0; j < w.in; ++j) acc += row[j] * input[j];
        out[i] = acc + w.bias[i];
    }
    return out;
}

std::size_t macs_dense(const ConvGeometry& g, std::size_t out_height, std::size_t out_width) {
    return out_height * out_width * g.macs_per_position();
}

}  // namespace deltacnn
