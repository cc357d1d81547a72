#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "deltacnn/geometry.hpp"
#include "deltacnn/tensor.hpp"

namespace deltacnn {

// Weights laid out (out_channels, in_channels, k, k), row-major.
struct ConvWeights {
    std::vector<float> weights;
    std::vector<float> bias;

    // Throws ShapeError if sizes disagree with g, ConfigError on non-finite values.
    void validate(const ConvGeometry& g) const;
};

// Weights laid out (out, in), row-major.
struct FcWeights {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<float> weights;
    std::vector<float> bias;

    void validate() const;
};

struct PoolGeometry {
    std::size_t kernel = 2;
    std::size_t stride = 2;

    WindowGeometry window() const { return {kernel, stride, 0}; }
};

Shape conv_output_shape(const Shape& in, const ConvGeometry& g);
Shape pool_output_shape(const Shape& in, const PoolGeometry& g);

// Computes all out_channels values of output position (oy, ox) into `out`
// (length out_channels). Accumulation per channel: +0.0f, then (in_channel,
// ky, kx) lexicographic over in-bounds taps, then + bias. Both engines call
// this, which is what makes their outputs bitwise comparable.
void conv_position(const Tensor& input, const ConvGeometry& g, const ConvWeights& w,
                   std::size_t oy, std::size_t ox, std::span<float> out);

// Per-channel max over the window of output position (oy, ox), row-major scan.
void pool_position(const Tensor& input, const PoolGeometry& g, std::size_t oy, std::size_t ox,
                   std::span<float> out);

inline float relu(float x) { return x > 0.0f ? x : 0.0f; }

Tensor conv2d_dense(const Tensor& input, const ConvGeometry& g, const ConvWeights& w);
Tensor maxpool2d_dense(const Tensor& input, const PoolGeometry& g);
Tensor relu_dense(const Tensor& input);

// out[i] = (sum_j weights[i][j] * input[j], j ascending) + bias[i].
std::vector<float> fc_dense(std::span<const float> input, const FcWeights& w);

// out_channels * H_out * W_out * in_channels * k * k.
std::size_t macs_dense(const ConvGeometry& g, std::size_t out_height, std::size_t out_width);

}  // namespace deltacnn
