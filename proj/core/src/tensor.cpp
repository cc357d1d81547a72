#include "deltacnn/tensor.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

namespace {

std::string describe(const Shape& s) {
    return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
           std::to_string(s.width);
}

}  // namespace

void validate_shape(const Shape& shape) {
    if (shape.channels == 0 || shape.height == 0 || shape.width == 0) {
        throw ShapeError("tensor dimensions must be >= 1, got " + describe(shape));
    }
    constexpr std::size_t limit = std::numeric_limits<std::size_t>::max() / sizeof(float);
    if (shape.height > limit / shape.width || shape.plane() > limit / shape.channels) {
        throw ShapeError("tensor element count overflows: " + describe(shape));
    }
}

Tensor Tensor::zeros(const Shape& shape) {
    validate_shape(shape);
    return Tensor(shape, std::vector<float>(shape.size(), 0.0f));
}

Tensor Tensor::from_data(const Shape& shape, std::vector<float> data) {
    validate_shape(shape);
    if (data.size() != shape.size()) {
        throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape " +
                         describe(shape));
    }
    return Tensor(shape, std::move(data));
}

float Tensor::at(std::size_t c, std::size_t y, std::size_t x) const {
    if (c >= shape_.channels || y >= shape_.height || x >= shape_.width) {
        throw IndexError("index (" + std::to_string(c) + "," + std::to_string(y) + "," +
                         std::to_string(x) + ") out of bounds for " + describe(shape_));
    }
    return data_[offset(c, y, x)];
}

void Tensor::set(std::size_t c, std::size_t y, std::size_t x, float value) {
    if (c >= shape_.channels || y >= shape_.height || x >= shape_.width) {
        throw IndexError("index (" + std::to_string(c) + "," + std::to_string(y) + "," +
                         std::to_string(x) + ") out of bounds for " + describe(shape_));
    }
    data_[offset(c, y, x)] = value;
}

void Tensor::fill(float value) {
    for (float& v : data_) v = value;
}

bool Tensor::bitwise_equal(const Tensor& other) const {
    if (shape_ != other.shape_) return false;
    return data_.empty() ||
           std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

Tensor abs_diff(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("abs_diff shape mismatch: " + describe(a.shape()) + " vs " +
                         describe(b.shape()));
    }
    Tensor out = Tensor::zeros(a.shape());
    auto lhs = a.data();
    auto rhs = b.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::fabs(lhs[i] - rhs[i]);
    return out;
}

}  // namespace deltacnn
