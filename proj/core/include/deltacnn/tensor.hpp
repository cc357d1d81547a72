#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deltacnn {

struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t plane() const { return height * width; }
    std::size_t size() const { return channels * height * width; }

    friend bool operator==(const Shape&, const Shape&) = default;
};

// Throws ShapeError if any dimension is zero or the element count overflows.
void validate_shape(const Shape& shape);

// Dense channels x height x width array of 32-bit floats.
// Layout: index = c*H*W + y*W + x (channels outermost, row-major planes).
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(const Shape& shape);
    static Tensor from_data(const Shape& shape, std::vector<float> data);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    // Bounds-checked access; throws IndexError.
    float at(std::size_t c, std::size_t y, std::size_t x) const;
    void set(std::size_t c, std::size_t y, std::size_t x, float value);

    // Unchecked access for inner loops.
    float operator()(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[offset(c, y, x)];
    }
    float& operator()(std::size_t c, std::size_t y, std::size_t x) {
        return data_[offset(c, y, x)];
    }

    std::size_t offset(std::size_t c, std::size_t y, std::size_t x) const {
        return (c * shape_.height + y) * shape_.width + x;
    }

    void fill(float value);

    // Exact element equality; +0 and -0 compare bitwise-distinct.
    bool bitwise_equal(const Tensor& other) const;

private:
    Tensor(const Shape& shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {}

    Shape shape_;
    std::vector<float> data_;
};

// Elementwise |a - b|. Throws ShapeError on mismatch.
Tensor abs_diff(const Tensor& a, const Tensor& b);

}  // namespace deltacnn
