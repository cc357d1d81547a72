#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "deltacnn/geometry.hpp"
#include "deltacnn/tensor.hpp"

namespace deltacnn {

// Channel-reduced, pre-threshold frame difference. Only exists at the
// network input.
class MagnitudeMap {
public:
    MagnitudeMap() = default;
    MagnitudeMap(std::size_t height, std::size_t width, std::vector<float> values);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    float operator()(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
    const std::vector<float>& values() const { return values_; }

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<float> values_;
};

// Binary spatial mask; a set bit means the position was updated this frame.
class ChangeMap {
public:
    ChangeMap() = default;

    static ChangeMap zeros(std::size_t height, std::size_t width);
    static ChangeMap ones(std::size_t height, std::size_t width);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return bits_.size(); }

    bool test(std::size_t y, std::size_t x) const { return bits_[y * width_ + x] != 0; }
    void set(std::size_t y, std::size_t x, bool value = true) {
        bits_[y * width_ + x] = value ? 1 : 0;
    }

    std::size_t count() const;
    bool any() const { return count() != 0; }
    bool all() const { return count() == size(); }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const ChangeMap&, const ChangeMap&) = default;

private:
    ChangeMap(std::size_t height, std::size_t width, std::uint8_t fill);

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<std::uint8_t> bits_;
};

enum class Norm { L1, L2 };

enum class MarkMode {
    Recomputed,    // mark every recomputed position
    ValueCompare,  // mark recomputed positions whose value moved by more than epsilon
};

struct DeltaPolicy {
    float tau = 0.0f;
    Norm norm = Norm::L1;
    MarkMode mark = MarkMode::Recomputed;
    float epsilon = 0.0f;

    // Throws ConfigError for negative or non-finite tau/epsilon.
    void validate() const;
};

// The mandated state before the first frame: every bit set.
ChangeMap initial_map(std::size_t height, std::size_t width);

// value(y, x) = max over channels of diff(c, y, x).
MagnitudeMap magnitude_from_diff(const Tensor& diff);

// True iff norm(values inside the window) > tau. Out-of-bounds cells count as
// zero. Accumulates in float, row-major over the window.
bool rf_changed(const MagnitudeMap& mag, const RfWindow& window, const DeltaPolicy& policy);

// True iff any in-bounds bit inside the window is set.
bool any_changed(const ChangeMap& map, const RfWindow& window);

// Propagates a map through a k x k / stride s / padding p window layer.
// Output bit (i, j) is set iff any input bit of its window is set.
ChangeMap downsample(const ChangeMap& map, std::size_t k, std::size_t s, std::size_t p);

// Per-pixel threshold of a magnitude map (value > tau), used when dumping the
// input-level map.
ChangeMap threshold_pixels(const MagnitudeMap& mag, float tau);

}  // namespace deltacnn
