#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deltacnn/change_map.hpp"
#include "deltacnn/dense_layers.hpp"
#include "deltacnn/geometry.hpp"
#include "deltacnn/tensor.hpp"

namespace deltacnn {

// A delta layer's memory. The cached output is also the complete input of
// the next layer, so unchanged values stay readable downstream.
struct LayerState {
    Tensor cached_output;
    bool initialized = false;

    // Allocates a zero cache of the given shape and clears `initialized`.
    void allocate(const Shape& shape);
    // Zeroes the cache and clears `initialized`. Idempotent.
    void reset();
};

// What changed upstream of a layer: a thresholded magnitude map at the
// network input, a binary change map everywhere else.
class ChangeSource {
public:
    static ChangeSource binary(const ChangeMap& map) { return ChangeSource(&map, nullptr, nullptr); }
    static ChangeSource magnitude(const MagnitudeMap& mag, const DeltaPolicy& policy) {
        return ChangeSource(nullptr, &mag, &policy);
    }

    std::size_t height() const;
    std::size_t width() const;

    // any_changed for binary maps, rf_changed under the policy for magnitudes.
    bool window_changed(const RfWindow& window) const;

private:
    ChangeSource(const ChangeMap* map, const MagnitudeMap* mag, const DeltaPolicy* policy)
        : map_(map), mag_(mag), policy_(policy) {}

    const ChangeMap* map_;
    const MagnitudeMap* mag_;
    const DeltaPolicy* policy_;
};

// Result of one delta layer invocation; the full output is state.cached_output.
struct DeltaStep {
    ChangeMap out_map;
    std::size_t recomputed = 0;
    std::size_t total = 0;
};

// Recomputes all output channels at every position whose receptive field the
// change source flags, leaving the rest of the cache untouched. An
// uninitialized state recomputes and marks every position.
DeltaStep delta_conv2d(const Tensor& input, const ChangeSource& change, LayerState& state,
                       const ConvGeometry& g, const ConvWeights& w, const DeltaPolicy& policy);

DeltaStep delta_maxpool2d(const Tensor& input, const ChangeSource& change, LayerState& state,
                          const PoolGeometry& g, const DeltaPolicy& policy);

// Pointwise: recomputes flagged positions (all channels); the outgoing map is
// exactly the set of recomputed positions, i.e. the incoming map.
DeltaStep delta_relu(const Tensor& input, const ChangeSource& change, LayerState& state);

// One stage of the flattened classifier head: a fully connected layer, or a
// ReLU when `fc` is null.
struct HeadStage {
    const FcWeights* fc = nullptr;
};

std::vector<float> head_dense(std::span<const float> flat, std::span<const HeadStage> stages);
std::uint64_t head_macs(std::span<const HeadStage> stages);

// Index of the largest logit; ties go to the lowest index.
std::size_t argmax(std::span<const float> logits);

struct HeadState {
    std::vector<float> logits;
    std::size_t prediction = 0;
    bool initialized = false;

    void reset();
};

// All-or-nothing: with no set bit in in_map (and an initialized state) the
// cached logits stand; otherwise the whole stack runs densely on the
// channel-outermost flattening of input. Returns whether the head ran.
bool delta_head(const Tensor& input, const ChangeMap& in_map, HeadState& state,
                std::span<const HeadStage> stages);

}  // namespace deltacnn
