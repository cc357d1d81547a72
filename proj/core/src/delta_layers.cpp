#include "deltacnn/delta_layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

namespace {

void require_state(const LayerState& state, const Shape& expected, const char* layer) {
    if (state.cached_output.empty() || state.cached_output.shape() != expected) {
        throw ConfigError(std::string(layer) + ": layer state does not match the layer output shape");
    }
}

void require_source(const ChangeSource& change, const Shape& input, const char* layer) {
    if (change.height() != input.height || change.width() != input.width) {
        throw ShapeError(std::string(layer) + ": change map " + std::to_string(change.height()) +
                         "x" + std::to_string(change.width()) + " does not match input plane " +
                         std::to_string(input.height) + "x" + std::to_string(input.width));
    }
}

// Shared position loop for windowed layers. `compute` fills one output column.
template <typename Compute>
DeltaStep run_windowed(const ChangeSource& change, LayerState& state, const WindowGeometry& win,
                       const DeltaPolicy& policy, Compute&& compute) {
    Tensor& cache = state.cached_output;
    const Shape& out = cache.shape();
    DeltaStep step{ChangeMap::zeros(out.height, out.width), 0, out.plane()};
    std::vector<float> column(out.channels);
    const bool full = !state.initialized;
    const bool compare = !full && policy.mark == MarkMode::ValueCompare;
    for (std::size_t i = 0; i < out.height; ++i) {
        for (std::size_t j = 0; j < out.width; ++j) {
            if (!full && !change.window_changed(win.window(i, j))) continue;
            compute(i, j, std::span<float>(column));
            ++step.recomputed;
            float moved = 0.0f;
            for (std::size_t c = 0; c < out.channels; ++c) {
                float& slot = cache(c, i, j);
                if (compare) moved = std::max(moved, std::fabs(column[c] - slot));
                slot = column[c];
            }
            if (!compare || moved > policy.epsilon) step.out_map.set(i, j);
        }
    }
    state.initialized = true;
    return step;
}

}  // namespace

void LayerState::allocate(const Shape& shape) {
    cached_output = Tensor::zeros(shape);
    initialized = false;
}

void LayerState::reset() {
    cached_output.fill(0.0f);
    initialized = false;
}

std::size_t ChangeSource::height() const { return map_ ? map_->height() : mag_->height(); }

std::size_t ChangeSource::width() const { return map_ ? map_->width() : mag_->width(); }

bool ChangeSource::window_changed(const RfWindow& window) const {
    return map_ ? any_changed(*map_, window) : rf_changed(*mag_, window, *policy_);
}

DeltaStep delta_conv2d(const Tensor& input, const ChangeSource& change, LayerState& state,
                       const ConvGeometry& g, const ConvWeights& w, const DeltaPolicy& policy) {
    const Shape out_shape = conv_output_shape(input.shape(), g);
    require_state(state, out_shape, "delta_conv2d");
    require_source(change, input.shape(), "delta_conv2d");
    w.validate(g);
    return run_windowed(change, state, g.window(), policy,
                        [&](std::size_t i, std::size_t j, std::span<float> column) {
                            conv_position(input, g, w, i, j, column);
                        });
}

DeltaStep delta_maxpool2d(const Tensor& input, const ChangeSource& change, LayerState& state,
                          const PoolGeometry& g, const DeltaPolicy& policy) {
    const Shape out_shape = pool_output_shape(input.shape(), g);
    require_state(state, out_shape, "delta_maxpool2d");
    require_source(change, input.shape(), "delta_maxpool2d");
    return run_windowed(change, state, g.window(), policy,
                        [&](std::size_t i, std::size_t j, std::span<float> column) {
                            pool_position(input, g, i, j, column);
                        });
}

DeltaStep delta_relu(const Tensor& input, const ChangeSource& change, LayerState& state) {
    require_state(state, input.shape(), "delta_relu");
    require_source(change, input.shape(), "delta_relu");
    // Recomputed marking: the out map is the recompute set.
    const DeltaPolicy pass_through{};
    return run_windowed(change, state, WindowGeometry{1, 1, 0}, pass_through,
                        [&](std::size_t i, std::size_t j, std::span<float> column) {
                            for (std::size_t c = 0; c < column.size(); ++c)
                                column[c] = relu(input(c, i, j));
                        });
}

std::vector<float> head_dense(std::span<const float> flat, std::span<const HeadStage> stages) {
    std::vector<float> act(flat.begin(), flat.end());
    for (const HeadStage& stage : stages) {
        if (stage.fc) {
            act = fc_dense(act, *stage.fc);
        } else {
            for (float& v : act) v = relu(v);
        }
    }
    return act;
}

std::uint64_t head_macs(std::span<const HeadStage> stages) {
    std::uint64_t macs = 0;
    for (const HeadStage& stage : stages)
        if (stage.fc) macs += static_cast<std::uint64_t>(stage.fc->in) * stage.fc->out;
    return macs;
}

std::size_t argmax(std::span<const float> logits) {
    if (logits.empty()) throw ShapeError("argmax of an empty logit vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return best;
}

void HeadState::reset() {
    logits.clear();
    prediction = 0;
    initialized = false;
}

bool delta_head(const Tensor& input, const ChangeMap& in_map, HeadState& state,
                std::span<const HeadStage> stages) {
    if (in_map.height() != input.shape().height || in_map.width() != input.shape().width) {
        throw ShapeError("delta_head: change map does not match the flattened input plane");
    }
    if (state.initialized && !in_map.any()) return false;
    state.logits = head_dense(input.data(), stages);
    state.prediction = argmax(state.logits);
    state.initialized = true;
    return true;
}

}  // namespace deltacnn
