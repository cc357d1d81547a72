#include "deltacnn/model.hpp"

#include <set>
#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string layer_label(const LayerSpec& layer, std::size_t index) {
    return "layer " + std::to_string(index) + " (" + layer.name + ")";
}

}  // namespace

void NetworkSpec::validate() const {
    try {
        validate_shape(input_shape);
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("invalid input shape: ") + e.what());
    }
    if (layers.empty()) throw ConfigError("network has no layers");

    std::set<std::string> names;
    std::size_t flattens = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].name.empty()) throw ConfigError("layer " + std::to_string(i) + " has no name");
        if (layers[i].name == "input" || !names.insert(layers[i].name).second) {
            throw ConfigError("duplicate or reserved layer name '" + layers[i].name + "'");
        }
        flattens += layers[i].is<FlattenLayer>() ? 1 : 0;
    }
    if (flattens != 1) throw ConfigError("network must contain exactly one flatten layer");

    Shape current = input_shape;
    bool flattened = false;
    std::size_t flat_size = 0;
    std::size_t spatial = 0;
    std::size_t fcs = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& layer = layers[i];
        const std::string label = layer_label(layer, i);
        try {
            std::visit(overloaded{
                           [&](const ConvLayer& conv) {
                               if (flattened) throw ConfigError(label + ": conv after flatten");
                               current = conv_output_shape(current, conv.geometry);
                               ++spatial;
                           },
                           [&](const PoolLayer& pool) {
                               if (flattened) throw ConfigError(label + ": maxpool after flatten");
                               if (pool.geometry.kernel == 0 || pool.geometry.stride == 0) {
                                   throw ConfigError(label + ": pool kernel/stride must be >= 1");
                               }
                               current = pool_output_shape(current, pool.geometry);
                               ++spatial;
                           },
                           [&](const ReluLayer&) {
                               if (!flattened) ++spatial;
                           },
                           [&](const FlattenLayer&) {
                               flattened = true;
                               flat_size = current.size();
                           },
                           [&](const FcLayer& fc) {
                               if (!flattened) throw ConfigError(label + ": fc before flatten");
                               if (fc.weights.in != flat_size || fc.weights.out == 0) {
                                   throw ConfigError(label + ": fc expects " +
                                                     std::to_string(fc.weights.in) +
                                                     " inputs but receives " +
                                                     std::to_string(flat_size));
                               }
                               flat_size = fc.weights.out;
                               ++fcs;
                           },
                       },
                       layer.kind);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(label + ": " + e.what());
        }
    }
    if (spatial == 0) throw ConfigError("network needs at least one layer before flatten");
    if (fcs == 0) throw ConfigError("network needs at least one fc layer after flatten");
    if (!layers.back().is<FcLayer>()) throw ConfigError("network must end with an fc layer");
}

void NetworkSpec::validate_weights() const {
    validate();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& layer = layers[i];
        try {
            if (const auto* conv = std::get_if<ConvLayer>(&layer.kind)) {
                conv->weights.validate(conv->geometry);
            } else if (const auto* fc = std::get_if<FcLayer>(&layer.kind)) {
                fc->weights.validate();
            }
        } catch (const Error& e) {
            throw ConfigError(layer_label(layer, i) + ": " + e.what());
        }
    }
}

std::size_t NetworkSpec::flatten_index() const {
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (layers[i].is<FlattenLayer>()) return i;
    throw ConfigError("network has no flatten layer");
}

std::vector<Shape> NetworkSpec::spatial_shapes() const {
    std::vector<Shape> shapes;
    Shape current = input_shape;
    for (std::size_t i = 0; i < flatten_index(); ++i) {
        if (const auto* conv = std::get_if<ConvLayer>(&layers[i].kind)) {
            current = conv_output_shape(current, conv->geometry);
        } else if (const auto* pool = std::get_if<PoolLayer>(&layers[i].kind)) {
            current = pool_output_shape(current, pool->geometry);
        }
        shapes.push_back(current);
    }
    return shapes;
}

std::size_t NetworkSpec::num_classes() const {
    const auto* fc = std::get_if<FcLayer>(&layers.back().kind);
    if (!fc) throw ConfigError("network must end with an fc layer");
    return fc->weights.out;
}

std::vector<HeadStage> NetworkSpec::head_stages() const {
    std::vector<HeadStage> stages;
    for (std::size_t i = flatten_index() + 1; i < layers.size(); ++i) {
        const auto* fc = std::get_if<FcLayer>(&layers[i].kind);
        stages.push_back(HeadStage{fc ? &fc->weights : nullptr});
    }
    return stages;
}

std::uint64_t NetworkSpec::dense_macs_per_frame() const {
    const std::vector<Shape> shapes = spatial_shapes();
    std::uint64_t macs = 0;
    for (std::size_t i = 0; i < shapes.size(); ++i)
        if (const auto* conv = std::get_if<ConvLayer>(&layers[i].kind))
            macs += macs_dense(conv->geometry, shapes[i].height, shapes[i].width);
    return macs + head_macs(head_stages());
}

NetworkSpec reference_architecture() {
    NetworkSpec net;
    net.input_shape = {1, 64, 64};
    auto conv = [](std::size_t in, std::size_t out) {
        return ConvLayer{ConvGeometry{in, out, 3, 1, 1}, {}};
    };
    auto fc = [](std::size_t in, std::size_t out) {
        FcLayer layer;
        layer.weights.in = in;
        layer.weights.out = out;
        return layer;
    };
    net.layers = {
        {"conv1", conv(1, 16)},
        {"relu1", ReluLayer{}},
        {"pool1", PoolLayer{{2, 2}}},
        {"conv2", conv(16, 32)},
        {"relu2", ReluLayer{}},
        {"pool2", PoolLayer{{2, 2}}},
        {"flatten", FlattenLayer{}},
        {"fc1", fc(32 * 16 * 16, 128)},
        {"relu3", ReluLayer{}},
        {"fc2", fc(128, 10)},
    };
    return net;
}

// ---------------------------------------------------------------------------
// Dense engine

namespace {

// Runs the spatial part densely; `each` sees every layer output in order.
template <typename Each>
Tensor run_spatial_dense(const NetworkSpec& net, const Tensor& frame, Each&& each) {
    if (frame.shape() != net.input_shape) {
        throw ShapeError("frame shape does not match the network input shape");
    }
    Tensor current = frame;
    const std::size_t flatten = net.flatten_index();
    for (std::size_t i = 0; i < flatten; ++i) {
        const LayerSpec& layer = net.layers[i];
        std::uint64_t per_position = 0;
        if (const auto* conv = std::get_if<ConvLayer>(&layer.kind)) {
            current = conv2d_dense(current, conv->geometry, conv->weights);
            per_position = conv->geometry.macs_per_position();
        } else if (const auto* pool = std::get_if<PoolLayer>(&layer.kind)) {
            current = maxpool2d_dense(current, pool->geometry);
        } else {
            current = relu_dense(current);
        }
        each(i, current, per_position);
    }
    return current;
}

}  // namespace

FrameResult forward_dense(const NetworkSpec& net, const Tensor& frame) {
    const Tensor last = run_spatial_dense(net, frame, [](std::size_t, const Tensor&, std::uint64_t) {});
    FrameResult r;
    r.logits = head_dense(last.data(), net.head_stages());
    r.prediction = argmax(r.logits);
    return r;
}

FrameResult forward_dense(const NetworkSpec& net, const Tensor& frame, RunMetrics& metrics,
                          std::size_t frame_idx) {
    metrics.frame(frame_idx);
    const Tensor last = run_spatial_dense(
        net, frame, [&](std::size_t i, const Tensor& out, std::uint64_t per_position) {
            const std::size_t plane = out.shape().plane();
            metrics.record_layer(frame_idx, net.layers[i].name, plane, plane, per_position);
        });
    const std::vector<HeadStage> stages = net.head_stages();
    FrameResult r;
    r.logits = head_dense(last.data(), stages);
    r.prediction = argmax(r.logits);
    metrics.record_layer(frame_idx, "head", 1, 1, head_macs(stages));
    metrics.frame(frame_idx).head_activated = true;
    return r;
}

std::vector<Tensor> dense_activations(const NetworkSpec& net, const Tensor& frame) {
    std::vector<Tensor> acts;
    run_spatial_dense(net, frame,
                      [&](std::size_t, const Tensor& out, std::uint64_t) { acts.push_back(out); });
    return acts;
}

// ---------------------------------------------------------------------------
// Delta engine

DeltaEngine::DeltaEngine(const NetworkSpec& net, DeltaPolicy policy)
    : net_(net), policy_(policy) {
    net_.validate_weights();
    policy_.validate();
    for (const Shape& shape : net_.spatial_shapes()) states_.emplace_back().allocate(shape);
    head_stages_ = net_.head_stages();
}

void DeltaEngine::reset() {
    for (LayerState& s : states_) s.reset();
    head_.reset();
    prev_frame_.reset();
}

DeltaFrameResult DeltaEngine::process(const Tensor& frame, RunMetrics& metrics,
                                      std::size_t frame_idx) {
    metrics.frame(frame_idx);
    return step(frame, &metrics, frame_idx);
}

DeltaFrameResult DeltaEngine::process(const Tensor& frame) { return step(frame, nullptr, 0); }

DeltaFrameResult DeltaEngine::step(const Tensor& frame, RunMetrics* metrics, std::size_t frame_idx) {
    const Shape& in = net_.input_shape;
    if (frame.shape() != in) throw ShapeError("frame shape does not match the network input shape");
    if (states_.size() != net_.flatten_index()) {
        throw ConfigError("delta engine state diverged from the network spec");
    }

    DeltaFrameResult result;
    result.maps.reserve(states_.size() + 1);

    MagnitudeMap magnitude;
    std::optional<ChangeSource> source;
    if (!prev_frame_) {
        result.maps.push_back({"input", initial_map(in.height, in.width)});
        source = ChangeSource::binary(result.maps.back().map);
    } else {
        magnitude = magnitude_from_diff(abs_diff(frame, *prev_frame_));
        result.maps.push_back({"input", threshold_pixels(magnitude, policy_.tau)});
        source = ChangeSource::magnitude(magnitude, policy_);
    }

    const Tensor* current = &frame;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        const LayerSpec& layer = net_.layers[i];
        LayerState& state = states_[i];
        DeltaStep step;
        std::uint64_t per_position = 0;
        if (const auto* conv = std::get_if<ConvLayer>(&layer.kind)) {
            step = delta_conv2d(*current, *source, state, conv->geometry, conv->weights, policy_);
            per_position = conv->geometry.macs_per_position();
        } else if (const auto* pool = std::get_if<PoolLayer>(&layer.kind)) {
            step = delta_maxpool2d(*current, *source, state, pool->geometry, policy_);
        } else {
            step = delta_relu(*current, *source, state);
        }
        if (metrics) {
            metrics->record_layer(frame_idx, layer.name, step.recomputed, step.total, per_position);
        }
        current = &state.cached_output;
        result.maps.push_back({layer.name, std::move(step.out_map)});
        source = ChangeSource::binary(result.maps.back().map);
    }

    result.head_activated = delta_head(*current, result.maps.back().map, head_, head_stages_);
    if (metrics) {
        metrics->record_layer(frame_idx, "head", result.head_activated ? 1 : 0, 1,
                              head_macs(head_stages_));
        metrics->frame(frame_idx).head_activated = result.head_activated;
    }
    result.logits = head_.logits;
    result.prediction = head_.prediction;
    prev_frame_ = frame;
    return result;
}

// ---------------------------------------------------------------------------

RunMetrics run_sequence(const NetworkSpec& net, std::span<const Tensor> frames,
                        const EngineMode& mode, std::span<const std::uint32_t> labels,
                        const MapSink& map_sink) {
    if (!labels.empty() && labels.size() != frames.size()) {
        throw ConfigError("label count " + std::to_string(labels.size()) +
                          " does not match frame count " + std::to_string(frames.size()));
    }
    net.validate_weights();

    RunMetrics metrics;
    std::optional<DeltaEngine> engine;
    if (mode.kind == EngineMode::Kind::Delta) engine.emplace(net, mode.policy);

    for (std::size_t i = 0; i < frames.size(); ++i) {
        metrics.begin_frame(i);
        const auto start = std::chrono::steady_clock::now();
        std::size_t prediction = 0;
        if (engine) {
            DeltaFrameResult r = engine->process(frames[i], metrics, i);
            prediction = r.prediction;
            if (map_sink) map_sink(i, r.maps);
        } else {
            prediction = forward_dense(net, frames[i], metrics, i).prediction;
        }
        const auto stop = std::chrono::steady_clock::now();
        FrameRecord& rec = metrics.frame(i);
        rec.prediction = prediction;
        rec.wall_micros =
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count();
        if (!labels.empty()) rec.label = labels[i];
    }
    return metrics;
}

}  // namespace deltacnn
