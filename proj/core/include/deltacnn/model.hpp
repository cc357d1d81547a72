#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deltacnn/change_map.hpp"
#include "deltacnn/delta_layers.hpp"
#include "deltacnn/dense_layers.hpp"
#include "deltacnn/metrics.hpp"
#include "deltacnn/tensor.hpp"

namespace deltacnn {

struct ConvLayer {
    ConvGeometry geometry;
    ConvWeights weights;
};

struct ReluLayer {};

struct PoolLayer {
    PoolGeometry geometry;
};

struct FlattenLayer {};

// weights.in / weights.out carry the layer dimensions even before loading.
struct FcLayer {
    FcWeights weights;
};

using LayerKind = std::variant<ConvLayer, ReluLayer, PoolLayer, FlattenLayer, FcLayer>;

struct LayerSpec {
    std::string name;
    LayerKind kind;

    template <typename T>
    bool is() const { return std::holds_alternative<T>(kind); }
};

// Ordered layer list with an input shape. Spatial layers (conv, relu,
// maxpool) precede exactly one flatten; fc and relu layers follow it.
struct NetworkSpec {
    Shape input_shape;
    std::vector<LayerSpec> layers;

    // Structural and shape-chaining checks; throws ConfigError. A spec that
    // passes never raises a shape error during a forward pass.
    void validate() const;
    // validate() plus presence and sizes of all weights.
    void validate_weights() const;

    std::size_t flatten_index() const;
    // Output shape of every layer before the flatten, in order.
    std::vector<Shape> spatial_shapes() const;
    std::size_t num_classes() const;
    std::vector<HeadStage> head_stages() const;
    // Convolution + fc multiply-accumulates of one dense forward pass.
    std::uint64_t dense_macs_per_frame() const;
};

// 1x64x64 -> conv1(16,k3,p1) -> relu1 -> pool1(2,2) -> conv2(32,k3,p1) -> relu2
// -> pool2(2,2) -> flatten -> fc1(8192->128) -> relu3 -> fc2(128->10). No weights.
NetworkSpec reference_architecture();

// Line-oriented model description:
//   input C H W
//   conv [name=N] out=O k=K [s=S] [p=P]
//   relu [name=N]
//   maxpool [name=N] k=K [s=S]
//   flatten [name=N]
//   fc [name=N] out=O
// '#' starts a comment. Input channels and fc input sizes are inferred.
NetworkSpec parse_model_spec(std::string_view text);
NetworkSpec load_model_spec(const std::filesystem::path& path);
std::string format_model_spec(const NetworkSpec& net);

// NNW1 weight files: "NNW1", u32 weighted-layer count, then per conv/fc layer
// in declaration order: u32 kind tag (1 conv, 2 fc), u32 dims[4]
// (conv: out, in, k, k; fc: out, in, 1, 1), f32 weights, f32 biases. All
// little-endian; trailing bytes are rejected.
inline constexpr std::uint32_t kWeightTagConv = 1;
inline constexpr std::uint32_t kWeightTagFc = 2;

std::vector<std::uint8_t> encode_weights(const NetworkSpec& net);
void decode_weights(std::span<const std::uint8_t> bytes, NetworkSpec& net);
void save_weights(const NetworkSpec& net, const std::filesystem::path& path);
void load_weights(const std::filesystem::path& path, NetworkSpec& net);

// Seeded fixture weights, uniform in [-0.1, 0.1]. Weighted layer l draws its
// weights from mt19937_64 seeded with seed_seq{seed_lo, seed_hi, l, 0} and its
// biases from seed_seq{seed_lo, seed_hi, l, 1}; each draw maps the top 24 bits
// u of a 64-bit output to -0.1f + 0.2f * (u / 2^24).
void generate_weights(NetworkSpec& net, std::uint64_t seed);

struct FrameResult {
    std::vector<float> logits;
    std::size_t prediction = 0;
};

// Dense pipeline. With metrics, records every layer of frame_idx as fully
// recomputed (the frame must already be opened).
FrameResult forward_dense(const NetworkSpec& net, const Tensor& frame);
FrameResult forward_dense(const NetworkSpec& net, const Tensor& frame, RunMetrics& metrics,
                          std::size_t frame_idx);

// Every activation of a dense pass: one tensor per layer before the flatten.
std::vector<Tensor> dense_activations(const NetworkSpec& net, const Tensor& frame);

struct NamedMap {
    std::string layer_name;
    ChangeMap map;
};

struct DeltaFrameResult {
    std::vector<float> logits;
    std::size_t prediction = 0;
    bool head_activated = false;
    // "input" first, then one entry per spatial layer.
    std::vector<NamedMap> maps;
};

// Incremental pipeline over a frame sequence. Holds one cache per spatial
// layer plus the head's logits, and the previous raw frame. `net` must
// outlive the engine. Single-threaded per instance.
class DeltaEngine {
public:
    DeltaEngine(const NetworkSpec& net, DeltaPolicy policy);

    // The first frame after construction or reset() is driven by the all-ones
    // map; later frames by |frame - previous frame| thresholded at tau.
    DeltaFrameResult process(const Tensor& frame, RunMetrics& metrics, std::size_t frame_idx);
    DeltaFrameResult process(const Tensor& frame);

    void reset();

    const DeltaPolicy& policy() const { return policy_; }
    const LayerState& state(std::size_t layer) const { return states_.at(layer); }
    const HeadState& head_state() const { return head_; }

private:
    DeltaFrameResult step(const Tensor& frame, RunMetrics* metrics, std::size_t frame_idx);

    const NetworkSpec& net_;
    DeltaPolicy policy_;
    std::vector<LayerState> states_;
    std::vector<HeadStage> head_stages_;
    HeadState head_;
    std::optional<Tensor> prev_frame_;
};

struct EngineMode {
    enum class Kind { Dense, Delta };
    Kind kind = Kind::Dense;
    DeltaPolicy policy;

    static EngineMode dense() { return {}; }
    static EngineMode delta(DeltaPolicy p) { return {Kind::Delta, p}; }
};

using MapSink = std::function<void(std::size_t frame_idx, const std::vector<NamedMap>& maps)>;

// Runs frames in order (batch size 1) and returns per-frame metrics. labels
// is empty or one label per frame. map_sink only fires in delta mode.
RunMetrics run_sequence(const NetworkSpec& net, std::span<const Tensor> frames,
                        const EngineMode& mode, std::span<const std::uint32_t> labels = {},
                        const MapSink& map_sink = {});

}  // namespace deltacnn
