#include <array>
#include <random>
#include <string>
#include <type_traits>

#include "byte_io.hpp"
#include "deltacnn/errors.hpp"
#include "deltacnn/model.hpp"

namespace deltacnn {

namespace {

template <typename Vec>
struct WeightBlock {
    std::uint32_t tag;
    std::array<std::uint32_t, 4> dims;
    Vec* weights;
    Vec* bias;
    std::size_t weight_count;
    std::size_t bias_count;
};

std::uint32_t to_u32(std::size_t v) {
    if (v > 0xffffffffu) throw FormatError("dimension does not fit in u32");
    return static_cast<std::uint32_t>(v);
}

// Weighted layers in declaration order; non-const nets yield mutable blocks
// so decode and generate can fill them in place.
template <typename Net>
auto weight_blocks(Net& net) {
    using Vec = std::conditional_t<std::is_const_v<Net>, const std::vector<float>,
                                   std::vector<float>>;
    std::vector<WeightBlock<Vec>> blocks;
    for (auto& layer : net.layers) {
        if (auto* conv = std::get_if<ConvLayer>(&layer.kind)) {
            const ConvGeometry& g = conv->geometry;
            blocks.push_back({kWeightTagConv,
                              {to_u32(g.out_channels), to_u32(g.in_channels), to_u32(g.kernel),
                               to_u32(g.kernel)},
                              &conv->weights.weights,
                              &conv->weights.bias,
                              g.macs_per_position(),
                              g.out_channels});
        } else if (auto* fc = std::get_if<FcLayer>(&layer.kind)) {
            blocks.push_back({kWeightTagFc,
                              {to_u32(fc->weights.out), to_u32(fc->weights.in), 1, 1},
                              &fc->weights.weights,
                              &fc->weights.bias,
                              fc->weights.in * fc->weights.out,
                              fc->weights.out});
        }
    }
    return blocks;
}

void fill_uniform(std::vector<float>& out, std::size_t n, std::uint64_t seed, std::uint32_t layer,
                  std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      layer, stream};
    std::mt19937_64 rng(seq);
    out.resize(n);
    for (float& v : out) {
        const auto u = static_cast<float>(rng() >> 40) * 0x1p-24f;
        v = -0.1f + 0.2f * u;
    }
}

}  // namespace

std::vector<std::uint8_t> encode_weights(const NetworkSpec& net) {
    net.validate_weights();
    const auto blocks = weight_blocks(net);
    detail::ByteWriter w;
    w.bytes("NNW1");
    w.u32(to_u32(blocks.size()));
    for (const auto& b : blocks) {
        w.u32(b.tag);
        for (std::uint32_t d : b.dims) w.u32(d);
        w.f32s(*b.weights);
        w.f32s(*b.bias);
    }
    return std::move(w.buffer());
}

void decode_weights(std::span<const std::uint8_t> bytes, NetworkSpec& net) {
    net.validate();
    NetworkSpec staged = net;
    auto blocks = weight_blocks(staged);
    detail::ByteReader r(bytes, "NNW1");
    r.expect_magic("NNW1");
    const std::uint32_t count = r.u32();
    if (count != blocks.size()) {
        r.fail("file has " + std::to_string(count) + " weighted layers, model declares " +
               std::to_string(blocks.size()));
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto& b = blocks[i];
        const std::uint32_t tag = r.u32();
        if (tag != b.tag) r.fail("layer " + std::to_string(i) + " kind tag mismatch");
        for (std::uint32_t expected : b.dims) {
            if (r.u32() != expected) r.fail("layer " + std::to_string(i) + " dimension mismatch");
        }
        b.weights->resize(b.weight_count);
        b.bias->resize(b.bias_count);
        r.f32s(*b.weights);
        r.f32s(*b.bias);
    }
    r.expect_end();
    staged.validate_weights();
    net = std::move(staged);
}

void save_weights(const NetworkSpec& net, const std::filesystem::path& path) {
    detail::write_file(path, encode_weights(net));
}

void load_weights(const std::filesystem::path& path, NetworkSpec& net) {
    decode_weights(detail::read_file(path), net);
}

void generate_weights(NetworkSpec& net, std::uint64_t seed) {
    net.validate();
    auto blocks = weight_blocks(net);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto layer = static_cast<std::uint32_t>(i);
        fill_uniform(*blocks[i].weights, blocks[i].weight_count, seed, layer, 0);
        fill_uniform(*blocks[i].bias, blocks[i].bias_count, seed, layer, 1);
    }
}

}  // namespace deltacnn
