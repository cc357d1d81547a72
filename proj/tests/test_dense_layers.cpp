#include <doctest.h>

#include <cstring>
#include <random>

#include "deltacnn/dense_layers.hpp"
#include "deltacnn/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace deltacnn;

namespace {

ConvWeights constant_weights(const ConvGeometry& g, float w, float b) {
    return {std::vector<float>(g.macs_per_position(), w), std::vector<float>(g.out_channels, b)};
}

bool same_bits(std::span<const float> a, const std::vector<float>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), 4 * b.size()) == 0;
}

}  // namespace

TEST_CASE("output extent formula") {
    const WindowGeometry g{3, 1, 1};
    CHECK(g.output_extent(64) == 64);
    CHECK(WindowGeometry{2, 2, 0}.output_extent(64) == 32);
    CHECK(WindowGeometry{5, 2, 1}.output_extent(12) == 5);
    CHECK(WindowGeometry{3, 1, 0}.output_extent(3) == 1);
    CHECK_THROWS_AS((WindowGeometry{4, 1, 0}).output_extent(3), GeometryError);
    CHECK_THROWS_AS((WindowGeometry{0, 1, 0}).output_extent(3), GeometryError);
    for (std::size_t in = 1; in <= 12; ++in)
        for (std::size_t k = 1; k <= 5; ++k)
            for (std::size_t s = 1; s <= 3; ++s)
                for (std::size_t p = 0; p <= 2; ++p) {
                    if (in + 2 * p < k) continue;
                    // Last window start must lie inside the padded input.
                    const std::size_t n = WindowGeometry{k, s, p}.output_extent(in);
                    CHECK((n - 1) * s + k <= in + 2 * p);
                    CHECK(n * s + k > in + 2 * p);
                }
}

TEST_CASE("identity 1x1 convolution") {
    std::mt19937 rng(3);
    const Tensor in = fixtures::random_tensor({1, 5, 6}, rng, -1.0f, 1.0f);
    const ConvGeometry g{1, 1, 1, 1, 0};
    CHECK(conv2d_dense(in, g, constant_weights(g, 1.0f, 0.0f)).bitwise_equal(in));

    const Tensor multi = fixtures::random_tensor({3, 4, 4}, rng);
    const ConvGeometry g3{3, 3, 1, 1, 0};
    ConvWeights eye{std::vector<float>(9, 0.0f), std::vector<float>(3, 0.0f)};
    for (int c = 0; c < 3; ++c) eye.weights[c * 3 + c] = 1.0f;
    CHECK(conv2d_dense(multi, g3, eye).bitwise_equal(multi));
}

TEST_CASE("3x3 all-ones kernel over a padded 3x3 plane of ones") {
    const Tensor in = Tensor::from_data({1, 3, 3}, std::vector<float>(9, 1.0f));
    const ConvGeometry g{1, 1, 3, 1, 1};
    const Tensor out = conv2d_dense(in, g, constant_weights(g, 1.0f, 0.0f));
    CHECK(out.at(0, 1, 1) == 9.0f);
    CHECK(out.at(0, 0, 0) == 4.0f);
    CHECK(out.at(0, 2, 2) == 4.0f);
    CHECK(out.at(0, 0, 1) == 6.0f);
}

TEST_CASE("conv output shape for the first reference layer") {
    const ConvGeometry g{1, 16, 3, 1, 1};
    const Shape s = conv_output_shape({1, 64, 64}, g);
    CHECK(s == Shape{16, 64, 64});
    CHECK_THROWS_AS(conv_output_shape({2, 64, 64}, g), ShapeError);
}

TEST_CASE("conv2d_dense matches the naive oracle bit for bit") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const int C = 1 + static_cast<int>(rng() % 3);
        const int OC = 1 + static_cast<int>(rng() % 4);
        const int H = 8, W = 8;
        const int k = 1 + static_cast<int>(rng() % 5);
        const int s = 1 + static_cast<int>(rng() % 2);
        const int p = static_cast<int>(rng() % 2);
        auto in = oracle::uniform(rng, static_cast<std::size_t>(C * H * W), -1.0f, 1.0f);
        auto w = oracle::uniform(rng, static_cast<std::size_t>(OC * C * k * k), -0.5f, 0.5f);
        auto b = oracle::uniform(rng, static_cast<std::size_t>(OC), -0.1f, 0.1f);
        int oh = 0, ow = 0;
        const auto expected = oracle::conv2d(in, C, H, W, w, b, OC, k, s, p, oh, ow);

        const ConvGeometry g{static_cast<std::size_t>(C), static_cast<std::size_t>(OC),
                             static_cast<std::size_t>(k), static_cast<std::size_t>(s),
                             static_cast<std::size_t>(p)};
        const Tensor input = Tensor::from_data({static_cast<std::size_t>(C), 8, 8}, in);
        const Tensor out = conv2d_dense(input, g, ConvWeights{w, b});
        CHECK(out.shape() == Shape{g.out_channels, static_cast<std::size_t>(oh),
                                   static_cast<std::size_t>(ow)});
        CHECK(same_bits(out.data(), expected));
        CHECK(conv2d_dense(input, g, ConvWeights{w, b}).bitwise_equal(out));
    }
}

TEST_CASE("conv rejects malformed weights") {
    const ConvGeometry g{1, 2, 3, 1, 1};
    const Tensor in = Tensor::zeros({1, 4, 4});
    CHECK_THROWS_AS(conv2d_dense(in, g, ConvWeights{std::vector<float>(17), {0, 0}}), ShapeError);
    CHECK_THROWS_AS(conv2d_dense(in, g, ConvWeights{std::vector<float>(18), {0}}), ShapeError);
    ConvWeights bad = constant_weights(g, 1.0f, 0.0f);
    bad.weights[3] = NAN;
    CHECK_THROWS_AS(conv2d_dense(in, g, bad), ConfigError);
}

TEST_CASE("maxpool2d_dense") {
    std::vector<float> ramp(16);
    for (int i = 0; i < 16; ++i) ramp[i] = static_cast<float>(i);
    const Tensor out = maxpool2d_dense(Tensor::from_data({1, 4, 4}, ramp), {2, 2});
    CHECK(out.shape() == Shape{1, 2, 2});
    CHECK(out.data()[0] == 5.0f);
    CHECK(out.data()[1] == 7.0f);
    CHECK(out.data()[2] == 13.0f);
    CHECK(out.data()[3] == 15.0f);

    Tensor constant = Tensor::zeros({2, 6, 6});
    constant.fill(0.25f);
    const Tensor pooled = maxpool2d_dense(constant, {3, 3});
    CHECK(pooled.shape() == Shape{2, 2, 2});
    for (float v : pooled.data()) CHECK(v == 0.25f);

    CHECK(maxpool2d_dense(Tensor::zeros({1, 64, 64}), {2, 2}).shape() == Shape{1, 32, 32});
    CHECK_THROWS_AS(maxpool2d_dense(Tensor::zeros({1, 1, 4}), {2, 2}), GeometryError);

    std::mt19937 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int C = 1 + static_cast<int>(rng() % 3), H = 2 + static_cast<int>(rng() % 7),
                  W = 2 + static_cast<int>(rng() % 7);
        const int k = 1 + static_cast<int>(rng() % 2), s = 1 + static_cast<int>(rng() % 2);
        auto in = oracle::uniform(rng, static_cast<std::size_t>(C * H * W), -1.0f, 1.0f);
        int oh = 0, ow = 0;
        const auto expected = oracle::maxpool(in, C, H, W, k, s, oh, ow);
        const Tensor t = Tensor::from_data(
            {static_cast<std::size_t>(C), static_cast<std::size_t>(H), static_cast<std::size_t>(W)},
            in);
        CHECK(same_bits(maxpool2d_dense(t, {static_cast<std::size_t>(k), static_cast<std::size_t>(s)})
                            .data(),
                        expected));
    }
}

TEST_CASE("relu_dense") {
    const Tensor neg = Tensor::from_data({1, 1, 3}, {-1.0f, -2.0f, -0.5f});
    const auto result = relu_dense(neg);
    for (float v : result.data()) CHECK(v == 0.0f);
    const Tensor mixed = Tensor::from_data({1, 1, 3}, {-1.0f, 0.0f, 2.0f});
    const Tensor r = relu_dense(mixed);
    CHECK(r.data()[0] == 0.0f);
    CHECK(r.data()[1] == 0.0f);
    CHECK(r.data()[2] == 2.0f);
    std::mt19937 rng(4);
    const Tensor x = fixtures::random_tensor({2, 5, 5}, rng, -1.0f, 1.0f);
    CHECK(relu_dense(relu_dense(x)).bitwise_equal(relu_dense(x)));
}

TEST_CASE("fc_dense") {
    const FcWeights eye{3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0}};
    const std::vector<float> v{0.5f, -2.0f, 3.0f};
    CHECK(fc_dense(v, eye) == v);

    const FcWeights one{2, 1, {3.0f, 4.0f}, {0.5f}};
    CHECK(fc_dense(std::vector<float>{1.0f, 2.0f}, one) == std::vector<float>{11.5f});

    const FcWeights biased{2, 2, {1, 2, 3, 4}, {0.25f, -0.75f}};
    CHECK(fc_dense(std::vector<float>{0.0f, 0.0f}, biased) == biased.bias);
    CHECK_THROWS_AS(fc_dense(std::vector<float>{1.0f}, biased), ShapeError);
}

TEST_CASE("macs_dense") {
    CHECK(macs_dense(ConvGeometry{1, 16, 3, 1, 1}, 64, 64) == 589824);
    CHECK(macs_dense(ConvGeometry{1, 1, 1, 1, 0}, 1, 1) == 1);
    CHECK(macs_dense(ConvGeometry{16, 32, 3, 1, 1}, 32, 32) == 4718592);
}
