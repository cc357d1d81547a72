#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "deltacnn/deltacnn.hpp"

namespace fixtures {

// 28x28 blob of nonzero pixels centered on a 64x64 black canvas.
inline deltacnn::Tensor digit_frame(std::uint32_t seed = 7) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.2f, 1.0f);
    deltacnn::Tensor small = deltacnn::Tensor::zeros({1, 28, 28});
    for (float& v : small.data()) v = dist(rng);
    return deltacnn::embed_centered(small, 64, 64);
}

inline deltacnn::Tensor random_tensor(const deltacnn::Shape& shape, std::mt19937& rng,
                                      float lo = 0.0f, float hi = 1.0f) {
    std::uniform_real_distribution<float> dist(lo, hi);
    deltacnn::Tensor t = deltacnn::Tensor::zeros(shape);
    for (float& v : t.data()) v = dist(rng);
    return t;
}

inline deltacnn::NetworkSpec seeded_reference(std::uint64_t seed) {
    deltacnn::NetworkSpec net = deltacnn::reference_architecture();
    deltacnn::generate_weights(net, seed);
    return net;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("deltacnn_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures
