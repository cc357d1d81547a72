#pragma once

// Test-only reference computations. Nothing here calls into the library's
// layer code; they operate on plain vectors so they stay independent of the
// implementation they check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

// Naive zero-padded cross-correlation. Accumulates per output value in
// (ic, ky, kx) order starting from 0, treating padded taps as absent, then
// adds the bias.
inline std::vector<float> conv2d(const std::vector<float>& in, int C, int H, int W,
                                 const std::vector<float>& weights, const std::vector<float>& bias,
                                 int OC, int k, int s, int p, int& out_h, int& out_w) {
    out_h = (H + 2 * p - k) / s + 1;
    out_w = (W + 2 * p - k) / s + 1;
    std::vector<float> out(static_cast<std::size_t>(OC * out_h * out_w));
    for (int oc = 0; oc < OC; ++oc)
        for (int i = 0; i < out_h; ++i)
            for (int j = 0; j < out_w; ++j) {
                float acc = 0.0f;
                for (int ic = 0; ic < C; ++ic)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int y = i * s - p + ky;
                            const int x = j * s - p + kx;
                            if (y < 0 || y >= H || x < 0 || x >= W) continue;
                            acc += weights[((oc * C + ic) * k + ky) * k + kx] *
                                   in[(ic * H + y) * W + x];
                        }
                out[(oc * out_h + i) * out_w + j] = acc + bias[oc];
            }
    return out;
}

inline std::vector<float> maxpool(const std::vector<float>& in, int C, int H, int W, int k, int s,
                                  int& out_h, int& out_w) {
    out_h = (H - k) / s + 1;
    out_w = (W - k) / s + 1;
    std::vector<float> out(static_cast<std::size_t>(C * out_h * out_w));
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < out_h; ++i)
            for (int j = 0; j < out_w; ++j) {
                float m = -INFINITY;
                for (int y = i * s; y < i * s + k; ++y)
                    for (int x = j * s; x < j * s + k; ++x) m = std::fmax(m, in[(c * H + y) * W + x]);
                out[(c * out_h + i) * out_w + j] = m;
            }
    return out;
}

// Output positions whose k x k window (rooted at i*s-p, j*s-p) contains (py, px).
inline std::set<std::pair<int, int>> rf_cover(int H, int W, int k, int s, int p, int py, int px) {
    std::set<std::pair<int, int>> cover;
    const int out_h = (H + 2 * p - k) / s + 1;
    const int out_w = (W + 2 * p - k) / s + 1;
    for (int i = 0; i < out_h; ++i)
        for (int j = 0; j < out_w; ++j) {
            const int y0 = i * s - p;
            const int x0 = j * s - p;
            if (py >= y0 && py < y0 + k && px >= x0 && px < x0 + k) cover.insert({i, j});
        }
    return cover;
}

inline std::vector<float> uniform(std::mt19937& rng, std::size_t n, float lo, float hi) {
    std::uniform_real_distribution<float> dist(lo, hi);
    std::vector<float> v(n);
    for (float& x : v) x = dist(rng);
    return v;
}

}  // namespace oracle
