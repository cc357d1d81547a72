#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "deltacnn/change_map.hpp"
#include "deltacnn/tensor.hpp"

namespace deltacnn {

// Ordered frames of one shape, optionally labeled (labels empty or one per frame).
struct FrameSequence {
    std::vector<Tensor> frames;
    std::vector<std::uint32_t> labels;

    bool has_labels() const { return !labels.empty(); }
    // Throws FormatError when frames are empty or non-uniform or labels mismatch.
    void validate() const;
};

// Binary PGM (P5, maxval 255) <-> 1xHxW tensor with values pixel / 255.
Tensor decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const Tensor& image);
// Change maps are written 0 = unchanged, 255 = changed.
std::vector<std::uint8_t> encode_pgm(const ChangeMap& map);

Tensor read_pgm(const std::filesystem::path& path);
void write_pgm(const Tensor& image, const std::filesystem::path& path);
void write_pgm(const ChangeMap& map, const std::filesystem::path& path);

// FSEQ, little-endian: "FSEQ", u32 version (1), u32 n_frames, u32 c, u32 h,
// u32 w, u8 has_labels, [n_frames x u32 labels], n_frames x c*h*w f32.
inline constexpr std::uint32_t kFseqVersion = 1;
inline constexpr std::size_t kFseqHeaderBytes = 4 + 5 * 4 + 1;

std::vector<std::uint8_t> encode_fseq(const FrameSequence& seq);
FrameSequence decode_fseq(std::span<const std::uint8_t> bytes);
void write_fseq(const FrameSequence& seq, const std::filesystem::path& path);
FrameSequence read_fseq(const std::filesystem::path& path);

FrameSequence gen_repeat(const Tensor& base, std::size_t n, std::optional<std::uint32_t> label = {});

// Frame i is base translated i*dx pixels along x; vacated pixels are zero and
// content leaving the canvas is dropped.
FrameSequence gen_shift(const Tensor& base, std::size_t n, std::int64_t dx,
                        std::optional<std::uint32_t> label = {});

// Copies `small` onto a zero canvas at offset floor((canvas - small) / 2) per
// axis. Throws ShapeError if it does not fit.
Tensor embed_centered(const Tensor& small, std::size_t canvas_h, std::size_t canvas_w);

}  // namespace deltacnn
