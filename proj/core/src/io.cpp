#include "deltacnn/io.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "byte_io.hpp"
#include "deltacnn/errors.hpp"

namespace deltacnn {

void FrameSequence::validate() const {
    if (frames.empty()) throw FormatError("frame sequence is empty");
    const Shape& shape = frames.front().shape();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].empty() || frames[i].shape() != shape) {
            throw FormatError("frame " + std::to_string(i) + " shape differs from frame 0");
        }
    }
    if (!labels.empty() && labels.size() != frames.size()) {
        throw FormatError("label count does not match frame count");
    }
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmHeader {
public:
    explicit PgmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t number() {
        skip_space_and_comments();
        std::size_t value = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_++] - '0');
            if (++digits > 9) throw FormatError("PGM: header number too large");
        }
        if (digits == 0) throw FormatError("PGM: malformed header");
        return value;
    }

    void magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5') {
            throw FormatError("PGM: expected binary P5 magic");
        }
        pos_ = 2;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError("PGM: missing whitespace before raster");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint8_t quantize(float v) {
    if (!(v > 0.0f)) return 0;  // also maps NaN to 0
    const float scaled = std::floor(v * 255.0f + 0.5f);
    return scaled >= 255.0f ? 255 : static_cast<std::uint8_t>(scaled);
}

std::vector<std::uint8_t> pgm_bytes(std::size_t h, std::size_t w) {
    const std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + h * w);
    return out;
}

}  // namespace

Tensor decode_pgm(std::span<const std::uint8_t> bytes) {
    PgmHeader header(bytes);
    header.magic();
    const std::size_t width = header.number();
    const std::size_t height = header.number();
    const std::size_t maxval = header.number();
    if (width == 0 || height == 0) throw FormatError("PGM: zero dimension");
    if (maxval != 255) throw FormatError("PGM: only maxval 255 is supported");
    const std::size_t start = header.raster_start();
    const std::size_t need = width * height;
    if (bytes.size() - start < need) throw FormatError("PGM: truncated raster");
    if (bytes.size() - start > need) throw FormatError("PGM: trailing bytes after raster");
    Tensor out = Tensor::zeros({1, height, width});
    auto dst = out.data();
    for (std::size_t i = 0; i < need; ++i) dst[i] = static_cast<float>(bytes[start + i]) / 255.0f;
    return out;
}

std::vector<std::uint8_t> encode_pgm(const Tensor& image) {
    const Shape& s = image.shape();
    if (s.channels != 1) throw ShapeError("PGM output needs a single-channel tensor");
    std::vector<std::uint8_t> out = pgm_bytes(s.height, s.width);
    for (float v : image.data()) out.push_back(quantize(v));
    return out;
}

std::vector<std::uint8_t> encode_pgm(const ChangeMap& map) {
    std::vector<std::uint8_t> out = pgm_bytes(map.height(), map.width());
    for (std::uint8_t bit : map.bits()) out.push_back(bit ? 255 : 0);
    return out;
}

Tensor read_pgm(const std::filesystem::path& path) {
    try {
        return decode_pgm(detail::read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_pgm(const Tensor& image, const std::filesystem::path& path) {
    detail::write_file(path, encode_pgm(image));
}

void write_pgm(const ChangeMap& map, const std::filesystem::path& path) {
    detail::write_file(path, encode_pgm(map));
}

// ---------------------------------------------------------------------------
// FSEQ

std::vector<std::uint8_t> encode_fseq(const FrameSequence& seq) {
    seq.validate();
    const Shape& s = seq.frames.front().shape();
    auto u32 = [](std::size_t v) {
        if (v > 0xffffffffu) throw FormatError("FSEQ: value does not fit in u32");
        return static_cast<std::uint32_t>(v);
    };
    detail::ByteWriter w;
    w.bytes("FSEQ");
    w.u32(kFseqVersion);
    w.u32(u32(seq.frames.size()));
    w.u32(u32(s.channels));
    w.u32(u32(s.height));
    w.u32(u32(s.width));
    w.u8(seq.has_labels() ? 1 : 0);
    for (std::uint32_t label : seq.labels) w.u32(label);
    for (const Tensor& f : seq.frames) w.f32s(f.data());
    return std::move(w.buffer());
}

FrameSequence decode_fseq(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes, "FSEQ");
    r.expect_magic("FSEQ");
    if (const std::uint32_t version = r.u32(); version != kFseqVersion) {
        r.fail("unsupported version " + std::to_string(version));
    }
    const std::uint32_t n = r.u32();
    const Shape shape{r.u32(), r.u32(), r.u32()};
    const std::uint8_t has_labels = r.u8();
    if (n == 0) r.fail("sequence declares zero frames");
    if (has_labels > 1) r.fail("has_labels flag must be 0 or 1");
    try {
        validate_shape(shape);
    } catch (const ShapeError& e) {
        r.fail(e.what());
    }
    // Size the whole payload up front so a truncated file fails before allocating.
    const std::uint64_t label_bytes = has_labels ? 4ull * n : 0;
    const std::uint64_t frame_floats = shape.size();
    if (label_bytes > r.remaining()) r.fail("truncated labels");
    if (n > 0 && frame_floats > (r.remaining() - label_bytes) / 4 / n) r.fail("truncated payload");
    if (label_bytes + 4ull * n * frame_floats != r.remaining()) {
        r.fail("payload size does not match header");
    }

    FrameSequence seq;
    if (has_labels) {
        seq.labels.resize(n);
        for (std::uint32_t& label : seq.labels) label = r.u32();
    }
    seq.frames.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<float> data(frame_floats);
        r.f32s(data);
        seq.frames.push_back(Tensor::from_data(shape, std::move(data)));
    }
    r.expect_end();
    return seq;
}

void write_fseq(const FrameSequence& seq, const std::filesystem::path& path) {
    detail::write_file(path, encode_fseq(seq));
}

FrameSequence read_fseq(const std::filesystem::path& path) {
    try {
        return decode_fseq(detail::read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Generators

FrameSequence gen_repeat(const Tensor& base, std::size_t n, std::optional<std::uint32_t> label) {
    return gen_shift(base, n, 0, label);
}

FrameSequence gen_shift(const Tensor& base, std::size_t n, std::int64_t dx,
                        std::optional<std::uint32_t> label) {
    validate_shape(base.shape());
    if (n == 0) throw ConfigError("sequence length must be >= 1");
    const Shape& s = base.shape();
    const auto width = static_cast<std::int64_t>(s.width);
    FrameSequence seq;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t offset = static_cast<std::int64_t>(i) * dx;
        Tensor frame = Tensor::zeros(s);
        for (std::size_t c = 0; c < s.channels; ++c)
            for (std::size_t y = 0; y < s.height; ++y)
                for (std::int64_t x = 0; x < width; ++x) {
                    const std::int64_t src = x - offset;
                    if (src < 0 || src >= width) continue;
                    frame(c, y, static_cast<std::size_t>(x)) =
                        base(c, y, static_cast<std::size_t>(src));
                }
        seq.frames.push_back(std::move(frame));
        if (label) seq.labels.push_back(*label);
    }
    return seq;
}

Tensor embed_centered(const Tensor& small, std::size_t canvas_h, std::size_t canvas_w) {
    const Shape& s = small.shape();
    if (s.height > canvas_h || s.width > canvas_w) {
        throw ShapeError("cannot embed " + std::to_string(s.height) + "x" + std::to_string(s.width) +
                         " into a " + std::to_string(canvas_h) + "x" + std::to_string(canvas_w) +
                         " canvas");
    }
    Tensor canvas = Tensor::zeros({s.channels, canvas_h, canvas_w});
    const std::size_t oy = (canvas_h - s.height) / 2;
    const std::size_t ox = (canvas_w - s.width) / 2;
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t y = 0; y < s.height; ++y)
            for (std::size_t x = 0; x < s.width; ++x) canvas(c, oy + y, ox + x) = small(c, y, x);
    return canvas;
}

}  // namespace deltacnn
