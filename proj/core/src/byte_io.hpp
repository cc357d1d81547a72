#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deltacnn/errors.hpp"

namespace deltacnn::detail {

// Little-endian writer independent of host byte order.
class ByteWriter {
public:
    void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f32s(std::span<const float> vs) {
        buf_.reserve(buf_.size() + 4 * vs.size());
        for (float v : vs) f32(v);
    }

    std::vector<std::uint8_t>& buffer() { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

// Bounds-checked little-endian reader; throws FormatError tagged with `what`.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> data, std::string what)
        : data_(data), what_(std::move(what)) {}

    void expect_magic(std::string_view magic) {
        need(magic.size());
        for (std::size_t i = 0; i < magic.size(); ++i) {
            if (data_[pos_ + i] != static_cast<std::uint8_t>(magic[i])) {
                fail("bad magic, expected \"" + std::string(magic) + "\"");
            }
        }
        pos_ += magic.size();
    }
    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    void f32s(std::span<float> out) {
        need_elements(out.size(), 4);
        for (float& v : out) v = f32();
    }
    // Checks that count * width more bytes exist without overflowing.
    void need_elements(std::uint64_t count, std::uint64_t width) {
        if (count > remaining() / width) fail("truncated payload");
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    void expect_end() {
        if (pos_ != data_.size()) {
            fail(std::to_string(remaining()) + " trailing bytes");
        }
    }
    [[noreturn]] void fail(const std::string& msg) const { throw FormatError(what_ + ": " + msg); }

private:
    void need(std::size_t n) {
        if (remaining() < n) fail("unexpected end of data");
    }

    std::span<const std::uint8_t> data_;
    std::string what_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace deltacnn::detail
