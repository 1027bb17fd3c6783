#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defilab/geometry.hpp"

namespace defilab {

/// Finite bit raster over a window. Bits are packed 64 per word, row-major with the last
/// axis varying fastest: in 2-D the bit of (x, y) sits at (x - ox) * extent_y + (y - oy).
class Grid {
public:
    static constexpr std::uint64_t default_max_bits = std::uint64_t{1} << 31;

    Grid() = default;
    /// All bits clear. Throws Error when the window holds more than `max_bits` points.
    explicit Grid(const Window& window, std::uint64_t max_bits = default_max_bits);

    std::size_t dimension() const noexcept { return origin_.size(); }
    const Point& origin() const noexcept { return origin_; }
    const std::vector<std::int64_t>& extents() const noexcept { return extents_; }
    Window window() const;
    std::uint64_t size() const noexcept { return size_; }

    bool contains(std::span<const std::int64_t> p) const;
    /// Throws GeometryError outside the window.
    std::uint64_t index_of(std::span<const std::int64_t> p) const;
    bool get(std::span<const std::int64_t> p) const { return test(index_of(p)); }
    void set(std::span<const std::int64_t> p, bool value) { assign(index_of(p), value); }

    bool test(std::uint64_t index) const noexcept { return (words_[index >> 6] >> (index & 63)) & 1U; }
    void assign(std::uint64_t index, bool value) noexcept {
        std::uint64_t mask = std::uint64_t{1} << (index & 63);
        if (value) words_[index >> 6] |= mask;
        else words_[index >> 6] &= ~mask;
    }
    /// `length` (<= 64) consecutive bits starting at `index`, lowest bit first.
    std::uint64_t bits(std::uint64_t index, unsigned length) const noexcept;

    /// Stride of axis i in the bit addressing.
    std::uint64_t stride(std::size_t axis) const { return strides_.at(axis); }

    std::uint64_t popcount() const noexcept;

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }
    std::vector<std::uint64_t>& mutable_words() noexcept { return words_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.origin_ == b.origin_ && a.extents_ == b.extents_ && a.words_ == b.words_;
    }

private:
    Point origin_;
    std::vector<std::int64_t> extents_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Rows from the highest y down to the lowest, '#' for members. 2-D only.
std::string to_ascii(const Grid& g);
/// Plain PBM (P1), 1 = member, rows top to bottom = decreasing y. 2-D only.
std::string to_pbm(const Grid& g);
/// {"dim": d, "origin": [...], "extents": [...], "bits": "0101..."}
std::string to_json(const Grid& g);
Grid grid_from_json(std::string_view text);

}  // namespace defilab
