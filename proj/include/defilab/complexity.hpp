#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "defilab/geometry.hpp"
#include "defilab/grid.hpp"
#include "defilab/point_set.hpp"

namespace defilab {

/// A box-shaped pattern read from a grid, bits in the grid's addressing order (last axis fastest).
/// Equality compares the bits; the hash only speeds up lookups.
class Block {
public:
    Block() = default;
    Block(std::vector<std::int64_t> sizes, std::vector<std::uint64_t> words);

    const std::vector<std::int64_t>& sizes() const noexcept { return sizes_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }
    std::uint64_t bit_count() const noexcept;
    /// Bit at the given offset inside the box.
    bool get(std::span<const std::int64_t> offset) const;
    std::uint64_t popcount() const noexcept;
    /// 128-bit hash, low and high halves.
    std::uint64_t hash_low() const noexcept { return hash_[0]; }
    std::uint64_t hash_high() const noexcept { return hash_[1]; }

    friend bool operator==(const Block& a, const Block& b) noexcept {
        return a.hash_[0] == b.hash_[0] && a.hash_[1] == b.hash_[1] && a.sizes_ == b.sizes_ && a.words_ == b.words_;
    }

private:
    friend class BlockReader;
    void rehash() noexcept;

    std::vector<std::int64_t> sizes_;
    std::vector<std::uint64_t> words_;
    std::uint64_t hash_[2] = {0, 0};
};

/// The n^d cube anchored at `anchor` (its lowest corner). Throws GeometryError if it leaves the grid.
Block block_at(const Grid& g, std::span<const std::int64_t> anchor, std::int64_t n);
Block box_at(const Grid& g, std::span<const std::int64_t> anchor, std::span<const std::int64_t> sizes);

struct CountOptions {
    unsigned threads = 1;
    std::uint64_t max_bits = Grid::default_max_bits;
};

// Counts over every anchor whose box lies inside the grid. The recurrent variant additionally
// requires the anchor to have sup-norm >= L.
std::uint64_t p_count(const Grid& g, std::int64_t n, const CountOptions& options = {});
std::uint64_t r_count(const Grid& g, std::int64_t n, std::int64_t escape, const CountOptions& options = {});
std::uint64_t rect_count(const Grid& g, std::span<const std::int64_t> sizes, const CountOptions& options = {});

std::uint64_t p_count(const PointSet& s, std::int64_t n, const Window& w, const CountOptions& options = {});
std::uint64_t r_count(const PointSet& s, std::int64_t n, const Window& w, std::int64_t escape,
                      const CountOptions& options = {});
std::uint64_t rect_count(const PointSet& s, std::span<const std::int64_t> sizes, const Window& w,
                         const CountOptions& options = {});

struct ComplexityRow {
    std::int64_t n = 0;
    std::uint64_t count = 0;
    bool stabilized = false;
    Window window;
    std::int64_t escape = 0;
};

using ComplexityTable = std::vector<ComplexityRow>;

struct StabilizeOptions {
    /// Defaults to max(16, 4n, 2 * recurrence hint).
    std::optional<std::int64_t> initial_radius;
    /// Defaults depend on the dimension: 16384 for d = 1, 1024 for d = 2, 64 for d = 3, 16 beyond.
    std::optional<std::int64_t> max_radius;
    /// Each window is cube(radius) intersected with this box; doubling stops once the clamp is covered.
    std::optional<Window> clamp;
    CountOptions count;
};

/// Doubles the window radius (L = radius / 2) until two consecutive counts agree or the cap is reached.
ComplexityRow stabilized_r(const PointSet& s, std::int64_t n, const StabilizeOptions& options = {});
/// Same doubling for the plain block count (no escape radius).
ComplexityRow stabilized_p(const PointSet& s, std::int64_t n, const StabilizeOptions& options = {});

/// Rows for n = lo..hi, sharing rasters between rows.
ComplexityTable recurrent_table(const PointSet& s, std::int64_t lo, std::int64_t hi,
                                const StabilizeOptions& options = {});
ComplexityTable block_table(const PointSet& s, std::int64_t lo, std::int64_t hi, const StabilizeOptions& options = {});

struct GrowthFit {
    double exponent = 0;
    double residual = 0;
    std::size_t points = 0;
};

/// Least-squares slope of log(count) against log(n) over the stabilized rows; residual is the RMS error.
/// Needs at least four stabilized rows with positive counts.
GrowthFit growth_fit(const ComplexityTable& t);

/// "n,count,stabilized,window,L" header plus one line per row.
std::string to_csv(const ComplexityTable& t);
std::string to_text(const ComplexityTable& t);
/// {"exponent": ..., "residual": ...}
std::string to_json(const GrowthFit& fit);

}  // namespace defilab
