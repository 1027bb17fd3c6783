#include "defilab/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"

#include "defilab/error.hpp"
#include "defilab/raster.hpp"

namespace defilab {

namespace {

std::uint64_t mix(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t product(std::span<const std::int64_t> sizes) {
    std::uint64_t n = 1;
    for (auto s : sizes) n *= static_cast<std::uint64_t>(s);
    return n;
}

}  // namespace

Block::Block(std::vector<std::int64_t> sizes, std::vector<std::uint64_t> words)
    : sizes_(std::move(sizes)), words_(std::move(words)) {
    words_.resize((bit_count() + 63) / 64);
    if (bit_count() % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (bit_count() % 64)) - 1;
    rehash();
}

std::uint64_t Block::bit_count() const noexcept { return sizes_.empty() ? 0 : product(sizes_); }

bool Block::get(std::span<const std::int64_t> offset) const {
    if (offset.size() != sizes_.size()) throw DimensionError("block offset has the wrong dimension");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (offset[i] < 0 || offset[i] >= sizes_[i]) throw GeometryError("offset outside the block");
        idx = idx * static_cast<std::uint64_t>(sizes_[i]) + static_cast<std::uint64_t>(offset[i]);
    }
    return (words_[idx >> 6] >> (idx & 63)) & 1U;
}

std::uint64_t Block::popcount() const noexcept {
    std::uint64_t n = 0;
    for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

void Block::rehash() noexcept {
    std::uint64_t a = 0x9e3779b97f4a7c15ULL ^ words_.size();
    std::uint64_t b = 0xc2b2ae3d27d4eb4fULL + sizes_.size();
    for (auto s : sizes_) {
        a = mix(a ^ static_cast<std::uint64_t>(s));
        b = mix(b + static_cast<std::uint64_t>(s) * 0x165667b19e3779f9ULL);
    }
    for (auto w : words_) {
        a = mix(a ^ w);
        b = mix(b + (w * 0xff51afd7ed558ccdULL) + 0x27d4eb2f165667c5ULL);
    }
    hash_[0] = a;
    hash_[1] = b;
}

/// Reads boxes of a fixed shape out of one grid, reusing buffers.
class BlockReader {
public:
    BlockReader(const Grid& g, std::vector<std::int64_t> sizes) : g_(g) {
        if (sizes.size() != g.dimension()) throw DimensionError("box dimension does not match the grid");
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (sizes[i] < 1) throw Error("box sizes must be positive");
            if (sizes[i] > g.extents()[i])
                throw GeometryError("box of size " + std::to_string(sizes[i]) + " does not fit the grid " +
                                    g.window().to_string());
        }
        // Offsets of each run (one per position of the leading axes) relative to the anchor index.
        const std::size_t d = sizes.size();
        run_length_ = static_cast<unsigned>(sizes[d - 1]);
        std::vector<std::int64_t> pos(d - 1, 0);
        while (true) {
            std::uint64_t off = 0;
            for (std::size_t i = 0; i + 1 < d; ++i) off += static_cast<std::uint64_t>(pos[i]) * g.stride(i);
            run_offsets_.push_back(off);
            std::size_t i = d - 1;
            bool done = true;
            while (i > 0) {
                --i;
                if (++pos[i] < sizes[i]) {
                    done = false;
                    break;
                }
                pos[i] = 0;
            }
            if (done) break;
        }
        scratch_.sizes_ = std::move(sizes);
        scratch_.words_.assign((scratch_.bit_count() + 63) / 64, 0);
    }

    /// Reads the box whose lowest corner has grid index `base`; the result stays valid until the next read.
    const Block& read(std::uint64_t base) {
        auto& out = scratch_.words_;
        std::fill(out.begin(), out.end(), 0);
        std::uint64_t pos = 0;
        for (auto off : run_offsets_) {
            std::uint64_t src = base + off;
            unsigned left = run_length_;
            while (left > 0) {
                unsigned take = std::min(left, 64U);
                std::uint64_t v = g_.bits(src, take);
                unsigned shift = static_cast<unsigned>(pos & 63);
                out[pos >> 6] |= v << shift;
                if (shift + take > 64) out[(pos >> 6) + 1] |= v >> (64 - shift);
                pos += take;
                src += take;
                left -= take;
            }
        }
        scratch_.rehash();
        return scratch_;
    }

private:
    const Grid& g_;
    unsigned run_length_ = 0;
    std::vector<std::uint64_t> run_offsets_;
    Block scratch_;
};

namespace {

struct BlockHash {
    std::size_t operator()(const Block& b) const noexcept { return static_cast<std::size_t>(b.hash_low()); }
};

using BlockSet = std::unordered_set<Block, BlockHash>;

std::uint64_t anchor_index(const Grid& g, std::span<const std::int64_t> anchor, std::span<const std::int64_t> sizes) {
    if (anchor.size() != g.dimension()) throw DimensionError("anchor has the wrong dimension");
    for (std::size_t i = 0; i < anchor.size(); ++i) {
        if (anchor[i] < g.origin()[i] || anchor[i] + sizes[i] > g.origin()[i] + g.extents()[i])
            throw GeometryError("box at " + format_point(anchor) + " leaves the grid " + g.window().to_string());
    }
    return g.index_of(anchor);
}

/// Distinct boxes over all in-grid anchors (optionally only those with sup-norm >= escape).
std::uint64_t count_distinct(const Grid& g, std::vector<std::int64_t> sizes, std::optional<std::int64_t> escape,
                             unsigned threads) {
    const std::size_t d = g.dimension();
    if (sizes.size() != d) throw DimensionError("box dimension does not match the grid");
    std::vector<std::int64_t> span(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (sizes[i] < 1) throw Error("box sizes must be positive");
        span[i] = g.extents()[i] - sizes[i] + 1;
        if (span[i] < 1)
            throw GeometryError("window " + g.window().to_string() + " is smaller than the box size " +
                                std::to_string(sizes[i]));
    }
    if (escape) {
        bool any = false;
        // Some anchor in the region must reach the escape radius.
        for (std::size_t i = 0; i < d && !any; ++i) {
            std::int64_t lo = g.origin()[i], hi = g.origin()[i] + span[i] - 1;
            if (std::max(lo < 0 ? -lo : lo, hi < 0 ? -hi : hi) >= *escape) any = true;
        }
        if (!any)
            throw GeometryError("no anchor of the window " + g.window().to_string() + " has norm >= " +
                                std::to_string(*escape));
    }

    auto work = [&](std::int64_t first0, std::int64_t last0, BlockSet& seen) {
        BlockReader reader(g, sizes);
        Point rel(d, 0);
        rel[0] = first0;
        if (first0 >= last0) return;
        while (true) {
            bool far = true;
            if (escape) {
                std::int64_t norm = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    std::int64_t v = g.origin()[i] + rel[i];
                    norm = std::max(norm, v < 0 ? -v : v);
                }
                far = norm >= *escape;
            }
            if (far) {
                std::uint64_t base = 0;
                for (std::size_t i = 0; i < d; ++i) base += static_cast<std::uint64_t>(rel[i]) * g.stride(i);
                const Block& b = reader.read(base);
                if (seen.find(b) == seen.end()) seen.insert(b);
            }
            std::size_t i = d;
            bool done = true;
            while (i > 0) {
                --i;
                std::int64_t limit = i == 0 ? last0 : span[i];
                if (++rel[i] < limit) {
                    done = false;
                    break;
                }
                rel[i] = i == 0 ? first0 : 0;
            }
            if (done) break;
        }
    };

    unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(span[0])));
    if (workers == 1) {
        BlockSet seen;
        work(0, span[0], seen);
        return seen.size();
    }
    std::vector<BlockSet> parts(workers);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::int64_t chunk = (span[0] + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                work(t * chunk, std::min<std::int64_t>(span[0], (t + 1) * chunk), parts[t]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    BlockSet merged = std::move(parts[0]);
    for (unsigned t = 1; t < workers; ++t) merged.insert(parts[t].begin(), parts[t].end());
    return merged.size();
}

void require_n(std::int64_t n) {
    if (n < 1) throw Error("block size must be positive");
}

}  // namespace

Block block_at(const Grid& g, std::span<const std::int64_t> anchor, std::int64_t n) {
    require_n(n);
    std::vector<std::int64_t> sizes(g.dimension(), n);
    return box_at(g, anchor, sizes);
}

Block box_at(const Grid& g, std::span<const std::int64_t> anchor, std::span<const std::int64_t> sizes) {
    if (sizes.size() != g.dimension()) throw DimensionError("box dimension does not match the grid");
    std::uint64_t base = anchor_index(g, anchor, sizes);
    BlockReader reader(g, std::vector<std::int64_t>(sizes.begin(), sizes.end()));
    return reader.read(base);
}

std::uint64_t p_count(const Grid& g, std::int64_t n, const CountOptions& options) {
    require_n(n);
    return count_distinct(g, std::vector<std::int64_t>(g.dimension(), n), std::nullopt, options.threads);
}

std::uint64_t r_count(const Grid& g, std::int64_t n, std::int64_t escape, const CountOptions& options) {
    require_n(n);
    if (escape < 0) throw Error("escape radius must be nonnegative");
    return count_distinct(g, std::vector<std::int64_t>(g.dimension(), n), escape, options.threads);
}

std::uint64_t rect_count(const Grid& g, std::span<const std::int64_t> sizes, const CountOptions& options) {
    return count_distinct(g, std::vector<std::int64_t>(sizes.begin(), sizes.end()), std::nullopt, options.threads);
}

namespace {

Grid raster_for(const PointSet& s, const Window& w, const CountOptions& options) {
    return rasterize(s, w, RasterOptions{options.max_bits, options.threads});
}

}  // namespace

std::uint64_t p_count(const PointSet& s, std::int64_t n, const Window& w, const CountOptions& options) {
    return p_count(raster_for(s, w, options), n, options);
}

std::uint64_t r_count(const PointSet& s, std::int64_t n, const Window& w, std::int64_t escape,
                      const CountOptions& options) {
    return r_count(raster_for(s, w, options), n, escape, options);
}

std::uint64_t rect_count(const PointSet& s, std::span<const std::int64_t> sizes, const Window& w,
                         const CountOptions& options) {
    return rect_count(raster_for(s, w, options), sizes, options);
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t default_max_radius(std::size_t d) {
    switch (d) {
        case 1: return 16384;
        case 2: return 1024;
        case 3: return 64;
        default: return 16;
    }
}

class RasterCache {
public:
    RasterCache(const PointSet& s, const StabilizeOptions& options) : s_(s), options_(options) {}

    /// Window for `radius`, and whether it already covers the clamp.
    std::pair<Window, bool> window(std::int64_t radius) const {
        Window cube = Window::cube(s_.dimension(), radius);
        if (!options_.clamp) return {cube, false};
        Window w;
        if (!cube.intersect(*options_.clamp, w))
            throw GeometryError("window of radius " + std::to_string(radius) + " misses the clamp " +
                                options_.clamp->to_string());
        return {w, w == *options_.clamp};
    }

    const Grid& grid(std::int64_t radius) {
        auto it = grids_.find(radius);
        if (it != grids_.end()) return it->second;
        return grids_.emplace(radius, raster_for(s_, window(radius).first, options_.count)).first->second;
    }

private:
    const PointSet& s_;
    const StabilizeOptions& options_;
    std::map<std::int64_t, Grid> grids_;
};

ComplexityRow stabilize(const PointSet& s, std::int64_t n, const StabilizeOptions& options, RasterCache& cache,
                        bool recurrent) {
    require_n(n);
    std::int64_t hint = s.recurrence_hint().value_or(8);
    std::int64_t radius = options.initial_radius.value_or(std::max<std::int64_t>({16, 4 * n, 2 * hint}));
    std::int64_t cap = options.max_radius.value_or(default_max_radius(s.dimension()));
    if (radius < 1) throw Error("initial radius must be positive");
    radius = std::min(radius, std::max<std::int64_t>(cap, 1));
    ComplexityRow row;
    row.n = n;
    std::optional<std::uint64_t> previous;
    while (true) {
        auto [w, covers] = cache.window(radius);
        std::int64_t escape = recurrent ? radius / 2 : 0;
        const Grid& g = cache.grid(radius);
        std::uint64_t count = recurrent ? r_count(g, n, escape, options.count) : p_count(g, n, options.count);
        row.count = count;
        row.window = w;
        row.escape = escape;
        if (previous && *previous == count) {
            row.stabilized = true;
            return row;
        }
        previous = count;
        if (covers || radius >= cap) return row;
        radius = std::min(radius * 2, cap);
    }
}

ComplexityTable table(const PointSet& s, std::int64_t lo, std::int64_t hi, const StabilizeOptions& options,
                      bool recurrent) {
    if (lo < 1 || hi < lo) throw Error("block size range must satisfy 1 <= lo <= hi");
    RasterCache cache(s, options);
    ComplexityTable t;
    for (std::int64_t n = lo; n <= hi; ++n) t.push_back(stabilize(s, n, options, cache, recurrent));
    return t;
}

}  // namespace

ComplexityRow stabilized_r(const PointSet& s, std::int64_t n, const StabilizeOptions& options) {
    RasterCache cache(s, options);
    return stabilize(s, n, options, cache, true);
}

ComplexityRow stabilized_p(const PointSet& s, std::int64_t n, const StabilizeOptions& options) {
    RasterCache cache(s, options);
    return stabilize(s, n, options, cache, false);
}

ComplexityTable recurrent_table(const PointSet& s, std::int64_t lo, std::int64_t hi, const StabilizeOptions& options) {
    return table(s, lo, hi, options, true);
}

ComplexityTable block_table(const PointSet& s, std::int64_t lo, std::int64_t hi, const StabilizeOptions& options) {
    return table(s, lo, hi, options, false);
}

GrowthFit growth_fit(const ComplexityTable& t) {
    std::vector<double> xs, ys;
    for (const auto& row : t) {
        if (!row.stabilized || row.count < 1 || row.n < 1) continue;
        xs.push_back(std::log(static_cast<double>(row.n)));
        ys.push_back(std::log(static_cast<double>(row.count)));
    }
    if (xs.size() < 4)
        throw Error("growth fit needs at least 4 stabilized rows with positive counts, found " +
                    std::to_string(xs.size()));
    const double k = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0) throw Error("growth fit needs at least two distinct block sizes");
    GrowthFit fit;
    fit.exponent = sxy / sxx;
    double intercept = my - fit.exponent * mx;
    double sse = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (intercept + fit.exponent * xs[i]);
        sse += e * e;
    }
    fit.residual = std::sqrt(sse / k);
    fit.points = xs.size();
    return fit;
}

std::string to_csv(const ComplexityTable& t) {
    std::ostringstream out;
    out << "n,count,stabilized,window,L\n";
    for (const auto& r : t)
        out << r.n << ',' << r.count << ',' << (r.stabilized ? "true" : "false") << ',' << r.window.to_string() << ','
            << r.escape << '\n';
    return out.str();
}

std::string to_text(const ComplexityTable& t) {
    std::vector<std::vector<std::string>> rows{{"n", "count", "stabilized", "window", "L"}};
    for (const auto& r : t)
        rows.push_back({std::to_string(r.n), std::to_string(r.count), r.stabilized ? "true" : "false",
                        r.window.to_string(), std::to_string(r.escape)});
    std::vector<std::size_t> width(5, 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::ostringstream out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << "  ";
            if (i + 1 == row.size()) out << row[i];
            else out << std::string(width[i] - row[i].size(), ' ') << row[i];
        }
        out << '\n';
    }
    return out.str();
}

std::string to_json(const GrowthFit& fit) {
    nlohmann::ordered_json j;
    j["exponent"] = fit.exponent;
    j["residual"] = fit.residual;
    return j.dump();
}

}  // namespace defilab
