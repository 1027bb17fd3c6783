#include "defilab/raster.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "defilab/error.hpp"

namespace defilab {

namespace {

Point point_of(const Grid& g, std::uint64_t index) {
    const std::size_t d = g.dimension();
    Point p(d);
    for (std::size_t i = d; i > 0; --i) {
        auto e = static_cast<std::uint64_t>(g.extents()[i - 1]);
        p[i - 1] = g.origin()[i - 1] + static_cast<std::int64_t>(index % e);
        index /= e;
    }
    return p;
}

void step(const Grid& g, Point& p) {
    for (std::size_t i = g.dimension(); i > 0; --i) {
        if (p[i - 1] < g.origin()[i - 1] + g.extents()[i - 1] - 1) {
            ++p[i - 1];
            return;
        }
        p[i - 1] = g.origin()[i - 1];
    }
}

// Fills whole words [first_word, last_word) so that workers never share a word.
void fill(const PointSet& s, Grid& g, std::uint64_t first_word, std::uint64_t last_word) {
    std::uint64_t begin = first_word * 64;
    std::uint64_t end = std::min(last_word * 64, g.size());
    if (begin >= end) return;
    Point p = point_of(g, begin);
    auto& words = g.mutable_words();
    for (std::uint64_t idx = begin; idx < end; ++idx) {
        if (s.contains(p)) words[idx >> 6] |= std::uint64_t{1} << (idx & 63);
        step(g, p);
    }
}

}  // namespace

Grid rasterize(const PointSet& s, const Window& w, const RasterOptions& options) {
    if (w.dimension() != s.dimension())
        throw DimensionError("window dimension " + std::to_string(w.dimension()) + " does not match set dimension " +
                             std::to_string(s.dimension()));
    Grid g(w, options.max_bits);
    const std::uint64_t words = g.words().size();
    unsigned threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.threads;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, words / 64)));
    if (threads <= 1) {
        fill(s, g, 0, words);
        return g;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (words + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                fill(s, g, t * chunk, std::min(words, (t + 1) * chunk));
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return g;
}

}  // namespace defilab
