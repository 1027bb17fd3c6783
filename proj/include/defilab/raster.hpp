#pragma once

#include <cstdint>

#include "defilab/geometry.hpp"
#include "defilab/grid.hpp"
#include "defilab/point_set.hpp"

namespace defilab {

struct RasterOptions {
    std::uint64_t max_bits = Grid::default_max_bits;
    /// 0 picks the hardware concurrency.
    unsigned threads = 1;
};

/// Bit at p equals s.contains(p) for every p in w.
Grid rasterize(const PointSet& s, const Window& w, const RasterOptions& options = {});

}  // namespace defilab
