#include "defilab/grid.hpp"

#include <bit>

#include "json.hpp"

#include "defilab/error.hpp"

namespace defilab {

Grid::Grid(const Window& window, std::uint64_t max_bits) {
    if (window.dimension() == 0) throw DimensionError("grids need at least one axis");
    std::uint64_t count = window.point_count();
    if (count > max_bits)
        throw Error("window " + window.to_string() + " holds " + std::to_string(count) +
                    " points, above the raster cap of " + std::to_string(max_bits) + " bits");
    origin_ = window.low_corner();
    for (const auto& a : window.axes()) extents_.push_back(a.extent());
    strides_.assign(extents_.size(), 1);
    for (std::size_t i = extents_.size() - 1; i > 0; --i)
        strides_[i - 1] = strides_[i] * static_cast<std::uint64_t>(extents_[i]);
    size_ = count;
    words_.assign((count + 63) / 64, 0);
}

Window Grid::window() const {
    std::vector<Interval> axes;
    for (std::size_t i = 0; i < origin_.size(); ++i) axes.push_back({origin_[i], origin_[i] + extents_[i] - 1});
    return Window(std::move(axes));
}

bool Grid::contains(std::span<const std::int64_t> p) const {
    if (p.size() != origin_.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < origin_[i] || p[i] >= origin_[i] + extents_[i]) return false;
    return true;
}

std::uint64_t Grid::index_of(std::span<const std::int64_t> p) const {
    if (!contains(p)) throw GeometryError("point " + format_point(p) + " lies outside the grid " + window().to_string());
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < p.size(); ++i) idx += static_cast<std::uint64_t>(p[i] - origin_[i]) * strides_[i];
    return idx;
}

std::uint64_t Grid::bits(std::uint64_t index, unsigned length) const noexcept {
    if (length == 0) return 0;
    std::uint64_t word = index >> 6;
    unsigned offset = static_cast<unsigned>(index & 63);
    std::uint64_t value = words_[word] >> offset;
    if (offset + length > 64) value |= words_[word + 1] << (64 - offset);
    return length == 64 ? value : value & ((std::uint64_t{1} << length) - 1);
}

std::uint64_t Grid::popcount() const noexcept {
    std::uint64_t n = 0;
    for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

namespace {

void require_2d(const Grid& g, const char* format) {
    if (g.dimension() != 2) throw DimensionError(std::string(format) + " output needs a 2-dimensional grid");
}

template <typename Emit>
void rows_top_down(const Grid& g, Emit&& emit_row) {
    const auto& o = g.origin();
    const auto& e = g.extents();
    for (std::int64_t y = o[1] + e[1] - 1; y >= o[1]; --y) {
        std::string row;
        for (std::int64_t x = o[0]; x < o[0] + e[0]; ++x) {
            std::int64_t p[2] = {x, y};
            row += g.get(p) ? '1' : '0';
        }
        emit_row(row);
    }
}

}  // namespace

std::string to_ascii(const Grid& g) {
    require_2d(g, "ASCII");
    std::string out;
    rows_top_down(g, [&](const std::string& row) {
        for (char c : row) out += c == '1' ? '#' : '.';
        out += '\n';
    });
    return out;
}

std::string to_pbm(const Grid& g) {
    require_2d(g, "PBM");
    std::string out = "P1\n" + std::to_string(g.extents()[0]) + " " + std::to_string(g.extents()[1]) + "\n";
    rows_top_down(g, [&](const std::string& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ' ';
            out += row[i];
        }
        out += '\n';
    });
    return out;
}

std::string to_json(const Grid& g) {
    std::string bits(g.size(), '0');
    for (std::uint64_t i = 0; i < g.size(); ++i)
        if (g.test(i)) bits[i] = '1';
    nlohmann::ordered_json j;
    j["dim"] = g.dimension();
    j["origin"] = g.origin();
    j["extents"] = g.extents();
    j["bits"] = std::move(bits);
    return j.dump();
}

Grid grid_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed grid JSON: ") + e.what());
    }
    try {
        auto dim = j.at("dim").get<std::size_t>();
        auto origin = j.at("origin").get<std::vector<std::int64_t>>();
        auto extents = j.at("extents").get<std::vector<std::int64_t>>();
        auto bits = j.at("bits").get<std::string>();
        if (origin.size() != dim || extents.size() != dim)
            throw Error("grid JSON: origin and extents must have length dim");
        std::vector<Interval> axes;
        for (std::size_t i = 0; i < dim; ++i) {
            if (extents[i] < 1) throw Error("grid JSON: extents must be positive");
            axes.push_back({origin[i], origin[i] + extents[i] - 1});
        }
        Grid g{Window(std::move(axes))};
        if (bits.size() != g.size())
            throw Error("grid JSON: expected " + std::to_string(g.size()) + " bits, found " +
                        std::to_string(bits.size()));
        for (std::uint64_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') g.assign(i, true);
            else if (bits[i] != '0') throw Error("grid JSON: bits must be a 0/1 string");
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed grid JSON: ") + e.what());
    }
}

}  // namespace defilab
