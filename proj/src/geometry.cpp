#include "defilab/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>

#include "defilab/error.hpp"

namespace defilab {

std::int64_t sup_norm(std::span<const std::int64_t> p) {
    std::int64_t n = 0;
    for (auto v : p) n = std::max(n, v < 0 ? -v : v);
    return n;
}

std::string format_point(std::span<const std::int64_t> p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(p[i]);
    }
    return out + ")";
}

Window::Window(std::vector<Interval> axes) : axes_(std::move(axes)) {
    for (const auto& a : axes_)
        if (a.lo > a.hi) throw Error("window axis has lo > hi");
}

Window Window::cube(std::size_t dim, std::int64_t radius) {
    return cube(dim, -radius, radius);
}

Window Window::cube(std::size_t dim, std::int64_t lo, std::int64_t hi) {
    return Window(std::vector<Interval>(dim, Interval{lo, hi}));
}

bool Window::contains(std::span<const std::int64_t> p) const {
    if (p.size() != axes_.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!axes_[i].contains(p[i])) return false;
    return true;
}

std::uint64_t Window::point_count() const {
    std::uint64_t n = 1;
    for (const auto& a : axes_) {
        auto e = static_cast<std::uint64_t>(a.extent());
        if (e != 0 && n > std::numeric_limits<std::uint64_t>::max() / e)
            return std::numeric_limits<std::uint64_t>::max();
        n *= e;
    }
    return n;
}

Point Window::low_corner() const {
    Point p(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) p[i] = axes_[i].lo;
    return p;
}

Window Window::expanded(std::int64_t margin) const {
    auto axes = axes_;
    for (auto& a : axes) {
        a.lo -= margin;
        a.hi += margin;
    }
    return Window(std::move(axes));
}

Window Window::shrunk(std::int64_t margin) const {
    auto axes = axes_;
    for (auto& a : axes) {
        a.lo += margin;
        a.hi -= margin;
        if (a.lo > a.hi) throw GeometryError("window too small to shrink by " + std::to_string(margin));
    }
    return Window(std::move(axes));
}

Window Window::translated(std::span<const std::int64_t> t) const {
    if (t.size() != axes_.size()) throw DimensionError("translation dimension mismatch");
    auto axes = axes_;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        axes[i].lo += t[i];
        axes[i].hi += t[i];
    }
    return Window(std::move(axes));
}

bool Window::intersect(const Window& other, Window& out) const {
    if (other.dimension() != dimension()) throw DimensionError("window dimension mismatch");
    std::vector<Interval> axes(axes_.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        axes[i].lo = std::max(axes_[i].lo, other.axes_[i].lo);
        axes[i].hi = std::min(axes_[i].hi, other.axes_[i].hi);
        if (axes[i].lo > axes[i].hi) return false;
    }
    out = Window(std::move(axes));
    return true;
}

Window Window::without_axis(std::size_t axis) const {
    auto axes = axes_;
    axes.erase(axes.begin() + static_cast<std::ptrdiff_t>(axis));
    return Window(std::move(axes));
}

std::int64_t Window::max_norm() const {
    std::int64_t n = 0;
    for (const auto& a : axes_) n = std::max({n, a.lo < 0 ? -a.lo : a.lo, a.hi < 0 ? -a.hi : a.hi});
    return n;
}

std::string Window::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (i) out += "x";
        out += "[" + std::to_string(axes_[i].lo) + ".." + std::to_string(axes_[i].hi) + "]";
    }
    return out;
}

namespace {

std::int64_t parse_int(std::string_view s, std::string_view context) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    std::int64_t v = 0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw Error("malformed integer '" + std::string(s) + "' in " + std::string(context));
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

Interval parse_range(std::string_view s, std::string_view context) {
    auto dots = s.find("..");
    if (dots == std::string_view::npos) {
        auto v = parse_int(s, context);
        return {v, v};
    }
    Interval iv{parse_int(s.substr(0, dots), context), parse_int(s.substr(dots + 2), context)};
    if (iv.lo > iv.hi) throw Error("empty range '" + std::string(s) + "' in " + std::string(context));
    return iv;
}

}  // namespace

Window parse_window(std::string_view text, const std::vector<std::string>& names) {
    auto parts = split(text, ',');
    bool named = text.find('=') != std::string_view::npos;
    if (!named) {
        std::vector<Interval> axes;
        for (auto p : parts) axes.push_back(parse_range(p, "window"));
        return Window(std::move(axes));
    }
    if (parts.size() != names.size())
        throw Error("window names " + std::to_string(parts.size()) + " axes but the set has dimension " +
                    std::to_string(names.size()));
    std::vector<Interval> axes(names.size());
    std::vector<bool> seen(names.size(), false);
    for (auto p : parts) {
        auto eq = p.find('=');
        if (eq == std::string_view::npos) throw Error("window axis '" + std::string(p) + "' lacks a name");
        auto name = p.substr(0, eq);
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error("unknown window axis '" + std::string(name) + "'");
        auto idx = static_cast<std::size_t>(it - names.begin());
        if (seen[idx]) throw Error("window axis '" + std::string(name) + "' given twice");
        seen[idx] = true;
        axes[idx] = parse_range(p.substr(eq + 1), "window");
    }
    return Window(std::move(axes));
}

Point parse_point(std::string_view text) {
    Point p;
    if (text.empty()) return p;
    for (auto part : split(text, ',')) p.push_back(parse_int(part, "point"));
    return p;
}

}  // namespace defilab
