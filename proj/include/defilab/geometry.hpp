#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace defilab {

using Point = std::vector<std::int64_t>;

std::int64_t sup_norm(std::span<const std::int64_t> p);

std::string format_point(std::span<const std::int64_t> p);

struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    std::int64_t extent() const noexcept { return hi - lo + 1; }
    bool contains(std::int64_t v) const noexcept { return lo <= v && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box of integer points, inclusive bounds per axis.
class Window {
public:
    Window() = default;
    explicit Window(std::vector<Interval> axes);

    /// [-radius, radius]^dim
    static Window cube(std::size_t dim, std::int64_t radius);
    static Window cube(std::size_t dim, std::int64_t lo, std::int64_t hi);

    std::size_t dimension() const noexcept { return axes_.size(); }
    const Interval& axis(std::size_t i) const { return axes_.at(i); }
    const std::vector<Interval>& axes() const noexcept { return axes_; }

    bool contains(std::span<const std::int64_t> p) const;
    std::uint64_t point_count() const;
    Point low_corner() const;

    Window expanded(std::int64_t margin) const;
    Window shrunk(std::int64_t margin) const;
    Window translated(std::span<const std::int64_t> t) const;
    /// Empty optional-like behaviour is signalled by returning false.
    bool intersect(const Window& other, Window& out) const;
    Window without_axis(std::size_t axis) const;

    /// Largest sup-norm attained by a point of the window.
    std::int64_t max_norm() const;

    /// Visit every point in lexicographic order (first axis slowest).
    template <typename F>
    void for_each(F&& visit) const;

    /// "[lo..hi]x[lo..hi]"
    std::string to_string() const;

    friend bool operator==(const Window&, const Window&) = default;

private:
    std::vector<Interval> axes_;
};

/// Parses "x=-20..20,y=-20..20" (names matched against `names`) or the positional form "-20..20,-20..20".
Window parse_window(std::string_view text, const std::vector<std::string>& names);

/// Parses "1,-2,3".
Point parse_point(std::string_view text);

template <typename F>
void Window::for_each(F&& visit) const {
    const std::size_t d = axes_.size();
    if (d == 0) {
        Point empty;
        visit(static_cast<const Point&>(empty));
        return;
    }
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = axes_[i].lo;
    while (true) {
        visit(static_cast<const Point&>(p));
        std::size_t i = d;
        while (i > 0) {
            --i;
            if (p[i] < axes_[i].hi) {
                ++p[i];
                break;
            }
            p[i] = axes_[i].lo;
            if (i == 0) return;
        }
    }
}

}  // namespace defilab
