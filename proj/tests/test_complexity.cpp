#include "doctest.h"

#include <cmath>

#include "defilab/complexity.hpp"
#include "defilab/error.hpp"
#include "defilab/point_set.hpp"
#include "defilab/qfnf.hpp"
#include "defilab/raster.hpp"
#include "support/brute_force.hpp"
#include "support/generators.hpp"

using namespace defilab;

TEST_CASE("block_at examples") {
    Grid cb = rasterize(checkerboard(), Window::cube(2, 4));
    Block b = block_at(cb, Point{0, 0}, 2);
    CHECK(b.popcount() == 2);
    CHECK(b.get(Point{0, 0}));
    CHECK(b.get(Point{1, 1}));
    CHECK_FALSE(b.get(Point{0, 1}));

    Grid ex = rasterize(example31(), Window::cube(2, 0, 10));
    Block one = block_at(ex, Point{5, 5}, 1);
    CHECK(one.bit_count() == 1);
    CHECK(one.popcount() == (example31().contains(Point{5, 5}) ? 1u : 0u));

    Grid empty(Window::cube(2, 5));
    CHECK(block_at(empty, Point{-2, 1}, 3).popcount() == 0);
    CHECK(block_at(empty, Point{-2, 1}, 3) == block_at(empty, Point{0, 0}, 3));
    CHECK_THROWS_AS(block_at(empty, Point{4, 4}, 3), GeometryError);
}

TEST_CASE("block equality is bitwise") {
    Grid g = rasterize(example32(), Window::cube(2, 0, 40));
    Window::cube(2, 0, 10).for_each([&](const Point& a) {
        Point b{a[0] + 17, a[1] + 3};
        bool same = bf::naive_block(bf::membership(example32()), a, {5, 5}) ==
                    bf::naive_block(bf::membership(example32()), b, {5, 5});
        CHECK((block_at(g, a, 5) == block_at(g, b, 5)) == same);
    });
}

TEST_CASE("p_count examples") {
    for (std::int64_t n = 1; n <= 6; ++n)
        CHECK(p_count(singleton_origin(2), n, Window::cube(2, n)) == static_cast<std::uint64_t>(n * n + 1));
    Window fib({{-60, 120}, {0, 12}});
    for (std::int64_t n = 1; n <= 10; ++n) CHECK(p_count(fibonacci_set(2), n, fib) == static_cast<std::uint64_t>(2 * n));
    CHECK(p_count(checkerboard(), 4, Window::cube(2, 8)) == 2);
    CHECK_THROWS_AS(p_count(checkerboard(), 20, Window::cube(2, 8)), GeometryError);
}

TEST_CASE("r_count counts anchors far from the origin") {
    Grid g = rasterize(singleton_origin(2), Window::cube(2, 10));
    CHECK(r_count(g, 3, 0) == 10);
    CHECK(r_count(g, 3, 3) == 1);
    CHECK_THROWS_AS(r_count(g, 3, 50), GeometryError);
}

TEST_CASE("stabilized_r examples") {
    ComplexityRow o = stabilized_r(singleton_origin(2), 5);
    CHECK(o.count == 1);
    CHECK(o.stabilized);
    ComplexityRow e = stabilized_r(example31(), 4);
    CHECK(e.count == 12);
    CHECK(e.stabilized);
    ComplexityRow f = stabilized_r(fibonacci_set(1), 4);
    CHECK(f.count == 6);
    CHECK(f.stabilized);
    CHECK(f.escape == f.window.max_norm() / 2);
}

TEST_CASE("stabilized_r reports a cap without stabilizing") {
    StabilizeOptions o;
    o.max_radius = 16;
    ComplexityRow t = stabilized_r(toeplitz_set(), 5, o);
    CHECK_FALSE(t.stabilized);
}

TEST_CASE("recurrent table of ex31 is 3n from n = 2") {
    ComplexityTable t = recurrent_table(example31(), 1, 8);
    REQUIRE(t.size() == 8);
    CHECK(t[0].count == 2);
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(t[i].stabilized);
        CHECK(t[i].count == static_cast<std::uint64_t>(3 * t[i].n));
    }
}

TEST_CASE("recurrent table of ex32 is 8n - 7 from n = 2") {
    ComplexityTable t = recurrent_table(example32(), 1, 6);
    auto member = bf::membership(example32());
    for (const auto& row : t) {
        CHECK(row.stabilized);
        CHECK(row.count == bf::naive_count(member, Window::cube(2, 64), {row.n, row.n}, 32));
        CHECK(row.count == (row.n == 1 ? 2u : static_cast<std::uint64_t>(8 * row.n - 7)));
    }
}

TEST_CASE("rect_count examples") {
    CHECK(rect_count(checkerboard(), std::vector<std::int64_t>{3, 2}, Window::cube(2, 8)) == 2);
    CHECK(rect_count(singleton_origin(2), std::vector<std::int64_t>{2, 3}, Window::cube(2, 4)) == 7);
    for (std::int64_t n = 1; n <= 5; ++n)
        CHECK(rect_count(example32(), std::vector<std::int64_t>{n, n}, Window::cube(2, 0, 30)) ==
              p_count(example32(), n, Window::cube(2, 0, 30)));
}

TEST_CASE("growth_fit examples") {
    auto table = [](auto f) {
        ComplexityTable t;
        for (std::int64_t n = 2; n <= 9; ++n) t.push_back({n, static_cast<std::uint64_t>(f(n)), true, Window::cube(2, 1), 0});
        return t;
    };
    CHECK(growth_fit(table([](std::int64_t n) { return 3 * n; })).exponent == doctest::Approx(1.0).epsilon(0.05));
    CHECK(growth_fit(table([](std::int64_t n) { return n * n; })).exponent == doctest::Approx(2.0).epsilon(0.05));
    GrowthFit flat = growth_fit(table([](std::int64_t) { return 7; }));
    CHECK(std::abs(flat.exponent) < 0.05);
    CHECK(flat.residual < 1e-9);
    CHECK(flat.points == 8);
    ComplexityTable few = table([](std::int64_t n) { return n; });
    few.resize(3);
    CHECK_THROWS_AS(growth_fit(few), Error);
    few[0].stabilized = false;
    few.resize(3);
}

TEST_CASE("table serializations") {
    ComplexityTable t{{1, 2, true, Window::cube(2, 16), 8}, {2, 6, false, Window({{0, 32}, {0, 8}}), 16}};
    CHECK(to_csv(t) == "n,count,stabilized,window,L\n1,2,true,[-16..16]x[-16..16],8\n2,6,false,[0..32]x[0..8],16\n");
    CHECK(to_text(t).find("stabilized") != std::string::npos);
    CHECK(to_json(GrowthFit{1.5, 0.25, 4}) == R"({"exponent":1.5,"residual":0.25})");
}

TEST_CASE("threaded counts equal serial counts") {
    CountOptions many;
    many.threads = 3;
    for (const auto& name : {"ex32", "fibonacci", "toeplitz"}) {
        Grid g = rasterize(example(name), Window({{-20, 60}, {-10, 30}}));
        for (std::int64_t n = 1; n <= 6; ++n) {
            CHECK(p_count(g, n, many) == p_count(g, n));
            CHECK(r_count(g, n, 10, many) == r_count(g, n, 10));
        }
    }
}

TEST_CASE("property: counts agree with a naive recount") {
    std::mt19937_64 rng(3);
    std::vector<PointSet> sets{example31(), example32(), checkerboard(), toeplitz_set(), fibonacci_set(2)};
    for (int i = 0; i < 10; ++i) sets.push_back(PointSet::symbolic(bf::random_qfnf(rng, {"x", "y"})));
    const Window w = Window({{-20, 19}, {-15, 24}});
    for (const auto& s : sets) {
        Grid g = rasterize(s, w);
        auto member = bf::membership(s);
        for (std::int64_t n = 1; n <= 5; ++n) {
            CHECK(p_count(g, n) == bf::naive_count(member, w, {n, n}));
            CHECK(r_count(g, n, 9) == bf::naive_count(member, w, {n, n}, 9));
        }
        CHECK(rect_count(g, std::vector<std::int64_t>{4, 2}) == bf::naive_count(member, w, {4, 2}));
        CHECK(rect_count(g, std::vector<std::int64_t>{1, 7}) == bf::naive_count(member, w, {1, 7}));
    }
}

TEST_CASE("property: R <= p <= 2^(n^d) and both are monotone") {
    for (const auto& name : {"ex31", "ex32", "checkerboard", "fibonacci", "origin"}) {
        PointSet s = example(name);
        ComplexityTable r = recurrent_table(s, 1, 6);
        ComplexityTable p = block_table(s, 1, 6);
        for (std::size_t i = 0; i < r.size(); ++i) {
            INFO(name << " n=" << r[i].n);
            CHECK(r[i].count <= p[i].count);
            if (r[i].n <= 2) CHECK(p[i].count <= (std::uint64_t{1} << (r[i].n * r[i].n)));
            if (i > 0) {
                CHECK(p[i].count >= p[i - 1].count);
                CHECK(r[i].count >= r[i - 1].count);
            }
        }
    }
}

TEST_CASE("property: counts are translation invariant") {
    for (const auto& name : {"ex31", "ex32", "toeplitz"}) {
        PointSet s = example(name);
        Window w({{-10, 30}, {-10, 30}});
        Point t{7, -4};
        PointSet shifted = PointSet::oracle(2, "shifted", [s, t](std::span<const std::int64_t> p) {
            return s.contains(Point{p[0] - t[0], p[1] - t[1]});
        });
        for (std::int64_t n = 1; n <= 5; ++n)
            CHECK(p_count(s, n, w) == p_count(shifted, n, w.translated(t)));
    }
    PointSet e = example31();
    PointSet far = PointSet::symbolic(translate(e.qfnf(), Point{3, -2}), "", 8);
    for (std::int64_t n = 1; n <= 5; ++n) CHECK(stabilized_r(e, n).count == stabilized_r(far, n).count);
}
