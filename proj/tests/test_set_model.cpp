#include "doctest.h"

#include <random>
#include <thread>

#include "defilab/error.hpp"
#include "defilab/formula.hpp"
#include "defilab/point_set.hpp"
#include "defilab/qfnf.hpp"
#include "defilab/raster.hpp"
#include "support/brute_force.hpp"

using namespace defilab;

TEST_CASE("membership examples") {
    PointSet t = toeplitz_set();
    CHECK(t.contains(Point{8, 1}));
    CHECK_FALSE(t.contains(Point{4, 2}));
    CHECK_FALSE(t.contains(Point{0, 0}));
    CHECK(t.contains(Point{2, 0}));
    CHECK_FALSE(t.contains(Point{-8, 1}));

    PointSet o = singleton_origin(3);
    CHECK(o.contains(Point{0, 0, 0}));
    CHECK_FALSE(o.contains(Point{0, 0, 1}));

    CHECK(example32().contains(Point{4, 3}));
    CHECK(example31().contains(Point{9, 1}));
    CHECK_FALSE(example31().contains(Point{9, 2}));
    CHECK(checkerboard().contains(Point{2, 2}));
    CHECK(example31_strict().contains(Point{1, 1}));
    CHECK_FALSE(example31_strict().contains(Point{2, 2}));
}

TEST_CASE("backings") {
    CHECK(example31().is_symbolic());
    CHECK(example32().is_symbolic());
    CHECK(checkerboard().is_symbolic());
    CHECK(singleton_origin(2).is_symbolic());
    CHECK(toeplitz_set().backing() == PointSet::Backing::oracle);
    CHECK(fibonacci_set(2).backing() == PointSet::Backing::oracle);
    CHECK_THROWS_AS(toeplitz_set().qfnf(), Error);

    Grid g(Window::cube(2, 1));
    g.set(Point{1, 1}, true);
    PointSet inside = PointSet::from_grid(g, false);
    PointSet outside = PointSet::from_grid(g, true);
    CHECK(inside.contains(Point{1, 1}));
    CHECK_FALSE(inside.contains(Point{0, 0}));
    CHECK_FALSE(inside.contains(Point{5, 5}));
    CHECK(outside.contains(Point{5, 5}));
}

TEST_CASE("fibonacci word") {
    PointSet g = fibonacci_set(2);
    CHECK_FALSE(g.contains(Point{0, 17}));
    CHECK(g.contains(Point{1, -4}));
    CHECK(g.contains(Point{-5, 0}));
    CHECK(fibonacci_set(1).contains(Point{-1}));

    std::string prefix = bf::fibonacci_prefix(3000);
    for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(fibonacci_letter(static_cast<std::int64_t>(i)) == (prefix[i] == '1'));
}

TEST_CASE("fibonacci word is safe to read from several threads") {
    std::string prefix = bf::fibonacci_prefix(200000);
    std::vector<int> errors(4, 0);
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] {
            for (std::size_t i = static_cast<std::size_t>(t); i < prefix.size(); i += 97)
                if (fibonacci_letter(static_cast<std::int64_t>(prefix.size() - 1 - i)) !=
                    (prefix[prefix.size() - 1 - i] == '1'))
                    ++errors[static_cast<std::size_t>(t)];
        });
    }
    for (auto& w : workers) w.join();
    for (int e : errors) CHECK(e == 0);
}

TEST_CASE("examples agree with their quantified formulas") {
    const Window w = Window::cube(2, -20, 40);
    for (auto [name, text] : {std::pair{"ex31", example31_formula()}, std::pair{"ex32", example32_formula()},
                              std::pair{"ex31-strict", example31_strict_formula()}}) {
        PointSet s = example(name);
        Formula f = parse(text);
        std::size_t mismatches = 0;
        w.for_each([&](const Point& p) {
            if (s.contains(p) != bf::bounded_eval(f, {"x", "y"}, p, 45)) ++mismatches;
        });
        INFO(name);
        CHECK(mismatches == 0);
    }
}

TEST_CASE("registry") {
    std::vector<std::string> names;
    for (const auto& e : example_registry()) names.push_back(e.name);
    CHECK(names == std::vector<std::string>{"fibonacci", "toeplitz", "ex31", "ex31-strict", "ex32", "origin",
                                            "checkerboard"});
    for (const auto& n : names) CHECK(example(n).dimension() == 2);
    CHECK_THROWS_AS(example("nope"), Error);
}

TEST_CASE("semilinear sets") {
    Formula diag = semilinear_to_formula({2, {{{0, 0}, {{1, 1}}}}}, {"x", "y"});
    Grid g = rasterize(PointSet::symbolic(eliminate(diag, {"x", "y"})), Window::cube(2, 0, 10));
    Window::cube(2, 0, 10).for_each([&](const Point& p) { CHECK(g.get(p) == (p[0] == p[1])); });

    Formula single = semilinear_to_formula({2, {{{2, 5}, {}}}}, {"x", "y"});
    Qfnf q = eliminate(single, {"x", "y"});
    Window::cube(2, 8).for_each([&](const Point& p) { CHECK(qf_evaluate(q, p) == (p == Point{2, 5})); });

    Formula none = semilinear_to_formula({2, {}}, {"x", "y"});
    CHECK(eliminate(none, {"x", "y"}).is_empty_union());
}

TEST_CASE("semilinear cone of ex32") {
    LinearComponent cone{{4, 3}, {{1, 0}, {1, 2}}};
    Qfnf q = eliminate(semilinear_to_formula({2, {cone}}, {"x", "y"}), {"x", "y"});
    Qfnf second = eliminate(parse("E l. E m. l >= 0 & m >= 0 & x = 4 + l + m & y = 3 + 2*m"), {"x", "y"});
    CHECK(equivalent_on_window(q, second, Window::cube(2, -5, 30)).equivalent);
}

TEST_CASE("property: semilinear formulas agree with cone enumeration") {
    std::mt19937_64 rng(99);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    const Window w = Window::cube(2, 8);
    for (int i = 0; i < 25; ++i) {
        SemiLinearSet sl{2, {}};
        for (std::int64_t c = pick(1, 2); c > 0; --c) {
            LinearComponent comp{{pick(-4, 4), pick(-4, 4)}, {}};
            for (std::int64_t k = pick(0, 2); k > 0; --k) {
                Point v{pick(-2, 2), pick(-2, 2)};
                if (v != Point{0, 0}) comp.generators.push_back(v);
            }
            sl.components.push_back(comp);
        }
        Qfnf q = eliminate(semilinear_to_formula(sl, {"x", "y"}), {"x", "y"});
        // Coefficients up to 24 reach every point of the window from any base within it.
        w.for_each([&](const Point& p) {
            bool expected = false;
            for (const auto& c : sl.components) expected = expected || bf::naive_linear_member(c, p, 24);
            CHECK(qf_evaluate(q, p) == expected);
        });
    }
}
