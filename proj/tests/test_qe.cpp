#include "doctest.h"

#include "defilab/complexity.hpp"
#include "defilab/error.hpp"
#include "defilab/formula.hpp"
#include "defilab/point_set.hpp"
#include "defilab/qfnf.hpp"
#include "defilab/raster.hpp"
#include "support/brute_force.hpp"
#include "support/generators.hpp"

using namespace defilab;

namespace {

const std::vector<std::string> xy{"x", "y"};

Inequality ineq(std::int64_t a, std::int64_t b, std::int64_t c) { return {{a, b}, c}; }

/// psi_1 | psi_2 | psi_3 under x >= 0, y >= 0, written out by hand.
Qfnf hand_psi() {
    Congruence y_odd{{0, 1}, 1};
    Cell psi1{{ineq(1, 0, 0), ineq(0, 1, 0), ineq(-1, 1, 0), ineq(2, -1, 5)}, {y_odd}};
    Cell psi2{{ineq(1, 0, 0), ineq(0, 1, 0), ineq(-1, 1, 0), ineq(1, -1, 0)}, {}};
    Cell psi3{{ineq(1, 0, 0), ineq(0, 1, 0), ineq(1, -1, 0), ineq(0, 1, 3)}, {y_odd}};
    return Qfnf(xy, 2, {psi1, psi2, psi3});
}

Qfnf qfnf_of(std::string_view text, const std::vector<std::string>& vars = xy) {
    return eliminate(parse(text), vars);
}

void check_pointwise(const Qfnf& q, const std::function<bool(const Point&)>& expected, const Window& w) {
    w.for_each([&](const Point& p) {
        INFO(format_point(p));
        CHECK(qf_evaluate(q, p) == expected(p));
    });
}

}  // namespace

TEST_CASE("eliminate: parity") {
    Qfnf q = qfnf_of("E y. x = 2*y", {"x"});
    CHECK(q.modulus() == 2);
    REQUIRE(q.cells().size() == 1);
    CHECK(q.cells()[0].inequalities.empty());
    REQUIRE(q.cells()[0].congruences.size() == 1);
    CHECK(q.cells()[0].congruences[0].coefficients == std::vector<Int>{1});
    CHECK(q.cells()[0].congruences[0].residue == 0);
    CHECK(to_text(q) == "dim=1 vars=x J=2\ncell: 1x=0 (mod 2)\n");
}

TEST_CASE("eliminate: tautology gives one unconstrained cell") {
    Qfnf q = qfnf_of("A y. y < x -> y + 1 <= x", {"x"});
    CHECK(q.is_everything());
    CHECK(to_text(q) == "dim=1 vars=x J=1\ncell: true\n");
}

TEST_CASE("eliminate: ex32 matches the hand-written psi") {
    Qfnf q = qfnf_of(example32_formula());
    WindowComparison cmp = equivalent_on_window(q, hand_psi(), Window::cube(2, -5, 30));
    CHECK(cmp.equivalent);
    CHECK_FALSE(cmp.counterexample);
    CHECK(equivalent_on_window(q, example32_psi(), Window::cube(2, -5, 30)).equivalent);
}

TEST_CASE("eliminate: free variable missing from the order") {
    CHECK_THROWS_AS(eliminate(parse("x < y"), {"x"}), Error);
}

TEST_CASE("eliminate: resource limits name the subformula") {
    EliminationLimits tight;
    tight.max_cells = 2;
    try {
        eliminate(parse("E u. E v. x - 3*u % 5 = 1 & y + 2*v % 7 = 3 & u < v & 2*u > x - 9"), xy, tight);
        FAIL("expected a resource limit");
    } catch (const ResourceLimitError& e) {
        CHECK_FALSE(e.subformula().empty());
    }
}

TEST_CASE("eliminate: variables pinned to a short interval") {
    // Some multiple of 3 lies within [x - 2, x].
    check_pointwise(qfnf_of("E u. x - 2 <= u & u <= x & u % 3 = 0", {"x"}), [](const Point&) { return true; },
                    Window::cube(1, 20));
    Qfnf q = qfnf_of("E u. x <= 2*u & 2*u <= x + 1 & u % 2 = 1", {"x"});
    check_pointwise(q, [](const Point& p) { return bf::mod(p[0], 4) == 1 || bf::mod(p[0], 4) == 2; },
                    Window::cube(1, 20));
    CHECK(qfnf_of("E u. x + 3 <= u & u <= x + 1", {"x"}).is_empty_union());
}

TEST_CASE("eliminate: nested universal over a guarded existential") {
    const std::string text =
        "A u. ((1 <= u & u <= 5) -> E v. ((0 <= v & v <= 2) & ((4*y + 4*v >= 2*x - 3*u -> 2*x - 4*u - v - 3 % 4 = 3)"
        " & !(y + 1 < 4*v + 2*u) & (3*v + 2*x + 4*u < 1 -> 2*x + 3*y + 3*v >= 2 & u - 2*y - x - 5 % 2 = 1))"
        " & (2*y = -1 | -5*x + 5 != 0)))";
    Formula f = parse(text);
    Qfnf q = eliminate(f, {"x", "y", "z"});
    Window::cube(3, 6).for_each([&](const Point& p) {
        INFO(format_point(p));
        CHECK(qf_evaluate(q, p) == bf::bounded_eval(f, {"x", "y", "z"}, p, 12));
    });
}

TEST_CASE("qf_evaluate examples") {
    CHECK(qf_evaluate(checkerboard().qfnf(), Point{1, 1}));
    CHECK(qf_evaluate(example31().qfnf(), Point{7, 7}));
    CHECK_FALSE(qf_evaluate(example31().qfnf(), Point{7, 2}));
    Qfnf empty = Qfnf::nothing(xy);
    CHECK_FALSE(qf_evaluate(empty, Point{0, 0}));
    CHECK_FALSE(qf_evaluate(empty, Point{-3, 12}));
    std::vector<Int> big{Int(1) << 80, Int(1) << 80};
    CHECK(qf_evaluate(checkerboard().qfnf(), std::span<const Int>(big)));
}

TEST_CASE("cell normal form invariants") {
    Cell c{{{{4, 6}, 3}}, {{{3, 5}, 7}}};
    Qfnf q(xy, 4, {c});
    REQUIRE(q.cells().size() == 1);
    // 4x + 6y >= 3 becomes 2x + 3y >= 2.
    CHECK(q.cells()[0].inequalities[0].coefficients == std::vector<Int>{2, 3});
    CHECK(q.cells()[0].inequalities[0].bound == 2);
    for (const auto& g : q.cells()[0].congruences) {
        CHECK(g.residue >= 0);
        CHECK(g.residue < q.modulus());
    }
    // x >= 1 and -x >= 0 is rationally infeasible and is dropped.
    Qfnf infeasible(xy, 1, {Cell{{ineq(1, 0, 1), ineq(-1, 0, 0)}, {}}});
    CHECK(infeasible.is_empty_union());
}

TEST_CASE("boolean algebra examples") {
    CHECK(complement(Qfnf::everything(xy)).is_empty_union());
    Qfnf cb = checkerboard().qfnf();
    Qfnf shifted = translate(cb, Point{1, 0});
    check_pointwise(shifted, [](const Point& p) { return bf::mod(p[0] + p[1], 2) == 1; }, Window::cube(2, 10));

    Qfnf upper = qfnf_of("y >= 2");
    Qfnf diag = intersect(example31().qfnf(), upper);
    check_pointwise(diag, [](const Point& p) { return p[0] == p[1] && p[1] >= 2; }, Window::cube(2, -5, 20));

    WindowComparison same = equivalent_on_window(cb, complement(complement(cb)), Window::cube(2, 10));
    CHECK(same.equivalent);
    WindowComparison differ = equivalent_on_window(cb, shifted, Window::cube(2, 10));
    CHECK_FALSE(differ.equivalent);
    REQUIRE(differ.counterexample);
    CHECK(*differ.counterexample == Point{0, 0});
}

TEST_CASE("modulus of combined forms is the lcm") {
    Qfnf a = qfnf_of("x % 4 = 1");
    Qfnf b = qfnf_of("y % 6 = 5");
    CHECK(unite(a, b).modulus() == 12);
    CHECK(intersect(a, b).modulus() == 12);
}

TEST_CASE("section examples") {
    Qfnf row = section(example32().qfnf(), 1, 3);
    CHECK(row.dimension() == 1);
    Point p(1);
    for (std::int64_t x = -5; x <= 40; ++x) {
        p[0] = x;
        CHECK(qf_evaluate(row, p) == (x >= 3));
    }
    Qfnf column = section(checkerboard().qfnf(), 0, 0);
    for (std::int64_t y = -9; y <= 9; ++y) {
        p[0] = y;
        CHECK(qf_evaluate(column, p) == (bf::mod(y, 2) == 0));
    }
    Qfnf all = section(Qfnf::everything(xy), 1, -7);
    CHECK(all.is_everything());
    CHECK(all.dimension() == 1);
}

TEST_CASE("border examples") {
    Qfnf ray = qfnf_of("x >= 0", {"x"});
    Window line = Window::cube(1, 30);
    check_pointwise(border(ray, Point{1}), [](const Point&) { return false; }, line);
    check_pointwise(border(ray, Point{-1}), [](const Point& p) { return p[0] == 0; }, line);
    Qfnf cb = checkerboard().qfnf();
    CHECK(equivalent_on_window(border(cb, Point{1, 0}), cb, Window::cube(2, 10)).equivalent);
    CHECK_THROWS_AS(border(cb, Point{0, 0}), PreconditionError);
}

TEST_CASE("text form") {
    Qfnf q(xy, 2, {Cell{{ineq(2, 1, 3)}, {{{1, 0}, 1}}}});
    CHECK(to_text(q) == "dim=2 vars=x,y J=2\ncell: 2x+1y>=3 ; 1x+0y=1 (mod 2)\n");
    CHECK(to_text(Qfnf::nothing(xy)) == "dim=2 vars=x,y J=1\n");
}

TEST_CASE("fast and exact evaluators agree") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 50; ++i) {
        Qfnf q = bf::random_qfnf(rng, xy);
        QfnfEvaluator fast(q);
        Window::cube(2, 12).for_each([&](const Point& p) { CHECK(fast(p) == qf_evaluate(q, p)); });
    }
}

TEST_CASE("property: elimination agrees with bounded brute force") {
    bf::FormulaGenerator gen(2024);
    const std::vector<std::string> names{"x", "y", "z"};
    for (int i = 0; i < 60; ++i) {
        std::size_t free_count = static_cast<std::size_t>(1 + i % 3);
        std::vector<std::string> vars(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(free_count));
        int bound_count = static_cast<int>(3 - free_count);
        std::string text = gen.formula(vars, bound_count);
        Formula f = parse(text);
        Qfnf q = eliminate(f, vars);
        const std::int64_t radius = free_count == 3 ? 6 : 15;
        std::size_t mismatches = 0;
        Window::cube(free_count, radius).for_each([&](const Point& p) {
            if (qf_evaluate(q, p) != bf::bounded_eval(f, vars, p, 24)) ++mismatches;
        });
        INFO(text);
        CHECK(mismatches == 0);
    }
}

TEST_CASE("property: cell algebra laws hold pointwise") {
    std::mt19937_64 rng(7);
    const Window w = Window::cube(2, 12);
    for (int i = 0; i < 40; ++i) {
        Qfnf a = bf::random_qfnf(rng, xy);
        Qfnf b = bf::random_qfnf(rng, xy);
        CHECK(equivalent_on_window(complement(unite(a, b)), intersect(complement(a), complement(b)), w).equivalent);
        CHECK(equivalent_on_window(complement(intersect(a, b)), unite(complement(a), complement(b)), w).equivalent);
        CHECK(equivalent_on_window(complement(complement(a)), a, w).equivalent);
        Point t{static_cast<std::int64_t>(i % 5) - 2, 3};
        Point minus{-t[0], -t[1]};
        CHECK(equivalent_on_window(translate(translate(a, t), minus), a, w).equivalent);
        w.for_each([&](const Point& p) {
            CHECK(qf_evaluate(unite(a, b), p) == (qf_evaluate(a, p) || qf_evaluate(b, p)));
            Point shifted{p[0] - t[0], p[1] - t[1]};
            CHECK(qf_evaluate(translate(a, t), p) == qf_evaluate(a, shifted));
        });
    }
}

TEST_CASE("property: congruence-only forms have at most J^d blocks") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 25; ++i) {
        std::int64_t J = 2 + i % 3;
        std::vector<Cell> cells(1 + static_cast<std::size_t>(i % 2));
        for (auto& c : cells)
            c.congruences.push_back({{Int(static_cast<std::int64_t>(rng() % 5)), Int(static_cast<std::int64_t>(rng() % 5))},
                                     Int(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(J)))});
        Qfnf q(xy, J, cells);
        REQUIRE(q.congruences_only());
        PointSet s = PointSet::symbolic(q);
        for (std::int64_t n = 1; n <= 6; ++n) CHECK(p_count(s, n, Window::cube(2, 12)) <= static_cast<std::uint64_t>(J * J));
    }
}

TEST_CASE("property: sections commute with rasterization") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 30; ++i) {
        Qfnf q = bf::random_qfnf(rng, xy);
        std::size_t axis = static_cast<std::size_t>(i % 2);
        std::int64_t c = static_cast<std::int64_t>(rng() % 21) - 10;
        Grid full = rasterize(PointSet::symbolic(q), Window::cube(2, 10));
        Grid line = rasterize(PointSet::symbolic(section(q, axis, c)), Window::cube(1, 10));
        for (std::int64_t t = -10; t <= 10; ++t) {
            Point p = axis == 0 ? Point{c, t} : Point{t, c};
            CHECK(line.get(Point{t}) == full.get(p));
        }
    }
}

TEST_CASE("property: symbolic border equals the raster border") {
    std::mt19937_64 rng(29);
    const Window w = Window::cube(2, 12);
    for (int i = 0; i < 30; ++i) {
        Qfnf q = bf::random_qfnf(rng, xy);
        Point v{static_cast<std::int64_t>(rng() % 5) - 2, static_cast<std::int64_t>(rng() % 5) - 2};
        if (v == Point{0, 0}) v = {1, 0};
        Grid g = rasterize(PointSet::symbolic(q), w);
        Qfnf b = border(q, v);
        w.shrunk(2).for_each([&](const Point& p) {
            Point pv{p[0] + v[0], p[1] + v[1]};
            CHECK(qf_evaluate(b, p) == (g.get(p) && !g.get(pv)));
        });
    }
}
