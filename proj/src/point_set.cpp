#include "defilab/point_set.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <variant>

#include "defilab/error.hpp"

namespace defilab {

struct PointSet::Impl {
    struct Symbolic {
        Qfnf q;
        QfnfEvaluator eval;
    };
    struct Oracle {
        Membership member;
    };
    struct GridBacked {
        Grid grid;
        bool outside;
    };

    std::size_t dim = 0;
    std::string name;
    std::vector<std::string> variables;
    std::optional<std::int64_t> hint;
    std::variant<Symbolic, Oracle, GridBacked> backing;
};

std::vector<std::string> default_axis_names(std::size_t dim) {
    if (dim <= 3) {
        std::vector<std::string> names{"x", "y", "z"};
        names.resize(dim);
        return names;
    }
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

PointSet PointSet::symbolic(Qfnf q, std::string name, std::optional<std::int64_t> recurrence_hint) {
    QfnfEvaluator eval(q);
    std::size_t dim = q.dimension();
    std::vector<std::string> vars = q.variables();
    return PointSet(std::make_shared<const Impl>(Impl{dim, std::move(name), std::move(vars), recurrence_hint,
                                                      Impl::Symbolic{std::move(q), std::move(eval)}}));
}

PointSet PointSet::oracle(std::size_t dim, std::string name, Membership member,
                          std::optional<std::int64_t> recurrence_hint) {
    if (!member) throw Error("oracle set needs a membership procedure");
    return PointSet(std::make_shared<const Impl>(
        Impl{dim, std::move(name), default_axis_names(dim), recurrence_hint, Impl::Oracle{std::move(member)}}));
}

PointSet PointSet::from_grid(Grid g, bool outside, std::string name) {
    std::size_t dim = g.dimension();
    return PointSet(std::make_shared<const Impl>(
        Impl{dim, std::move(name), default_axis_names(dim), std::nullopt, Impl::GridBacked{std::move(g), outside}}));
}

PointSet::Backing PointSet::backing() const noexcept {
    return static_cast<Backing>(impl_->backing.index());
}

std::size_t PointSet::dimension() const noexcept { return impl_->dim; }
const std::string& PointSet::name() const noexcept { return impl_->name; }
const std::vector<std::string>& PointSet::variables() const noexcept { return impl_->variables; }
std::optional<std::int64_t> PointSet::recurrence_hint() const noexcept { return impl_->hint; }

bool PointSet::contains(std::span<const std::int64_t> p) const {
    if (p.size() != impl_->dim)
        throw DimensionError("point " + format_point(p) + " does not have dimension " + std::to_string(impl_->dim));
    return std::visit(
        [&](const auto& b) -> bool {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Impl::Symbolic>) return b.eval(p);
            else if constexpr (std::is_same_v<T, Impl::Oracle>) return b.member(p);
            else return b.grid.contains(p) ? b.grid.get(p) : b.outside;
        },
        impl_->backing);
}

const Qfnf& PointSet::qfnf() const {
    if (const auto* s = std::get_if<Impl::Symbolic>(&impl_->backing)) return s->q;
    throw Error("set '" + impl_->name + "' has no symbolic form");
}

const Grid& PointSet::grid() const {
    if (const auto* g = std::get_if<Impl::GridBacked>(&impl_->backing)) return g->grid;
    throw Error("set '" + impl_->name + "' is not grid-backed");
}

// ---------------------------------------------------------------------------

Formula semilinear_to_formula(const SemiLinearSet& sl, const std::vector<std::string>& variables) {
    if (variables.size() != sl.dimension) throw DimensionError("variable list does not match the set dimension");
    std::vector<Variable> axes;
    for (const auto& v : variables) axes.push_back(Variable::free(v));
    std::optional<Formula> result;
    for (const auto& comp : sl.components) {
        if (comp.base.size() != sl.dimension) throw DimensionError("base point has the wrong dimension");
        std::vector<Variable> coeffs;
        for (std::size_t g = 0; g < comp.generators.size(); ++g) {
            if (comp.generators[g].size() != sl.dimension) throw DimensionError("generator has the wrong dimension");
            coeffs.push_back(Variable::fresh("k" + std::to_string(g + 1)));
        }
        std::optional<Formula> body;
        auto conj = [&](Formula f) { body = body ? Formula::conjunction(*body, f) : f; };
        for (const auto& k : coeffs)
            conj(Formula::compare(Term::variable(k), Comparison::greater_equal, Term::constant(0)));
        for (std::size_t i = 0; i < sl.dimension; ++i) {
            Term rhs = Term::constant(comp.base[i]);
            for (std::size_t g = 0; g < coeffs.size(); ++g) {
                std::int64_t c = comp.generators[g][i];
                if (c == 0) continue;
                rhs = Term::sum(rhs, c == 1 ? Term::variable(coeffs[g]) : Term::scaled(c, coeffs[g]));
            }
            conj(Formula::compare(Term::variable(axes[i]), Comparison::equal, rhs));
        }
        Formula f = body ? *body : Formula::compare(Term::constant(0), Comparison::equal, Term::constant(0));
        for (std::size_t g = coeffs.size(); g > 0; --g) f = Formula::exists(coeffs[g - 1], f);
        result = result ? Formula::disjunction(*result, f) : f;
    }
    if (!result) return Formula::compare(Term::constant(0), Comparison::equal, Term::constant(1));
    return *result;
}

// ---------------------------------------------------------------------------

namespace {

class FibonacciCache {
public:
    static constexpr std::int64_t max_index = std::int64_t{1} << 32;

    bool at(std::int64_t index) {
        const auto* word = current_.load(std::memory_order_acquire);
        if (word && static_cast<std::uint64_t>(index) < word->size()) return (*word)[static_cast<std::size_t>(index)];
        return grow(index);
    }

private:
    bool grow(std::int64_t index) {
        if (index >= max_index) throw Error("Fibonacci index " + std::to_string(index) + " is beyond the supported range");
        std::lock_guard lock(mutex_);
        const auto* word = current_.load(std::memory_order_relaxed);
        if (!word || static_cast<std::uint64_t>(index) >= word->size()) {
            std::size_t target = std::max<std::size_t>(static_cast<std::size_t>(index) + 1, word ? 2 * word->size() : 1024);
            auto next = std::make_unique<std::vector<bool>>(word ? *word : std::vector<bool>{false});
            // h applied letter by letter to the fixed point reproduces it, so extending by reading
            // ahead from a cursor is enough: letter i of the prefix emits h(letter) at the end.
            std::size_t cursor = word ? cursor_ : 0;
            if (!word) {
                next->push_back(true);  // h(0) = 01
                cursor = 1;
            }
            while (next->size() < target) {
                if ((*next)[cursor]) next->push_back(false);
                else {
                    next->push_back(false);
                    next->push_back(true);
                }
                ++cursor;
            }
            cursor_ = cursor;
            word = next.get();
            history_.push_back(std::move(next));
            current_.store(word, std::memory_order_release);
        }
        return (*word)[static_cast<std::size_t>(index)];
    }

    std::atomic<const std::vector<bool>*> current_{nullptr};
    std::mutex mutex_;
    std::vector<std::unique_ptr<std::vector<bool>>> history_;
    std::size_t cursor_ = 0;
};

FibonacciCache& fibonacci_cache() {
    static FibonacciCache cache;
    return cache;
}

}  // namespace

bool fibonacci_letter(std::int64_t index) {
    if (index < 0) return true;
    return fibonacci_cache().at(index);
}

PointSet fibonacci_set(std::size_t dim) {
    if (dim < 1) throw DimensionError("the Fibonacci set needs dimension at least 1");
    return PointSet::oracle(
        dim, dim == 1 ? "fibonacci-1d" : "fibonacci",
        [](std::span<const std::int64_t> p) { return fibonacci_letter(p[0]); }, 1);
}

PointSet toeplitz_set() {
    return PointSet::oracle(
        2, "toeplitz",
        [](std::span<const std::int64_t> p) {
            std::int64_t i = p[0], j = p[1];
            if (i <= 0 || j < 0) return false;
            if (j >= 62) return false;
            std::int64_t step = std::int64_t{1} << (j + 1);
            return i % step == 0;
        });
}

std::string_view example31_formula() {
    return "(x >= 0) & (y >= 0) & ((E l. x = l & y = l) | (E l. x = l & y = 1))";
}

std::string_view example31_strict_formula() {
    return "(x >= 0) & (y >= 0) & (E l. x = l & y = l) & (E l. x = l & y = 1)";
}

std::string_view example32_formula() {
    return "(x >= 0) & (y >= 0) & ((E l. x = l & y = l) | "
           "(E l. E m. l >= 0 & m >= 0 & x = 4 + l + m & y = 3 + 2*m))";
}

namespace {

PointSet from_formula(std::string_view text, std::string name, std::optional<std::int64_t> hint) {
    return PointSet::symbolic(eliminate(parse(text), {"x", "y"}), std::move(name), hint);
}

}  // namespace

PointSet example31() { return from_formula(example31_formula(), "ex31", 4); }
PointSet example31_strict() { return from_formula(example31_strict_formula(), "ex31-strict", 2); }
PointSet example32() { return from_formula(example32_formula(), "ex32", 8); }

Qfnf example32_psi() {
    auto ineq = [](Int a, Int b, Int c) { return Inequality{{a, b}, c}; };
    Inequality x_nonneg = ineq(1, 0, 0), y_nonneg = ineq(0, 1, 0);
    Congruence y_odd{{0, 1}, 1};
    // psi1: y >= x, 2x >= y + 5, y odd
    Cell psi1{{x_nonneg, y_nonneg, ineq(-1, 1, 0), ineq(2, -1, 5)}, {y_odd}};
    // psi2: x = y
    Cell psi2{{x_nonneg, y_nonneg, ineq(-1, 1, 0), ineq(1, -1, 0)}, {}};
    // psi3: x >= y, y >= 3, y odd
    Cell psi3{{x_nonneg, y_nonneg, ineq(1, -1, 0), ineq(0, 1, 3)}, {y_odd}};
    return Qfnf({"x", "y"}, 2, {psi1, psi2, psi3});
}

PointSet singleton_origin(std::size_t dim) {
    if (dim < 1) throw DimensionError("dimension must be at least 1");
    Cell cell;
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<Int> u(dim, 0);
        u[i] = 1;
        cell.inequalities.push_back(Inequality{u, 0});
        u[i] = -1;
        cell.inequalities.push_back(Inequality{u, 0});
    }
    return PointSet::symbolic(Qfnf(default_axis_names(dim), 1, {cell}), "origin", 1);
}

PointSet checkerboard() {
    Cell cell{{}, {Congruence{{1, 1}, 0}}};
    return PointSet::symbolic(Qfnf({"x", "y"}, 2, {cell}), "checkerboard", 0);
}

const std::vector<ExampleInfo>& example_registry() {
    static const std::vector<ExampleInfo> registry{
        {"fibonacci", "points of Z^2 whose first coordinate indexes a 1 of the two-sided Fibonacci word (oracle)"},
        {"toeplitz", "(i,j) with i,j >= 0 and i a positive multiple of 2^(j+1) (oracle)"},
        {"ex31", "diagonal half-line plus the horizontal half-line y = 1"},
        {"ex31-strict", "ex31 with the two existential clauses conjoined: the single point (1,1)"},
        {"ex32", "diagonal half-line plus the cone (4,3) + N(1,0) + N(1,2)"},
        {"origin", "the single point (0,0)"},
        {"checkerboard", "x + y even"},
    };
    return registry;
}

PointSet example(std::string_view name) {
    if (name == "fibonacci") return fibonacci_set(2);
    if (name == "toeplitz") return toeplitz_set();
    if (name == "ex31") return example31();
    if (name == "ex31-strict") return example31_strict();
    if (name == "ex32") return example32();
    if (name == "origin") return singleton_origin(2);
    if (name == "checkerboard") return checkerboard();
    throw Error("unknown example '" + std::string(name) + "'; run 'defilab example' for the list");
}

}  // namespace defilab
