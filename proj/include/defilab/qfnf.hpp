#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "defilab/formula.hpp"
#include "defilab/geometry.hpp"
#include "defilab/integer.hpp"

namespace defilab {

namespace detail {
struct QfnfAccess;
}

/// coefficients · x >= bound. Coefficients are nonzero and have gcd 1.
struct Inequality {
    std::vector<Int> coefficients;
    Int bound;

    friend bool operator==(const Inequality&, const Inequality&) = default;
};

/// coefficients · x ≡ residue (mod J), J owned by the enclosing Qfnf.
struct Congruence {
    std::vector<Int> coefficients;
    Int residue;

    friend bool operator==(const Congruence&, const Congruence&) = default;
};

/// A conjunction of inequalities and congruences.
struct Cell {
    std::vector<Inequality> inequalities;
    std::vector<Congruence> congruences;

    bool unconstrained() const noexcept { return inequalities.empty() && congruences.empty(); }
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Quantifier-free normal form: a finite union of cells over d variables, all congruences
/// sharing one modulus J.
class Qfnf {
public:
    Qfnf() = default;
    /// Normalizes the cells (gcd reduction, residue reduction, rational infeasibility pruning)
    /// and sorts them. Congruences are read modulo `modulus`, which must be positive.
    Qfnf(std::vector<std::string> variables, Int modulus, std::vector<Cell> cells);

    static Qfnf everything(std::vector<std::string> variables);
    static Qfnf nothing(std::vector<std::string> variables);

    std::size_t dimension() const noexcept { return variables_.size(); }
    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const Int& modulus() const noexcept { return modulus_; }
    const std::vector<Cell>& cells() const noexcept { return cells_; }

    bool is_empty_union() const noexcept { return cells_.empty(); }
    bool is_everything() const noexcept { return cells_.size() == 1 && cells_.front().unconstrained(); }
    /// Congruence-only cells, no inequality anywhere.
    bool congruences_only() const noexcept;

    friend bool operator==(const Qfnf&, const Qfnf&) = default;

private:
    friend struct detail::QfnfAccess;

    std::vector<std::string> variables_;
    Int modulus_{1};
    std::vector<Cell> cells_;
};

struct EliminationLimits {
    std::size_t max_cells = 20000;
    std::uint64_t max_coefficient_bits = 1000000;
};

/// Cooper elimination of every quantifier of `f`, innermost first. Variables of the result follow
/// `var_order`, which must contain every free variable of f.
Qfnf eliminate(const Formula& f, const std::vector<std::string>& var_order, const EliminationLimits& limits = {});

bool qf_evaluate(const Qfnf& q, std::span<const std::int64_t> p);
bool qf_evaluate(const Qfnf& q, std::span<const Int> p);

Qfnf complement(const Qfnf& q, const EliminationLimits& limits = {});
Qfnf unite(const Qfnf& a, const Qfnf& b, const EliminationLimits& limits = {});
Qfnf intersect(const Qfnf& a, const Qfnf& b, const EliminationLimits& limits = {});
/// { p + t : p in q }
Qfnf translate(const Qfnf& q, std::span<const std::int64_t> t);
/// Fixes axis `axis` (0-based) to `value`; the result has dimension d - 1.
Qfnf section(const Qfnf& q, std::size_t axis, std::int64_t value);
/// { x in q : x + v not in q }
Qfnf border(const Qfnf& q, std::span<const std::int64_t> v, const EliminationLimits& limits = {});

struct WindowComparison {
    bool equivalent = true;
    /// Counterexample closest to the origin (sup-norm, then lexicographic).
    std::optional<Point> counterexample;
};

WindowComparison equivalent_on_window(const Qfnf& a, const Qfnf& b, const Window& window);

/// "dim=<d> vars=<v1,...> J=<J>" followed by one "cell: ..." line per cell.
std::string to_text(const Qfnf& q);

/// Fast membership test: 64-bit arithmetic when coefficients and the queried point are small,
/// exact bignum arithmetic otherwise.
class QfnfEvaluator {
public:
    explicit QfnfEvaluator(const Qfnf& q);
    bool operator()(std::span<const std::int64_t> p) const;

private:
    struct Row {
        std::vector<std::int64_t> coefficients;
        std::int64_t bound = 0;
    };
    struct FastCell {
        std::vector<Row> inequalities;
        std::vector<Row> congruences;
    };
    Qfnf q_;
    bool fast_ = false;
    std::int64_t modulus_ = 1;
    std::int64_t max_coordinate_ = 0;
    std::vector<FastCell> cells_;
};

}  // namespace defilab
