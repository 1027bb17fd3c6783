#pragma once

// Disjunctive-normal-form machinery shared by quantifier elimination and the QFNF algebra.
// Cells here carry one modulus per congruence; the shared modulus J only appears when a
// Dnf is turned into a Qfnf.

#include <functional>
#include <string>
#include <vector>

#include "defilab/integer.hpp"
#include "defilab/qfnf.hpp"

namespace defilab::detail {

/// u·x >= c
struct Ineq {
    std::vector<Int> u;
    Int c;
};

/// u·x ≡ e (mod m), m >= 2 after normalization
struct Cong {
    std::vector<Int> u;
    Int e;
    Int m;
};

struct WorkCell {
    std::vector<Ineq> ineqs;
    std::vector<Cong> congs;
};

using Dnf = std::vector<WorkCell>;

/// Enforces EliminationLimits; `context` renders the subformula being processed, lazily.
class Budget {
public:
    Budget(const EliminationLimits& limits, std::function<std::string()> context = {})
        : limits_(limits), context_(std::move(context)) {}

    void check(const Dnf& d) const;
    void check_count(std::size_t cells) const;
    void set_context(std::function<std::string()> context) { context_ = std::move(context); }
    std::size_t max_cells() const noexcept { return limits_.max_cells; }

private:
    [[noreturn]] void fail(const std::string& what) const;

    EliminationLimits limits_;
    std::function<std::string()> context_;
};

/// gcd reduction, residue reduction, duplicate and opposite-pair checks. Returns false when the
/// cell is trivially infeasible.
bool normalize(WorkCell& cell);

/// Rational Fourier-Motzkin; returns true when infeasibility could not be shown.
bool rationally_feasible(const std::vector<Ineq>& ineqs);

/// Normalizes, drops infeasible and subsumed cells, removes duplicates and sorts.
void simplify(Dnf& d);

Dnf conjoin(const Dnf& a, const Dnf& b, const Budget& budget);
Dnf disjoin(Dnf a, const Dnf& b, const Budget& budget);
Dnf negate(const Dnf& d, const Budget& budget);

/// Cooper elimination of variable `k` from every cell: ∃x_k. d
Dnf eliminate_variable(const Dnf& d, std::size_t k, const Budget& budget);

Dnf to_dnf(const Qfnf& q);

struct QfnfAccess {
    /// Builds a canonical Qfnf from a Dnf whose columns beyond `variables.size()` are zero.
    static Qfnf build(Dnf d, std::vector<std::string> variables, const Int& min_modulus);
};

}  // namespace defilab::detail
