#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "defilab/integer.hpp"

namespace defilab {

/// A variable occurrence. `name` is what the user wrote and what render() prints;
/// `id` identifies the binding. Free variables have id == name, bound variables get
/// a fresh id containing '#', so they can never collide with a free name.
struct Variable {
    std::string name;
    std::string id;

    static Variable free(std::string name);
    static Variable fresh(std::string name);

    bool is_bound() const noexcept { return id != name; }
    friend bool operator==(const Variable& a, const Variable& b) { return a.id == b.id; }
};

/// Linear term over Z. Products are restricted to constant * variable.
class Term {
public:
    enum class Kind : std::uint8_t { constant, variable, sum, difference, scaled, negation };

    Term();  // the constant 0

    static Term constant(Int value);
    static Term variable(Variable v);
    static Term sum(Term lhs, Term rhs);
    static Term difference(Term lhs, Term rhs);
    static Term scaled(Int coefficient, Variable v);
    /// Folds negation of constants and scaled variables into the literal.
    static Term negate(Term inner);

    Kind kind() const noexcept;
    /// Constant value, or the coefficient of a scaled variable.
    const Int& value() const;
    const Variable& var() const;
    Term lhs() const;
    Term rhs() const;
    Term operand() const;

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

enum class Comparison : std::uint8_t { less, less_equal, equal, not_equal, greater_equal, greater };

std::string_view to_string(Comparison c);

class Formula {
public:
    enum class Kind : std::uint8_t {
        compare,
        congruence,
        negation,
        conjunction,
        disjunction,
        implication,
        equivalence,
        exists,
        forall,
    };

    static Formula compare(Term lhs, Comparison op, Term rhs);
    /// lhs ≡ residue (mod modulus); modulus must be >= 1, residue is reduced into [0, modulus).
    static Formula congruence(Term lhs, Int modulus, Int residue);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula equivalence(Formula a, Formula b);
    static Formula exists(Variable v, Formula body);
    static Formula forall(Variable v, Formula body);

    Kind kind() const noexcept;
    bool is_atom() const noexcept { return kind() == Kind::compare || kind() == Kind::congruence; }
    bool is_quantifier() const noexcept { return kind() == Kind::exists || kind() == Kind::forall; }

    const Term& lhs_term() const;
    const Term& rhs_term() const;
    Comparison comparison() const;
    const Int& modulus() const;
    const Int& residue() const;
    /// Operand of a negation, left operand of a binary connective.
    Formula left() const;
    Formula right() const;
    const Variable& bound() const;
    Formula body() const;

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Linearized term: sum of coefficient * variable (by id, first-appearance order) plus a constant.
struct LinearForm {
    std::vector<std::pair<Variable, Int>> coefficients;
    Int constant;

    Int coefficient_of(const std::string& id) const;
};

LinearForm linearize(const Term& t);

Formula parse(std::string_view text);
/// Strips "#" comment lines, then parses.
Formula parse_file_contents(std::string_view text);

std::string render(const Term& t);
std::string render(const Formula& f);

/// Free variable names in first-appearance order.
std::vector<std::string> free_vars(const Formula& f);

/// Capture-free replacement of the free variable `name` by the constant `value`.
Formula substitute(const Formula& f, const std::string& name, const Int& value);

bool alpha_equivalent(const Formula& a, const Formula& b);

/// Number of nested quantifier levels (0 for quantifier-free formulas).
std::size_t quantifier_depth(const Formula& f);

using Assignment = std::map<std::string, Int>;

/// Truth of a quantifier-free formula; variables are looked up by id (free ids equal names).
bool evaluate_quantifier_free(const Formula& f, const Assignment& values);

}  // namespace defilab
