#include "defilab/formula.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <set>

#include "defilab/error.hpp"

namespace defilab {

// ---------------------------------------------------------------------------
// Variables

Variable Variable::free(std::string name) {
    Variable v;
    v.id = name;
    v.name = std::move(name);
    return v;
}

Variable Variable::fresh(std::string name) {
    static std::atomic<std::uint64_t> counter{0};
    Variable v;
    v.id = name + "#" + std::to_string(++counter);
    v.name = std::move(name);
    return v;
}

// ---------------------------------------------------------------------------
// Terms

struct Term::Node {
    Kind kind = Kind::constant;
    Int value;
    Variable var;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

Term::Term() : node_(std::make_shared<const Node>()) {}

Term Term::constant(Int value) {
    Node n;
    n.kind = Kind::constant;
    n.value = std::move(value);
    return Term(std::make_shared<const Node>(std::move(n)));
}

Term Term::variable(Variable v) {
    Node n;
    n.kind = Kind::variable;
    n.var = std::move(v);
    return Term(std::make_shared<const Node>(std::move(n)));
}

Term Term::sum(Term lhs, Term rhs) {
    Node n;
    n.kind = Kind::sum;
    n.lhs = std::move(lhs.node_);
    n.rhs = std::move(rhs.node_);
    return Term(std::make_shared<const Node>(std::move(n)));
}

Term Term::difference(Term lhs, Term rhs) {
    Node n;
    n.kind = Kind::difference;
    n.lhs = std::move(lhs.node_);
    n.rhs = std::move(rhs.node_);
    return Term(std::make_shared<const Node>(std::move(n)));
}

Term Term::scaled(Int coefficient, Variable v) {
    Node n;
    n.kind = Kind::scaled;
    n.value = std::move(coefficient);
    n.var = std::move(v);
    return Term(std::make_shared<const Node>(std::move(n)));
}

Term Term::negate(Term inner) {
    switch (inner.kind()) {
        case Kind::constant:
            return constant(-inner.value());
        case Kind::scaled:
            return scaled(-inner.value(), inner.var());
        default: {
            Node n;
            n.kind = Kind::negation;
            n.lhs = std::move(inner.node_);
            return Term(std::make_shared<const Node>(std::move(n)));
        }
    }
}

Term::Kind Term::kind() const noexcept { return node_->kind; }
const Int& Term::value() const { return node_->value; }
const Variable& Term::var() const { return node_->var; }
Term Term::lhs() const { return Term(node_->lhs); }
Term Term::rhs() const { return Term(node_->rhs); }
Term Term::operand() const { return Term(node_->lhs); }

std::string_view to_string(Comparison c) {
    switch (c) {
        case Comparison::less: return "<";
        case Comparison::less_equal: return "<=";
        case Comparison::equal: return "=";
        case Comparison::not_equal: return "!=";
        case Comparison::greater_equal: return ">=";
        case Comparison::greater: return ">";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Formulas

struct Formula::Node {
    Kind kind = Kind::compare;
    Term lhs;
    Term rhs;
    Comparison op = Comparison::equal;
    Int modulus;
    Int residue;
    Variable bound;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
};

Formula Formula::compare(Term lhs, Comparison op, Term rhs) {
    Node n;
    n.kind = Kind::compare;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    n.op = op;
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::congruence(Term lhs, Int modulus, Int residue) {
    if (modulus < 1) throw Error("congruence modulus must be positive, got " + modulus.str());
    Node n;
    n.kind = Kind::congruence;
    n.lhs = std::move(lhs);
    n.residue = floor_mod(residue, modulus);
    n.modulus = std::move(modulus);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::negation(Formula f) {
    Node n;
    n.kind = Kind::negation;
    n.left = std::move(f.node_);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

namespace {
template <typename NodeT, typename KindT>
std::shared_ptr<const NodeT> binary(KindT kind, std::shared_ptr<const NodeT> a, std::shared_ptr<const NodeT> b) {
    NodeT n;
    n.kind = kind;
    n.left = std::move(a);
    n.right = std::move(b);
    return std::make_shared<const NodeT>(std::move(n));
}
}  // namespace

Formula Formula::conjunction(Formula a, Formula b) {
    return Formula(binary(Kind::conjunction, std::move(a.node_), std::move(b.node_)));
}
Formula Formula::disjunction(Formula a, Formula b) {
    return Formula(binary(Kind::disjunction, std::move(a.node_), std::move(b.node_)));
}
Formula Formula::implication(Formula a, Formula b) {
    return Formula(binary(Kind::implication, std::move(a.node_), std::move(b.node_)));
}
Formula Formula::equivalence(Formula a, Formula b) {
    return Formula(binary(Kind::equivalence, std::move(a.node_), std::move(b.node_)));
}

Formula Formula::exists(Variable v, Formula body) {
    Node n;
    n.kind = Kind::exists;
    n.bound = std::move(v);
    n.left = std::move(body.node_);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::forall(Variable v, Formula body) {
    Node n;
    n.kind = Kind::forall;
    n.bound = std::move(v);
    n.left = std::move(body.node_);
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula::Kind Formula::kind() const noexcept { return node_->kind; }
const Term& Formula::lhs_term() const { return node_->lhs; }
const Term& Formula::rhs_term() const { return node_->rhs; }
Comparison Formula::comparison() const { return node_->op; }
const Int& Formula::modulus() const { return node_->modulus; }
const Int& Formula::residue() const { return node_->residue; }
Formula Formula::left() const { return Formula(node_->left); }
Formula Formula::right() const { return Formula(node_->right); }
const Variable& Formula::bound() const { return node_->bound; }
Formula Formula::body() const { return Formula(node_->left); }

// ---------------------------------------------------------------------------
// Linearization

Int LinearForm::coefficient_of(const std::string& id) const {
    for (const auto& [v, c] : coefficients)
        if (v.id == id) return c;
    return 0;
}

namespace {

void accumulate(const Term& t, const Int& sign, LinearForm& out) {
    auto add = [&](const Variable& v, const Int& c) {
        for (auto& [var, coeff] : out.coefficients) {
            if (var.id == v.id) {
                coeff += c;
                return;
            }
        }
        out.coefficients.emplace_back(v, c);
    };
    switch (t.kind()) {
        case Term::Kind::constant: out.constant += sign * t.value(); break;
        case Term::Kind::variable: add(t.var(), sign); break;
        case Term::Kind::scaled: add(t.var(), sign * t.value()); break;
        case Term::Kind::sum:
            accumulate(t.lhs(), sign, out);
            accumulate(t.rhs(), sign, out);
            break;
        case Term::Kind::difference:
            accumulate(t.lhs(), sign, out);
            accumulate(t.rhs(), -sign, out);
            break;
        case Term::Kind::negation: accumulate(t.operand(), -sign, out); break;
    }
}

}  // namespace

LinearForm linearize(const Term& t) {
    LinearForm out;
    accumulate(t, Int(1), out);
    std::erase_if(out.coefficients, [](const auto& vc) { return vc.second == 0; });
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

// Display names for bound variables, renamed when they would capture a free name
// or shadow an enclosing binder with a different identity.
class Renderer {
public:
    explicit Renderer(const Formula& f) {
        for (const auto& n : free_vars(f)) taken_.insert(n);
    }

    std::string term(const Term& t) const {
        switch (t.kind()) {
            case Term::Kind::constant: return t.value().str();
            case Term::Kind::variable: return name_of(t.var());
            case Term::Kind::scaled: return t.value().str() + "*" + name_of(t.var());
            case Term::Kind::sum: return term(t.lhs()) + " + " + term(t.rhs());
            case Term::Kind::difference: return term(t.lhs()) + " - " + term(t.rhs());
            case Term::Kind::negation: return "-" + term(t.operand());
        }
        return {};
    }

    std::string formula(const Formula& f) {
        switch (f.kind()) {
            case Formula::Kind::compare:
                return term(f.lhs_term()) + " " + std::string(to_string(f.comparison())) + " " + term(f.rhs_term());
            case Formula::Kind::congruence:
                return term(f.lhs_term()) + " % " + f.modulus().str() + " = " + f.residue().str();
            case Formula::Kind::negation: return "!(" + formula(f.left()) + ")";
            case Formula::Kind::conjunction: return bin(f, " & ");
            case Formula::Kind::disjunction: return bin(f, " | ");
            case Formula::Kind::implication: return bin(f, " -> ");
            case Formula::Kind::equivalence: return bin(f, " <-> ");
            case Formula::Kind::exists:
            case Formula::Kind::forall: {
                const auto& v = f.bound();
                std::string display = v.name;
                for (int k = 2; taken_.count(display); ++k) display = v.name + "_" + std::to_string(k);
                taken_.insert(display);
                names_[v.id] = display;
                std::string out = (f.kind() == Formula::Kind::exists ? "E " : "A ") + display + ". (" +
                                  formula(f.body()) + ")";
                names_.erase(v.id);
                taken_.erase(display);
                return out;
            }
        }
        return {};
    }

private:
    std::string bin(const Formula& f, const char* op) {
        return "(" + formula(f.left()) + ")" + op + "(" + formula(f.right()) + ")";
    }

    std::string name_of(const Variable& v) const {
        auto it = names_.find(v.id);
        return it == names_.end() ? v.name : it->second;
    }

    std::set<std::string> taken_;
    std::map<std::string, std::string> names_;
};

}  // namespace

std::string render(const Term& t) {
    return Renderer(Formula::compare(t, Comparison::equal, t)).term(t);
}

std::string render(const Formula& f) {
    return Renderer(f).formula(f);
}

// ---------------------------------------------------------------------------
// Structural queries

namespace {

void collect_term_vars(const Term& t, std::vector<std::string>& out) {
    switch (t.kind()) {
        case Term::Kind::constant: return;
        case Term::Kind::variable:
        case Term::Kind::scaled:
            if (!t.var().is_bound() && std::find(out.begin(), out.end(), t.var().name) == out.end())
                out.push_back(t.var().name);
            return;
        case Term::Kind::sum:
        case Term::Kind::difference:
            collect_term_vars(t.lhs(), out);
            collect_term_vars(t.rhs(), out);
            return;
        case Term::Kind::negation: collect_term_vars(t.operand(), out); return;
    }
}

void collect_vars(const Formula& f, std::vector<std::string>& out) {
    switch (f.kind()) {
        case Formula::Kind::compare:
            collect_term_vars(f.lhs_term(), out);
            collect_term_vars(f.rhs_term(), out);
            return;
        case Formula::Kind::congruence: collect_term_vars(f.lhs_term(), out); return;
        case Formula::Kind::negation: collect_vars(f.left(), out); return;
        case Formula::Kind::exists:
        case Formula::Kind::forall: collect_vars(f.body(), out); return;
        default:
            collect_vars(f.left(), out);
            collect_vars(f.right(), out);
    }
}

Term substitute_term(const Term& t, const std::string& id, const Int& value) {
    switch (t.kind()) {
        case Term::Kind::constant: return t;
        case Term::Kind::variable: return t.var().id == id ? Term::constant(value) : t;
        case Term::Kind::scaled: return t.var().id == id ? Term::constant(t.value() * value) : t;
        case Term::Kind::sum:
            return Term::sum(substitute_term(t.lhs(), id, value), substitute_term(t.rhs(), id, value));
        case Term::Kind::difference:
            return Term::difference(substitute_term(t.lhs(), id, value), substitute_term(t.rhs(), id, value));
        case Term::Kind::negation: return Term::negate(substitute_term(t.operand(), id, value));
    }
    return t;
}

bool terms_alpha_equal(const Term& a, const Term& b, const std::map<std::string, std::string>& bij) {
    if (a.kind() != b.kind()) return false;
    auto same_var = [&](const Variable& x, const Variable& y) {
        auto it = bij.find(x.id);
        if (it != bij.end()) return it->second == y.id;
        return !y.is_bound() && x.id == y.id;
    };
    switch (a.kind()) {
        case Term::Kind::constant: return a.value() == b.value();
        case Term::Kind::variable: return same_var(a.var(), b.var());
        case Term::Kind::scaled: return a.value() == b.value() && same_var(a.var(), b.var());
        case Term::Kind::sum:
        case Term::Kind::difference:
            return terms_alpha_equal(a.lhs(), b.lhs(), bij) && terms_alpha_equal(a.rhs(), b.rhs(), bij);
        case Term::Kind::negation: return terms_alpha_equal(a.operand(), b.operand(), bij);
    }
    return false;
}

bool formulas_alpha_equal(const Formula& a, const Formula& b, std::map<std::string, std::string>& bij) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Formula::Kind::compare:
            return a.comparison() == b.comparison() && terms_alpha_equal(a.lhs_term(), b.lhs_term(), bij) &&
                   terms_alpha_equal(a.rhs_term(), b.rhs_term(), bij);
        case Formula::Kind::congruence:
            return a.modulus() == b.modulus() && a.residue() == b.residue() &&
                   terms_alpha_equal(a.lhs_term(), b.lhs_term(), bij);
        case Formula::Kind::negation: return formulas_alpha_equal(a.left(), b.left(), bij);
        case Formula::Kind::exists:
        case Formula::Kind::forall: {
            auto saved = bij.find(a.bound().id) == bij.end() ? std::optional<std::string>()
                                                             : std::optional<std::string>(bij[a.bound().id]);
            bij[a.bound().id] = b.bound().id;
            bool eq = formulas_alpha_equal(a.body(), b.body(), bij);
            if (saved) bij[a.bound().id] = *saved;
            else bij.erase(a.bound().id);
            return eq;
        }
        default:
            return formulas_alpha_equal(a.left(), b.left(), bij) && formulas_alpha_equal(a.right(), b.right(), bij);
    }
}

Int eval_term(const Term& t, const Assignment& values) {
    switch (t.kind()) {
        case Term::Kind::constant: return t.value();
        case Term::Kind::variable:
        case Term::Kind::scaled: {
            auto it = values.find(t.var().id);
            if (it == values.end()) throw Error("variable '" + t.var().name + "' has no value");
            return t.kind() == Term::Kind::scaled ? t.value() * it->second : it->second;
        }
        case Term::Kind::sum: return eval_term(t.lhs(), values) + eval_term(t.rhs(), values);
        case Term::Kind::difference: return eval_term(t.lhs(), values) - eval_term(t.rhs(), values);
        case Term::Kind::negation: return -eval_term(t.operand(), values);
    }
    return 0;
}

}  // namespace

std::vector<std::string> free_vars(const Formula& f) {
    std::vector<std::string> out;
    collect_vars(f, out);
    return out;
}

Formula substitute(const Formula& f, const std::string& name, const Int& value) {
    switch (f.kind()) {
        case Formula::Kind::compare:
            return Formula::compare(substitute_term(f.lhs_term(), name, value), f.comparison(),
                                    substitute_term(f.rhs_term(), name, value));
        case Formula::Kind::congruence:
            return Formula::congruence(substitute_term(f.lhs_term(), name, value), f.modulus(), f.residue());
        case Formula::Kind::negation: return Formula::negation(substitute(f.left(), name, value));
        case Formula::Kind::conjunction:
            return Formula::conjunction(substitute(f.left(), name, value), substitute(f.right(), name, value));
        case Formula::Kind::disjunction:
            return Formula::disjunction(substitute(f.left(), name, value), substitute(f.right(), name, value));
        case Formula::Kind::implication:
            return Formula::implication(substitute(f.left(), name, value), substitute(f.right(), name, value));
        case Formula::Kind::equivalence:
            return Formula::equivalence(substitute(f.left(), name, value), substitute(f.right(), name, value));
        case Formula::Kind::exists: return Formula::exists(f.bound(), substitute(f.body(), name, value));
        case Formula::Kind::forall: return Formula::forall(f.bound(), substitute(f.body(), name, value));
    }
    return f;
}

bool alpha_equivalent(const Formula& a, const Formula& b) {
    std::map<std::string, std::string> bij;
    return formulas_alpha_equal(a, b, bij);
}

std::size_t quantifier_depth(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::compare:
        case Formula::Kind::congruence: return 0;
        case Formula::Kind::negation: return quantifier_depth(f.left());
        case Formula::Kind::exists:
        case Formula::Kind::forall: return 1 + quantifier_depth(f.body());
        default: return std::max(quantifier_depth(f.left()), quantifier_depth(f.right()));
    }
}

bool evaluate_quantifier_free(const Formula& f, const Assignment& values) {
    switch (f.kind()) {
        case Formula::Kind::compare: {
            Int l = eval_term(f.lhs_term(), values);
            Int r = eval_term(f.rhs_term(), values);
            switch (f.comparison()) {
                case Comparison::less: return l < r;
                case Comparison::less_equal: return l <= r;
                case Comparison::equal: return l == r;
                case Comparison::not_equal: return l != r;
                case Comparison::greater_equal: return l >= r;
                case Comparison::greater: return l > r;
            }
            return false;
        }
        case Formula::Kind::congruence:
            return floor_mod(eval_term(f.lhs_term(), values), f.modulus()) == f.residue();
        case Formula::Kind::negation: return !evaluate_quantifier_free(f.left(), values);
        case Formula::Kind::conjunction:
            return evaluate_quantifier_free(f.left(), values) && evaluate_quantifier_free(f.right(), values);
        case Formula::Kind::disjunction:
            return evaluate_quantifier_free(f.left(), values) || evaluate_quantifier_free(f.right(), values);
        case Formula::Kind::implication:
            return !evaluate_quantifier_free(f.left(), values) || evaluate_quantifier_free(f.right(), values);
        case Formula::Kind::equivalence:
            return evaluate_quantifier_free(f.left(), values) == evaluate_quantifier_free(f.right(), values);
        case Formula::Kind::exists:
        case Formula::Kind::forall:
            throw Error("evaluate_quantifier_free: formula has a quantifier over '" + f.bound().name + "'");
    }
    return false;
}

}  // namespace defilab
