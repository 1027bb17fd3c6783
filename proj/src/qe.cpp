#include <map>
#include <string>

#include "cell_algebra.hpp"
#include "defilab/error.hpp"
#include "defilab/qfnf.hpp"

namespace defilab {

namespace {

using detail::Budget;
using detail::Cong;
using detail::Dnf;
using detail::Ineq;
using detail::WorkCell;

Comparison flip(Comparison c) {
    switch (c) {
        case Comparison::less: return Comparison::greater_equal;
        case Comparison::less_equal: return Comparison::greater;
        case Comparison::equal: return Comparison::not_equal;
        case Comparison::not_equal: return Comparison::equal;
        case Comparison::greater_equal: return Comparison::less;
        case Comparison::greater: return Comparison::less_equal;
    }
    return c;
}

class Eliminator {
public:
    Eliminator(const Formula& root, const std::vector<std::string>& var_order, const EliminationLimits& limits)
        : budget_(limits) {
        for (std::size_t i = 0; i < var_order.size(); ++i) columns_.emplace(var_order[i], i);
        for (const auto& name : free_vars(root))
            if (!columns_.count(name)) throw Error("variable order does not mention free variable '" + name + "'");
        free_count_ = var_order.size();
        collect_bound(root);
    }

    Dnf run(const Formula& f) { return build(f, false); }

private:
    void collect_bound(const Formula& f) {
        switch (f.kind()) {
            case Formula::Kind::compare:
            case Formula::Kind::congruence: return;
            case Formula::Kind::negation: collect_bound(f.left()); return;
            case Formula::Kind::exists:
            case Formula::Kind::forall:
                columns_.emplace(f.bound().id, columns_.size());
                collect_bound(f.body());
                return;
            default:
                collect_bound(f.left());
                collect_bound(f.right());
        }
    }

    std::size_t width() const { return columns_.size(); }

    std::vector<Int> row(const LinearForm& form) const {
        std::vector<Int> u(width());
        for (const auto& [v, c] : form.coefficients) {
            auto it = columns_.find(v.id);
            if (it == columns_.end()) throw Error("unknown variable '" + v.name + "'");
            u[it->second] += c;
        }
        return u;
    }

    static std::vector<Int> neg(std::vector<Int> u) {
        for (auto& x : u) x = -x;
        return u;
    }

    Dnf atom(const Formula& f, bool negated) {
        if (f.kind() == Formula::Kind::congruence) {
            LinearForm form = linearize(f.lhs_term());
            Dnf d;
            if (f.modulus() == 1) {
                if (!negated) d.push_back(WorkCell{});
                return d;
            }
            WorkCell c;
            c.congs.push_back(Cong{row(form), f.residue() - form.constant, f.modulus()});
            d.push_back(std::move(c));
            detail::simplify(d);
            return negated ? detail::negate(d, budget_) : d;
        }
        LinearForm form = linearize(Term::difference(f.lhs_term(), f.rhs_term()));
        std::vector<Int> a = row(form);
        const Int& k = form.constant;
        Comparison op = negated ? flip(f.comparison()) : f.comparison();
        Dnf d;
        auto single = [&](std::vector<Ineq> ineqs) {
            WorkCell c;
            c.ineqs = std::move(ineqs);
            d.push_back(std::move(c));
        };
        switch (op) {
            case Comparison::greater_equal: single({Ineq{a, -k}}); break;
            case Comparison::greater: single({Ineq{a, 1 - k}}); break;
            case Comparison::less_equal: single({Ineq{neg(a), k}}); break;
            case Comparison::less: single({Ineq{neg(a), k + 1}}); break;
            case Comparison::equal: single({Ineq{a, -k}, Ineq{neg(a), k}}); break;
            case Comparison::not_equal:
                single({Ineq{a, 1 - k}});
                single({Ineq{neg(a), k + 1}});
                break;
        }
        detail::simplify(d);
        return d;
    }

    Dnf build(const Formula& f, bool negated) {
        switch (f.kind()) {
            case Formula::Kind::compare:
            case Formula::Kind::congruence: return atom(f, negated);
            case Formula::Kind::negation: return build(f.left(), !negated);
            case Formula::Kind::conjunction:
            case Formula::Kind::disjunction: {
                Dnf a = build(f.left(), negated);
                bool conj = (f.kind() == Formula::Kind::conjunction) != negated;
                if (conj && a.empty()) return a;
                Dnf b = build(f.right(), negated);
                with_context(f);
                return conj ? detail::conjoin(a, b, budget_) : detail::disjoin(std::move(a), b, budget_);
            }
            case Formula::Kind::implication: {
                // a -> b  ==  !a | b
                Dnf a = build(f.left(), !negated);
                if (negated && a.empty()) return a;
                Dnf b = build(f.right(), negated);
                with_context(f);
                return negated ? detail::conjoin(a, b, budget_) : detail::disjoin(std::move(a), b, budget_);
            }
            case Formula::Kind::equivalence: {
                // (a & b) | (!a & !b), negated: (a & !b) | (!a & b)
                Dnf a = build(f.left(), false);
                Dnf na = build(f.left(), true);
                Dnf b = build(f.right(), negated);
                Dnf nb = build(f.right(), !negated);
                with_context(f);
                Dnf first = detail::conjoin(a, b, budget_);
                Dnf second = detail::conjoin(na, nb, budget_);
                return detail::disjoin(std::move(first), second, budget_);
            }
            case Formula::Kind::exists:
            case Formula::Kind::forall: {
                bool universal = f.kind() == Formula::Kind::forall;
                // ∃x.φ directly; ∀x.φ as ¬∃x.¬φ.
                Dnf body = build(f.body(), universal);
                with_context(f);
                Dnf projected = detail::eliminate_variable(body, columns_.at(f.bound().id), budget_);
                bool negate_result = universal != negated;
                return negate_result ? detail::negate(projected, budget_) : projected;
            }
        }
        throw Error("unsupported formula");
    }

    void with_context(const Formula& f) {
        budget_.set_context([f] { return render(f); });
    }

    Budget budget_;
    std::map<std::string, std::size_t> columns_;
    std::size_t free_count_ = 0;
};

}  // namespace

Qfnf eliminate(const Formula& f, const std::vector<std::string>& var_order, const EliminationLimits& limits) {
    Eliminator e(f, var_order, limits);
    Dnf d = e.run(f);
    return detail::QfnfAccess::build(std::move(d), var_order, 1);
}

}  // namespace defilab
