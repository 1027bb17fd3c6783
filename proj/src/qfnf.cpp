#include "defilab/qfnf.hpp"

#include <algorithm>
#include <sstream>

#include "cell_algebra.hpp"
#include "defilab/error.hpp"

namespace defilab {

namespace {

using detail::Budget;
using detail::Cong;
using detail::Dnf;
using detail::Ineq;
using detail::WorkCell;

Dnf cells_to_dnf(const std::vector<Cell>& cells, const Int& modulus, std::size_t dim) {
    Dnf d;
    for (const auto& cell : cells) {
        WorkCell w;
        for (const auto& in : cell.inequalities) {
            if (in.coefficients.size() != dim) throw DimensionError("inequality has the wrong number of coefficients");
            w.ineqs.push_back(Ineq{in.coefficients, in.bound});
        }
        for (const auto& cg : cell.congruences) {
            if (cg.coefficients.size() != dim) throw DimensionError("congruence has the wrong number of coefficients");
            w.congs.push_back(Cong{cg.coefficients, cg.residue, modulus});
        }
        d.push_back(std::move(w));
    }
    return d;
}

void require_same_space(const Qfnf& a, const Qfnf& b) {
    if (a.variables() != b.variables())
        throw DimensionError("operands must share dimension and variable order");
}

template <typename T>
Int dot(const std::vector<Int>& u, std::span<const T> p) {
    Int s = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != 0) s += u[i] * Int(p[i]);
    return s;
}

template <typename T>
bool evaluate_exact(const Qfnf& q, std::span<const T> p) {
    if (p.size() != q.dimension()) throw DimensionError("point dimension does not match the formula");
    for (const auto& cell : q.cells()) {
        bool ok = true;
        for (const auto& in : cell.inequalities) {
            if (dot(in.coefficients, p) < in.bound) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (const auto& cg : cell.congruences) {
            if (floor_mod(dot(cg.coefficients, p) - cg.residue, q.modulus()) != 0) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

std::string render_row(const std::vector<Int>& u, const std::vector<std::string>& vars) {
    std::string out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::string c = to_string(u[i]);
        if (i > 0 && u[i] >= 0) out += '+';
        out += c;
        out += vars[i];
    }
    if (u.empty()) out = "0";
    return out;
}

constexpr std::int64_t kFastLimit = std::int64_t{1} << 40;

}  // namespace

Qfnf::Qfnf(std::vector<std::string> variables, Int modulus, std::vector<Cell> cells) {
    if (modulus < 1) throw Error("modulus must be positive");
    Dnf d = cells_to_dnf(cells, modulus, variables.size());
    *this = detail::QfnfAccess::build(std::move(d), std::move(variables), modulus);
}

Qfnf Qfnf::everything(std::vector<std::string> variables) {
    return Qfnf(std::move(variables), 1, {Cell{}});
}

Qfnf Qfnf::nothing(std::vector<std::string> variables) {
    return Qfnf(std::move(variables), 1, {});
}

bool Qfnf::congruences_only() const noexcept {
    return std::all_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c.inequalities.empty(); });
}

bool qf_evaluate(const Qfnf& q, std::span<const std::int64_t> p) {
    return evaluate_exact(q, p);
}

bool qf_evaluate(const Qfnf& q, std::span<const Int> p) {
    return evaluate_exact(q, p);
}

Qfnf complement(const Qfnf& q, const EliminationLimits& limits) {
    Budget budget(limits, [] { return std::string("complement"); });
    Dnf d = detail::negate(detail::to_dnf(q), budget);
    return detail::QfnfAccess::build(std::move(d), q.variables(), q.modulus());
}

Qfnf unite(const Qfnf& a, const Qfnf& b, const EliminationLimits& limits) {
    require_same_space(a, b);
    Budget budget(limits, [] { return std::string("union"); });
    Dnf d = detail::disjoin(detail::to_dnf(a), detail::to_dnf(b), budget);
    return detail::QfnfAccess::build(std::move(d), a.variables(), lcm(a.modulus(), b.modulus()));
}

Qfnf intersect(const Qfnf& a, const Qfnf& b, const EliminationLimits& limits) {
    require_same_space(a, b);
    Budget budget(limits, [] { return std::string("intersection"); });
    Dnf d = detail::conjoin(detail::to_dnf(a), detail::to_dnf(b), budget);
    return detail::QfnfAccess::build(std::move(d), a.variables(), lcm(a.modulus(), b.modulus()));
}

Qfnf translate(const Qfnf& q, std::span<const std::int64_t> t) {
    if (t.size() != q.dimension()) throw DimensionError("translation vector has the wrong dimension");
    // p in result  <=>  p - t in q:  u·p >= c + u·t
    Dnf d = detail::to_dnf(q);
    for (auto& cell : d) {
        for (auto& in : cell.ineqs) in.c += dot(in.u, t);
        for (auto& cg : cell.congs) cg.e += dot(cg.u, t);
    }
    return detail::QfnfAccess::build(std::move(d), q.variables(), q.modulus());
}

Qfnf section(const Qfnf& q, std::size_t axis, std::int64_t value) {
    if (axis >= q.dimension()) throw DimensionError("section axis out of range");
    Dnf d = detail::to_dnf(q);
    for (auto& cell : d) {
        for (auto& in : cell.ineqs) {
            in.c -= in.u[axis] * value;
            in.u.erase(in.u.begin() + static_cast<std::ptrdiff_t>(axis));
        }
        for (auto& cg : cell.congs) {
            cg.e -= cg.u[axis] * value;
            cg.u.erase(cg.u.begin() + static_cast<std::ptrdiff_t>(axis));
        }
    }
    std::vector<std::string> vars = q.variables();
    vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(axis));
    return detail::QfnfAccess::build(std::move(d), std::move(vars), q.modulus());
}

Qfnf border(const Qfnf& q, std::span<const std::int64_t> v, const EliminationLimits& limits) {
    if (v.size() != q.dimension()) throw DimensionError("direction has the wrong dimension");
    if (std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; }))
        throw PreconditionError("border direction must be nonzero");
    Point minus(v.begin(), v.end());
    for (auto& x : minus) x = -x;
    return intersect(q, translate(complement(q, limits), minus), limits);
}

WindowComparison equivalent_on_window(const Qfnf& a, const Qfnf& b, const Window& window) {
    if (a.dimension() != b.dimension() || window.dimension() != a.dimension())
        throw DimensionError("operands and window must share dimension");
    QfnfEvaluator ea(a), eb(b);
    WindowComparison result;
    std::int64_t best_norm = 0;
    window.for_each([&](const Point& p) {
        if (ea(p) == eb(p)) return;
        std::int64_t n = sup_norm(p);
        if (!result.counterexample || n < best_norm) {
            result.equivalent = false;
            result.counterexample = p;
            best_norm = n;
        }
    });
    return result;
}

std::string to_text(const Qfnf& q) {
    std::ostringstream out;
    out << "dim=" << q.dimension() << " vars=";
    for (std::size_t i = 0; i < q.variables().size(); ++i) out << (i ? "," : "") << q.variables()[i];
    out << " J=" << q.modulus() << '\n';
    for (const auto& cell : q.cells()) {
        out << "cell:";
        if (cell.unconstrained()) {
            out << " true\n";
            continue;
        }
        bool first = true;
        for (const auto& in : cell.inequalities) {
            out << (first ? " " : " ; ") << render_row(in.coefficients, q.variables()) << ">=" << in.bound;
            first = false;
        }
        for (const auto& cg : cell.congruences) {
            out << (first ? " " : " ; ") << render_row(cg.coefficients, q.variables()) << '=' << cg.residue
                << " (mod " << q.modulus() << ')';
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

QfnfEvaluator::QfnfEvaluator(const Qfnf& q) : q_(q) {
    auto small = [](const Int& x) { return x > -kFastLimit && x < kFastLimit; };
    fast_ = small(q.modulus());
    for (const auto& cell : q.cells()) {
        if (!fast_) break;
        FastCell fc;
        auto convert = [&](const std::vector<Int>& u, const Int& b) {
            Row r;
            for (const auto& x : u) {
                if (!small(x)) fast_ = false;
                r.coefficients.push_back(fast_ ? static_cast<std::int64_t>(x) : 0);
            }
            if (!small(b)) fast_ = false;
            r.bound = fast_ ? static_cast<std::int64_t>(b) : 0;
            return r;
        };
        for (const auto& in : cell.inequalities) fc.inequalities.push_back(convert(in.coefficients, in.bound));
        for (const auto& cg : cell.congruences) fc.congruences.push_back(convert(cg.coefficients, cg.residue));
        cells_.push_back(std::move(fc));
    }
    if (fast_) {
        modulus_ = static_cast<std::int64_t>(q.modulus());
        max_coordinate_ = kFastLimit;
    } else {
        cells_.clear();
    }
}

bool QfnfEvaluator::operator()(std::span<const std::int64_t> p) const {
    if (p.size() != q_.dimension()) throw DimensionError("point dimension does not match the formula");
    bool in_range = fast_;
    for (auto x : p)
        if (x <= -max_coordinate_ || x >= max_coordinate_) in_range = false;
    if (!in_range) return evaluate_exact(q_, p);
    const std::size_t d = p.size();
    for (const auto& cell : cells_) {
        bool ok = true;
        for (const auto& r : cell.inequalities) {
            __int128 s = 0;
            for (std::size_t i = 0; i < d; ++i) s += static_cast<__int128>(r.coefficients[i]) * p[i];
            if (s < r.bound) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (const auto& r : cell.congruences) {
            __int128 s = -static_cast<__int128>(r.bound);
            for (std::size_t i = 0; i < d; ++i) s += static_cast<__int128>(r.coefficients[i]) * p[i];
            if (s % modulus_ != 0) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace defilab
