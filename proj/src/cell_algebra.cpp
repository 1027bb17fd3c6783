#include "cell_algebra.hpp"

#include <algorithm>
#include <map>

#include "defilab/error.hpp"

namespace defilab::detail {

namespace {

using Vec = std::vector<Int>;

int compare_vec(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return -1;
        if (b[i] < a[i]) return 1;
    }
    return 0;
}

int compare_int(const Int& a, const Int& b) {
    return a < b ? -1 : (b < a ? 1 : 0);
}

int compare_ineq(const Ineq& a, const Ineq& b) {
    if (int c = compare_vec(a.u, b.u)) return c;
    return compare_int(a.c, b.c);
}

int compare_cong(const Cong& a, const Cong& b) {
    if (int c = compare_int(a.m, b.m)) return c;
    if (int c = compare_vec(a.u, b.u)) return c;
    return compare_int(a.e, b.e);
}

int compare_cell(const WorkCell& a, const WorkCell& b) {
    std::size_t n = std::min(a.ineqs.size(), b.ineqs.size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = compare_ineq(a.ineqs[i], b.ineqs[i])) return c;
    if (a.ineqs.size() != b.ineqs.size()) return a.ineqs.size() < b.ineqs.size() ? -1 : 1;
    n = std::min(a.congs.size(), b.congs.size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = compare_cong(a.congs[i], b.congs[i])) return c;
    if (a.congs.size() != b.congs.size()) return a.congs.size() < b.congs.size() ? -1 : 1;
    return 0;
}

Int vec_gcd(const Vec& u) {
    Int g = 0;
    for (const auto& x : u) {
        if (x != 0) g = gcd(g, x);
        if (g == 1) break;
    }
    return boost::multiprecision::abs(g);
}

Vec negated(const Vec& u) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = -u[i];
    return out;
}

std::uint64_t bits(const Int& x) {
    return x == 0 ? 0 : boost::multiprecision::msb(boost::multiprecision::abs(x)) + 1;
}

// a ⊆ b when every atom of b is implied syntactically by an atom of a.
bool subsumed_by(const WorkCell& a, const WorkCell& b) {
    if (b.ineqs.size() > a.ineqs.size() || b.congs.size() > a.congs.size()) return false;
    for (const auto& ib : b.ineqs) {
        bool found = false;
        for (const auto& ia : a.ineqs) {
            if (compare_vec(ia.u, ib.u) == 0 && ia.c >= ib.c) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    for (const auto& cb : b.congs) {
        bool found = false;
        for (const auto& ca : a.congs) {
            if (compare_cong(ca, cb) == 0) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

constexpr std::size_t kSubsumptionLimit = 4000;
constexpr std::size_t kFourierMotzkinCap = 400;

}  // namespace

// ---------------------------------------------------------------------------

void Budget::fail(const std::string& what) const {
    throw ResourceLimitError(what, context_ ? context_() : std::string());
}

void Budget::check_count(std::size_t cells) const {
    if (cells > limits_.max_cells)
        fail("cell count " + std::to_string(cells) + " exceeds the cap of " + std::to_string(limits_.max_cells));
}

void Budget::check(const Dnf& d) const {
    check_count(d.size());
    std::uint64_t total = 0;
    for (const auto& cell : d) {
        for (const auto& i : cell.ineqs) {
            for (const auto& x : i.u) total += bits(x);
            total += bits(i.c);
        }
        for (const auto& c : cell.congs) {
            for (const auto& x : c.u) total += bits(x);
            total += bits(c.e) + bits(c.m);
        }
    }
    if (total > limits_.max_coefficient_bits)
        fail("coefficient size " + std::to_string(total) + " bits exceeds the budget of " +
             std::to_string(limits_.max_coefficient_bits));
}

// ---------------------------------------------------------------------------

bool normalize(WorkCell& cell) {
    std::vector<Ineq> ineqs;
    ineqs.reserve(cell.ineqs.size());
    for (auto& in : cell.ineqs) {
        Int g = vec_gcd(in.u);
        if (g == 0) {
            if (in.c > 0) return false;
            continue;
        }
        if (g != 1) {
            for (auto& x : in.u) x /= g;
            in.c = ceil_div(in.c, g);
        }
        ineqs.push_back(std::move(in));
    }
    std::sort(ineqs.begin(), ineqs.end(), [](const Ineq& a, const Ineq& b) { return compare_ineq(a, b) < 0; });
    // Same normal vector: keep the tightest bound (the last after sorting).
    std::vector<Ineq> kept;
    for (auto& in : ineqs) {
        if (!kept.empty() && compare_vec(kept.back().u, in.u) == 0) kept.back() = std::move(in);
        else kept.push_back(std::move(in));
    }
    for (const auto& in : kept) {
        Vec neg = negated(in.u);
        auto it = std::lower_bound(kept.begin(), kept.end(), neg,
                                   [](const Ineq& a, const Vec& v) { return compare_vec(a.u, v) < 0; });
        if (it != kept.end() && compare_vec(it->u, neg) == 0 && in.c + it->c > 0) return false;
    }
    cell.ineqs = std::move(kept);

    std::vector<Cong> congs;
    for (auto& cg : cell.congs) {
        for (auto& x : cg.u) x = floor_mod(x, cg.m);
        cg.e = floor_mod(cg.e, cg.m);
        Int g = cg.m;
        for (const auto& x : cg.u)
            if (x != 0) g = gcd(g, x);
        if (cg.e % g != 0) return false;
        if (g != 1) {
            for (auto& x : cg.u) x /= g;
            cg.e /= g;
            cg.m /= g;
        }
        if (cg.m == 1) continue;
        congs.push_back(std::move(cg));
    }
    std::sort(congs.begin(), congs.end(), [](const Cong& a, const Cong& b) { return compare_cong(a, b) < 0; });
    std::vector<Cong> unique;
    for (auto& cg : congs) {
        if (!unique.empty() && unique.back().m == cg.m && compare_vec(unique.back().u, cg.u) == 0) {
            if (unique.back().e != cg.e) return false;
            continue;
        }
        unique.push_back(std::move(cg));
    }
    cell.congs = std::move(unique);
    return true;
}

bool rationally_feasible(const std::vector<Ineq>& input) {
    if (input.size() < 2) return true;
    std::vector<Ineq> work = input;
    const std::size_t width = work.front().u.size();
    for (std::size_t j = 0; j < width; ++j) {
        std::vector<Ineq> pos, neg, next;
        for (auto& in : work) {
            if (in.u[j] > 0) pos.push_back(std::move(in));
            else if (in.u[j] < 0) neg.push_back(std::move(in));
            else next.push_back(std::move(in));
        }
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                Int fp = -n.u[j];
                Int fn = p.u[j];
                Ineq combo;
                combo.u.resize(width);
                for (std::size_t i = 0; i < width; ++i) combo.u[i] = fp * p.u[i] + fn * n.u[i];
                combo.c = fp * p.c + fn * n.c;
                Int g = vec_gcd(combo.u);
                if (g == 0) {
                    if (combo.c > 0) return false;
                    continue;
                }
                Int gc = gcd(g, combo.c);
                if (gc > 1) {
                    for (auto& x : combo.u) x /= gc;
                    combo.c /= gc;
                }
                next.push_back(std::move(combo));
            }
        }
        std::sort(next.begin(), next.end(), [](const Ineq& a, const Ineq& b) { return compare_ineq(a, b) < 0; });
        std::vector<Ineq> kept;
        for (auto& in : next) {
            if (!kept.empty() && compare_vec(kept.back().u, in.u) == 0) kept.back() = std::move(in);
            else kept.push_back(std::move(in));
        }
        if (kept.size() > kFourierMotzkinCap) return true;
        work = std::move(kept);
    }
    for (const auto& in : work)
        if (in.c > 0) return false;
    return true;
}

void simplify(Dnf& d) {
    Dnf out;
    out.reserve(d.size());
    for (auto& cell : d) {
        if (!normalize(cell)) continue;
        if (!rationally_feasible(cell.ineqs)) continue;
        if (cell.ineqs.empty() && cell.congs.empty()) {
            d.clear();
            d.push_back(WorkCell{});
            return;
        }
        out.push_back(std::move(cell));
    }
    std::sort(out.begin(), out.end(), [](const WorkCell& a, const WorkCell& b) { return compare_cell(a, b) < 0; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const WorkCell& a, const WorkCell& b) { return compare_cell(a, b) == 0; }),
              out.end());
    if (out.size() > 1 && out.size() <= kSubsumptionLimit) {
        // Process smaller cells first: they are the likely supersets.
        std::vector<std::size_t> order(out.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out[a].ineqs.size() + out[a].congs.size() < out[b].ineqs.size() + out[b].congs.size();
        });
        std::vector<bool> dropped(out.size(), false);
        for (std::size_t ai = 0; ai < order.size(); ++ai) {
            std::size_t a = order[ai];
            if (dropped[a]) continue;
            for (std::size_t bi = ai + 1; bi < order.size(); ++bi) {
                std::size_t b = order[bi];
                if (!dropped[b] && subsumed_by(out[b], out[a])) dropped[b] = true;
            }
        }
        Dnf kept;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (!dropped[i]) kept.push_back(std::move(out[i]));
        out = std::move(kept);
    }
    d = std::move(out);
}

Dnf conjoin(const Dnf& a, const Dnf& b, const Budget& budget) {
    Dnf out;
    for (const auto& x : a) {
        for (const auto& y : b) {
            WorkCell c = x;
            c.ineqs.insert(c.ineqs.end(), y.ineqs.begin(), y.ineqs.end());
            c.congs.insert(c.congs.end(), y.congs.begin(), y.congs.end());
            if (!normalize(c)) continue;
            out.push_back(std::move(c));
            budget.check_count(out.size());
        }
    }
    simplify(out);
    budget.check(out);
    return out;
}

Dnf disjoin(Dnf a, const Dnf& b, const Budget& budget) {
    a.insert(a.end(), b.begin(), b.end());
    simplify(a);
    budget.check(a);
    return a;
}

namespace {

Dnf negate_cell(const WorkCell& cell) {
    Dnf alternatives;
    for (const auto& in : cell.ineqs) {
        WorkCell c;
        c.ineqs.push_back(Ineq{negated(in.u), 1 - in.c});
        alternatives.push_back(std::move(c));
    }
    for (const auto& cg : cell.congs) {
        for (Int r = 0; r < cg.m; ++r) {
            if (r == cg.e) continue;
            WorkCell c;
            c.congs.push_back(Cong{cg.u, r, cg.m});
            alternatives.push_back(std::move(c));
        }
    }
    return alternatives;
}

}  // namespace

Dnf negate(const Dnf& d, const Budget& budget) {
    std::vector<const WorkCell*> order;
    for (const auto& c : d) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(), [](const WorkCell* a, const WorkCell* b) {
        return a->ineqs.size() + a->congs.size() < b->ineqs.size() + b->congs.size();
    });
    Dnf result{WorkCell{}};
    for (const WorkCell* cell : order) {
        Dnf alternatives = negate_cell(*cell);
        if (alternatives.empty()) return {};
        Dnf next;
        for (const auto& r : result) {
            // r already excludes the cell: nothing to split.
            WorkCell both = r;
            both.ineqs.insert(both.ineqs.end(), cell->ineqs.begin(), cell->ineqs.end());
            both.congs.insert(both.congs.end(), cell->congs.begin(), cell->congs.end());
            if (!normalize(both) || !rationally_feasible(both.ineqs)) {
                next.push_back(r);
                continue;
            }
            for (const auto& a : alternatives) {
                WorkCell c = r;
                c.ineqs.insert(c.ineqs.end(), a.ineqs.begin(), a.ineqs.end());
                c.congs.insert(c.congs.end(), a.congs.begin(), a.congs.end());
                if (!normalize(c)) continue;
                next.push_back(std::move(c));
                budget.check_count(next.size());
            }
        }
        simplify(next);
        budget.check(next);
        result = std::move(next);
        if (result.empty()) return {};
    }
    return result;
}

// ---------------------------------------------------------------------------
// Cooper elimination on one conjunction.

namespace {

// value = w·x + w0
struct Expr {
    Vec w;
    Int w0;
};

void eliminate_in_cell(const WorkCell& cell, std::size_t k, Dnf& out, const Budget& budget) {
    WorkCell rest;
    std::vector<Ineq> bounds;
    std::vector<Cong> congs;
    for (const auto& in : cell.ineqs) (in.u[k] == 0 ? rest.ineqs : bounds).push_back(in);
    for (const auto& cg : cell.congs) {
        if (floor_mod(cg.u[k], cg.m) == 0) {
            Cong c = cg;
            c.u[k] = 0;
            rest.congs.push_back(std::move(c));
        } else {
            congs.push_back(cg);
        }
    }
    if (bounds.empty() && congs.empty()) {
        out.push_back(rest);
        return;
    }

    // Scale every atom so that x_k appears with coefficient ±lcm; then x' = lcm·x_k has
    // coefficient ±1 and must be divisible by lcm.
    Int scale = 1;
    for (const auto& b : bounds) scale = lcm(scale, b.u[k]);
    for (auto& cg : congs) {
        cg.u[k] = floor_mod(cg.u[k], cg.m);
        scale = lcm(scale, cg.u[k]);
    }
    for (auto& b : bounds) {
        Int f = scale / boost::multiprecision::abs(b.u[k]);
        int sign = b.u[k] > 0 ? 1 : -1;
        for (auto& x : b.u) x *= f;
        b.c *= f;
        b.u[k] = sign;
    }
    for (auto& cg : congs) {
        Int f = scale / cg.u[k];
        for (auto& x : cg.u) x *= f;
        cg.e *= f;
        cg.m *= f;
        cg.u[k] = 1;
    }
    if (scale > 1) {
        Cong divisible;
        divisible.u.assign(cell.ineqs.empty() ? cell.congs.front().u.size() : cell.ineqs.front().u.size(), 0);
        divisible.u[k] = 1;
        divisible.e = 0;
        divisible.m = scale;
        congs.push_back(std::move(divisible));
    }
    Int period = 1;
    for (const auto& cg : congs) period = lcm(period, cg.m);

    std::vector<Expr> lowers, uppers;
    for (const auto& b : bounds) {
        Expr e;
        e.w = b.u;
        e.w[k] = 0;
        if (b.u[k] > 0) {
            // x' + r·x >= c  ⇔  x' >= c - r·x
            for (auto& x : e.w) x = -x;
            e.w0 = b.c;
            lowers.push_back(std::move(e));
        } else {
            // -x' + r·x >= c  ⇔  x' <= r·x - c
            e.w0 = -b.c;
            uppers.push_back(std::move(e));
        }
    }

    std::vector<Expr> witnesses;
    auto add_shifted = [&](const std::vector<Expr>& base, int direction) {
        if (period * base.size() > budget.max_cells())
            budget.check_count(static_cast<std::size_t>(budget.max_cells()) + 1);
        for (const auto& b : base) {
            for (Int j = 0; j < period; ++j) {
                Expr e = b;
                e.w0 += direction * j;
                witnesses.push_back(std::move(e));
            }
        }
    };
    // A lower and an upper bound a constant gap apart pin x' to a short interval: enumerate it.
    const Expr* pinned = nullptr;
    Int gap = 0;
    for (const auto& l : lowers) {
        for (const auto& u : uppers) {
            if (compare_vec(l.w, u.w) != 0) continue;
            Int g = u.w0 - l.w0;
            if (g < 0) return;
            if (!pinned || g < gap) {
                pinned = &l;
                gap = g;
            }
        }
    }
    const std::size_t side = lowers.empty() ? uppers.size() : uppers.empty() ? lowers.size()
                                                             : std::min(lowers.size(), uppers.size());
    if (pinned && (gap < period * side || gap == 0)) {
        if (gap + 1 > budget.max_cells()) budget.check_count(static_cast<std::size_t>(budget.max_cells()) + 1);
        for (Int j = 0; j <= gap; ++j) {
            Expr e = *pinned;
            e.w0 += j;
            witnesses.push_back(std::move(e));
        }
    } else if (!lowers.empty() && (uppers.empty() || lowers.size() <= uppers.size())) {
        add_shifted(lowers, 1);
    } else if (!uppers.empty()) {
        add_shifted(uppers, -1);
    } else {
        std::size_t width = congs.front().u.size();
        add_shifted({Expr{Vec(width, 0), 0}}, 1);
    }

    for (const auto& w : witnesses) {
        WorkCell c = rest;
        for (const auto& b : bounds) {
            Ineq n;
            n.u = b.u;
            n.u[k] = 0;
            const Int& s = b.u[k];
            for (std::size_t i = 0; i < n.u.size(); ++i) n.u[i] += s * w.w[i];
            n.c = b.c - s * w.w0;
            c.ineqs.push_back(std::move(n));
        }
        for (const auto& cg : congs) {
            Cong n;
            n.u = cg.u;
            n.u[k] = 0;
            for (std::size_t i = 0; i < n.u.size(); ++i) n.u[i] += w.w[i];
            n.e = cg.e - w.w0;
            n.m = cg.m;
            c.congs.push_back(std::move(n));
        }
        if (normalize(c)) out.push_back(std::move(c));
    }
    budget.check_count(out.size());
}

}  // namespace

Dnf eliminate_variable(const Dnf& d, std::size_t k, const Budget& budget) {
    Dnf out;
    for (const auto& cell : d) eliminate_in_cell(cell, k, out, budget);
    simplify(out);
    budget.check(out);
    return out;
}

// ---------------------------------------------------------------------------

Dnf to_dnf(const Qfnf& q) {
    Dnf d;
    for (const auto& cell : q.cells()) {
        WorkCell w;
        for (const auto& in : cell.inequalities) w.ineqs.push_back(Ineq{in.coefficients, in.bound});
        for (const auto& cg : cell.congruences) w.congs.push_back(Cong{cg.coefficients, cg.residue, q.modulus()});
        d.push_back(std::move(w));
    }
    return d;
}

Qfnf QfnfAccess::build(Dnf d, std::vector<std::string> variables, const Int& min_modulus) {
    const std::size_t dim = variables.size();
    simplify(d);
    Int modulus = min_modulus < 1 ? Int(1) : min_modulus;
    for (const auto& cell : d)
        for (const auto& cg : cell.congs) modulus = lcm(modulus, cg.m);

    std::vector<Cell> cells;
    for (const auto& w : d) {
        Cell cell;
        bool feasible = true;
        for (const auto& in : w.ineqs) {
            for (std::size_t i = dim; i < in.u.size(); ++i)
                if (in.u[i] != 0) throw Error("internal: inequality mentions an eliminated variable");
            cell.inequalities.push_back(Inequality{Vec(in.u.begin(), in.u.begin() + static_cast<std::ptrdiff_t>(
                                                                                        std::min(dim, in.u.size()))),
                                                   in.c});
        }
        std::map<Vec, Int> by_coefficients;
        for (const auto& cg : w.congs) {
            Int f = modulus / cg.m;
            Vec u(dim);
            for (std::size_t i = 0; i < cg.u.size(); ++i) {
                if (i >= dim) {
                    if (cg.u[i] != 0) throw Error("internal: congruence mentions an eliminated variable");
                    continue;
                }
                u[i] = floor_mod(cg.u[i] * f, modulus);
            }
            Int e = floor_mod(cg.e * f, modulus);
            auto [it, inserted] = by_coefficients.emplace(u, e);
            if (!inserted && it->second != e) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        for (auto& [u, e] : by_coefficients) cell.congruences.push_back(Congruence{u, e});
        cells.push_back(std::move(cell));
    }
    auto cell_less = [](const Cell& a, const Cell& b) {
        WorkCell x, y;
        for (const auto& i : a.inequalities) x.ineqs.push_back(Ineq{i.coefficients, i.bound});
        for (const auto& i : b.inequalities) y.ineqs.push_back(Ineq{i.coefficients, i.bound});
        for (const auto& c : a.congruences) x.congs.push_back(Cong{c.coefficients, c.residue, 0});
        for (const auto& c : b.congruences) y.congs.push_back(Cong{c.coefficients, c.residue, 0});
        return compare_cell(x, y) < 0;
    };
    std::sort(cells.begin(), cells.end(), cell_less);
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (std::any_of(cells.begin(), cells.end(), [](const Cell& c) { return c.unconstrained(); })) {
        cells.clear();
        cells.emplace_back();
    }

    Qfnf q;
    q.variables_ = std::move(variables);
    q.modulus_ = std::move(modulus);
    q.cells_ = std::move(cells);
    return q;
}

}  // namespace defilab::detail
