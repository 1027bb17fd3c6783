#include "defilab/periodicity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "defilab/error.hpp"
#include "defilab/raster.hpp"

namespace defilab {

namespace {

bool is_zero(std::span<const std::int64_t> v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

Point add(std::span<const std::int64_t> a, std::span<const std::int64_t> b, std::int64_t scale = 1) {
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + scale * b[i];
    return out;
}

void require_dimension(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got)
        throw DimensionError(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                             std::to_string(expected));
}

void require_inside(const Grid& g, const Window& w, const std::string& what) {
    Window inter;
    if (!g.window().intersect(w, inter) || !(inter == w))
        throw GeometryError(what + " " + w.to_string() + " leaves the grid " + g.window().to_string());
}

/// The pairs (m, m + v) with both ends in `box`: m ranges over the returned window, if any.
bool pair_region(const Window& box, std::span<const std::int64_t> v, Window& out) {
    std::vector<Interval> axes;
    for (std::size_t i = 0; i < box.dimension(); ++i) {
        Interval a = box.axis(i);
        if (v[i] > 0) a.hi -= v[i];
        else a.lo -= v[i];
        if (a.lo > a.hi) return false;
        axes.push_back(a);
    }
    out = Window(std::move(axes));
    return true;
}

bool periodic_in_box(const Grid& g, std::span<const std::int64_t> v, const Window& box) {
    Window region;
    if (!pair_region(box, v, region)) return true;
    bool ok = true;
    Point shifted(v.size());
    // Lexicographic scan with early exit.
    std::vector<Interval> axes = region.axes();
    const std::size_t d = axes.size();
    Point m = region.low_corner();
    std::int64_t offset = 0;
    for (std::size_t i = 0; i < d; ++i) offset += v[i] * static_cast<std::int64_t>(g.stride(i));
    while (ok) {
        std::uint64_t idx = g.index_of(m);
        if (g.test(idx) != g.test(static_cast<std::uint64_t>(static_cast<std::int64_t>(idx) + offset))) ok = false;
        std::size_t i = d;
        bool done = true;
        while (i > 0) {
            --i;
            if (m[i] < axes[i].hi) {
                ++m[i];
                done = false;
                break;
            }
            m[i] = axes[i].lo;
        }
        if (done) break;
    }
    return ok;
}

}  // namespace

PeriodVector::PeriodVector(Point v) : v_(std::move(v)), norm_(sup_norm(v_)) {
    if (v_.empty() || norm_ == 0) throw Error("a period vector must be nonzero");
}

bool period_less(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    std::int64_t na = sup_norm(a), nb = sup_norm(b);
    if (na != nb) return na < nb;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<Point> vectors_by_norm(std::size_t d, std::int64_t lo, std::int64_t hi) {
    std::vector<Point> out;
    if (d == 0 || hi < 1) return out;
    lo = std::max<std::int64_t>(lo, 1);
    Window::cube(d, hi).for_each([&](const Point& p) {
        std::int64_t n = sup_norm(p);
        if (n >= lo && n <= hi) out.push_back(p);
    });
    std::stable_sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return period_less(a, b); });
    return out;
}

void LocalPeriodicityCert::validate() const {
    if (V.empty()) throw InvalidCertificate("certificate has an empty period set");
    std::int64_t total = 0;
    for (const auto& v : V) {
        if (is_zero(v)) throw InvalidCertificate("certificate contains the zero vector");
        if (v.size() != V.front().size()) throw InvalidCertificate("certificate vectors differ in dimension");
        total += sup_norm(v);
    }
    if (K <= total)
        throw InvalidCertificate("K = " + std::to_string(K) + " must exceed the sum of the period norms (" +
                                 std::to_string(total) + ")");
    if (L < 0) throw InvalidCertificate("L must be nonnegative");
}

std::string to_json(const LocalPeriodicityCert& cert) {
    nlohmann::ordered_json j;
    j["V"] = cert.V;
    j["K"] = cert.K;
    j["L"] = cert.L;
    return j.dump();
}

LocalPeriodicityCert cert_from_json(std::string_view text) {
    try {
        auto j = nlohmann::json::parse(text);
        LocalPeriodicityCert c;
        c.V = j.at("V").get<std::vector<Point>>();
        c.K = j.at("K").get<std::int64_t>();
        c.L = j.value("L", std::int64_t{0});
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed certificate JSON: ") + e.what());
    }
}

Window neighborhood(std::span<const std::int64_t> x, std::int64_t K) {
    if (K < 1) throw Error("neighborhood size K must be positive");
    std::vector<Interval> axes;
    for (auto c : x) axes.push_back({c - K + 1, c + K - 1});
    return Window(std::move(axes));
}

bool is_v_periodic_inside(const Grid& g, std::span<const std::int64_t> v, std::span<const std::int64_t> x,
                          std::int64_t K) {
    require_dimension(g.dimension(), v.size(), "period vector");
    require_dimension(g.dimension(), x.size(), "center");
    Window box = neighborhood(x, K);
    require_inside(g, box, "neighborhood");
    return periodic_in_box(g, v, box);
}

bool is_v_periodic_inside(const PointSet& s, std::span<const std::int64_t> v, std::span<const std::int64_t> x,
                          std::int64_t K) {
    require_dimension(s.dimension(), x.size(), "center");
    Grid g = rasterize(s, neighborhood(x, K));
    return is_v_periodic_inside(g, v, x, K);
}

std::optional<Point> minimal_local_period(const Grid& g, std::span<const std::int64_t> x, std::int64_t K,
                                          std::optional<std::int64_t> max_norm) {
    Window box = neighborhood(x, K);
    require_inside(g, box, "neighborhood");
    for (const auto& v : vectors_by_norm(g.dimension(), 1, max_norm.value_or(2 * K - 2)))
        if (periodic_in_box(g, v, box)) return v;
    return std::nullopt;
}

std::optional<Point> minimal_local_period(const PointSet& s, std::span<const std::int64_t> x, std::int64_t K,
                                          std::optional<std::int64_t> max_norm) {
    require_dimension(s.dimension(), x.size(), "center");
    Grid g = rasterize(s, neighborhood(x, K));
    return minimal_local_period(g, x, K, max_norm);
}

// ---------------------------------------------------------------------------

void PeriodSearchParams::validate(std::size_t d) const {
    if (C <= 0) throw PreconditionError("C must be positive");
    if (n < 1 || m < 1) throw PreconditionError("n and m must be positive");
    if (m >= n) throw PreconditionError("m must be smaller than n");
    if (m0 < 0) throw PreconditionError("m0 must be nonnegative");
    // m^d - C n^(d-1) >= 1 with C = p/q:  q m^d - p n^(d-1) >= q
    Int md = 1, nd = 1;
    for (std::size_t i = 0; i < d; ++i) md *= m;
    for (std::size_t i = 0; i + 1 < d; ++i) nd *= n;
    if (Int(C.denominator()) * md - Int(C.numerator()) * nd < Int(C.denominator()))
        throw PreconditionError("m^d - C n^(d-1) >= 1 fails for m = " + std::to_string(m) +
                                ", n = " + std::to_string(n));
}

namespace {

Window touched_region(std::span<const std::int64_t> z, std::int64_t n, std::int64_t m) {
    std::vector<Interval> axes;
    for (auto c : z) axes.push_back({c - m + 1, c + n - 1});
    return Window(std::move(axes));
}

struct BlockKeyHash {
    std::size_t operator()(const Block& b) const noexcept { return static_cast<std::size_t>(b.hash_low()); }
};

}  // namespace

std::uint64_t touched_block_count(const Grid& g, std::span<const std::int64_t> z, std::int64_t n, std::int64_t m) {
    require_dimension(g.dimension(), z.size(), "anchor");
    require_inside(g, touched_region(z, n, m), "touched region");
    std::unordered_map<Block, int, BlockKeyHash> seen;
    Window::cube(z.size(), -m + 1, 0).for_each([&](const Point& y) { seen.emplace(block_at(g, add(z, y), n), 0); });
    return seen.size();
}

bool triple_equality(const Grid& g, std::span<const std::int64_t> z, std::span<const std::int64_t> v, std::int64_t k) {
    Block mid = block_at(g, z, k);
    return block_at(g, add(z, v, -1), k) == mid && block_at(g, add(z, v), k) == mid;
}

std::optional<Point> find_local_period(const Grid& g, std::span<const std::int64_t> z, const PeriodSearchParams& params) {
    const std::size_t d = g.dimension();
    require_dimension(d, z.size(), "anchor");
    params.validate(d);
    if (sup_norm(z) < params.m0 + params.m)
        throw PreconditionError("||z|| = " + std::to_string(sup_norm(z)) + " is below m0 + m = " +
                                std::to_string(params.m0 + params.m));
    require_inside(g, touched_region(z, params.n, params.m), "touched region");

    std::unordered_map<Block, std::vector<Point>, BlockKeyHash> groups;
    Window::cube(d, -params.m + 1, 0).for_each([&](const Point& y) {
        groups[block_at(g, add(z, y), params.n)].push_back(y);
    });
    std::vector<Point> candidates;
    for (const auto& [block, ys] : groups) {
        for (std::size_t a = 0; a < ys.size(); ++a) {
            for (std::size_t b = a + 1; b < ys.size(); ++b) {
                Point v = add(ys[a], ys[b], -1);
                Point minus = add(Point(d, 0), v, -1);
                candidates.push_back(period_less(v, minus) ? v : minus);
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Point& a, const Point& b) { return period_less(a, b); });
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto& v : candidates)
        if (sup_norm(v) <= params.m && triple_equality(g, z, v, params.n - params.m)) return v;
    return std::nullopt;
}

double period_norm_bound(double C, std::int64_t K, std::size_t d) {
    if (!(C > 0) || K < 1 || d < 1) throw Error("period_norm_bound needs C > 0, K >= 1 and d >= 1");
    const double dd = static_cast<double>(d);
    return std::pow(2.0 * C, 1.0 / dd) * std::pow(5.0 * static_cast<double>(K), (dd - 1.0) / dd);
}

double period_norm_bound(const Rational& C, std::int64_t K, std::size_t d) {
    return period_norm_bound(boost::rational_cast<double>(C), K, d);
}

// ---------------------------------------------------------------------------

namespace {

/// Whether some v in V is a period inside B(x, K); the grid must contain B(x, K).
bool some_period(const Grid& g, const std::vector<Point>& V, std::span<const std::int64_t> x, std::int64_t K) {
    Window box = neighborhood(x, K);
    for (const auto& v : V)
        if (periodic_in_box(g, v, box)) return true;
    return false;
}

}  // namespace

VerificationReport verify_local_periodicity(const PointSet& s, const LocalPeriodicityCert& cert, const Window& w) {
    cert.validate();
    require_dimension(s.dimension(), w.dimension(), "window");
    require_dimension(s.dimension(), cert.V.front().size(), "certificate");
    Grid g = rasterize(s, w.expanded(cert.K - 1));
    VerificationReport report;
    w.for_each([&](const Point& x) {
        if (!report.holds || sup_norm(x) < cert.L) return;
        ++report.checked;
        if (!some_period(g, cert.V, x, cert.K)) {
            report.holds = false;
            report.violation = x;
        }
    });
    return report;
}

std::optional<std::int64_t> muchnik_sample(const PointSet& s, std::int64_t K, const std::vector<Point>& V,
                                           const Window& w) {
    require_dimension(s.dimension(), w.dimension(), "window");
    if (K < 1) throw Error("K must be positive");
    for (const auto& v : V) require_dimension(s.dimension(), v.size(), "period vector");
    Grid g = rasterize(s, w.expanded(K - 1));
    std::int64_t worst = -1;
    w.for_each([&](const Point& x) {
        std::int64_t n = sup_norm(x);
        if (n <= worst) return;
        if (!some_period(g, V, x, K)) worst = n;
    });
    std::int64_t L = worst + 1;
    if (L > w.max_norm()) return std::nullopt;
    return L;
}

// ---------------------------------------------------------------------------

std::vector<bool> word_from_string(std::string_view bits) {
    std::vector<bool> w;
    for (char c : bits) {
        if (c == '0') w.push_back(false);
        else if (c == '1') w.push_back(true);
        else if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
        else throw Error("word must consist of 0 and 1");
    }
    return w;
}

MorseHedlundVerdict mh_classify_1d(const std::vector<bool>& word, std::int64_t start, std::int64_t n_max) {
    if (n_max < 1) throw Error("n_max must be positive");
    const auto len = static_cast<std::int64_t>(word.size());
    if (len < 2 * n_max)
        throw PreconditionError("word of length " + std::to_string(len) + " is shorter than 2 n_max = " +
                                std::to_string(2 * n_max));
    MorseHedlundVerdict verdict;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        std::set<std::vector<bool>> factors;
        for (std::int64_t i = 0; i + n <= len; ++i) factors.emplace(word.begin() + i, word.begin() + i + n);
        verdict.factor_counts.push_back(factors.size());
        if (!verdict.certificate && static_cast<std::int64_t>(factors.size()) <= n) verdict.certificate = n;
    }
    if (verdict.certificate) {
        // Period <= n with the earliest start from which w[i] = w[i + P] holds to the end.
        std::int64_t best_start = len;
        for (std::int64_t P = 1; P <= *verdict.certificate; ++P) {
            std::int64_t q = len - P;
            while (q > 0 && word[static_cast<std::size_t>(q - 1)] == word[static_cast<std::size_t>(q - 1 + P)]) --q;
            if (q < best_start) {
                best_start = q;
                verdict.period = P;
            }
        }
        verdict.preperiod_start = start + best_start;
    }
    return verdict;
}

// ---------------------------------------------------------------------------

bool distinct_block_cert(const Grid& g, std::span<const std::int64_t> x, std::int64_t n,
                         std::span<const std::int64_t> v) {
    if (g.dimension() != 2) throw DimensionError("distinct_block_cert is stated for d = 2");
    require_dimension(2, x.size(), "center");
    require_dimension(2, v.size(), "period vector");
    if (n < 1) throw Error("n must be positive");
    const std::int64_t nv = sup_norm(v);
    if (nv == 0) throw PreconditionError("the period vector must be nonzero");
    Window box = neighborhood(x, n);
    require_inside(g, box, "neighborhood");
    const std::int64_t size = 2 * n + nv;
    std::vector<Interval> axes;
    for (auto c : x) axes.push_back({c - n - (nv - 1), c - n + size - 1});
    require_inside(g, Window(std::move(axes)), "block family");

    if (nv >= n) throw PreconditionError("||v|| = " + std::to_string(nv) + " must be smaller than n");
    if (!periodic_in_box(g, v, box))
        throw PreconditionError("v = " + format_point(v) + " is not a period inside B(x, n)");
    for (const auto& w : vectors_by_norm(2, 1, nv - 1))
        if (periodic_in_box(g, w, box))
            throw PreconditionError("v = " + format_point(v) + " is not minimal: " + format_point(w) +
                                    " is a shorter period");

    std::unordered_map<Block, int, BlockKeyHash> seen;
    bool distinct = true;
    Window::cube(2, 0, nv - 1).for_each([&](const Point& z) {
        Point anchor{x[0] - n - z[0], x[1] - n - z[1]};
        if (!seen.emplace(block_at(g, anchor, size), 0).second) distinct = false;
    });
    return distinct;
}

std::vector<Point> global_period_search(const Grid& g, std::int64_t max_norm) {
    std::vector<Point> out;
    Window all = g.window();
    for (const auto& v : vectors_by_norm(g.dimension(), 1, max_norm))
        if (periodic_in_box(g, v, all)) out.push_back(v);
    return out;
}

std::optional<std::int64_t> repetitivity_probe(const PointSet& s, std::int64_t t, const Window& w) {
    require_dimension(s.dimension(), w.dimension(), "window");
    if (t < 1) throw Error("patch size t must be positive");
    const std::size_t d = w.dimension();
    Grid g = rasterize(s, w);
    // Anchor grid: every anchor whose t-block fits in w, labelled by patch id.
    std::vector<Interval> anchor_axes;
    std::int64_t min_extent = INT64_MAX;
    for (const auto& a : w.axes()) {
        if (a.extent() < t) return std::nullopt;
        anchor_axes.push_back({a.lo, a.hi - t + 1});
        min_extent = std::min(min_extent, a.extent());
    }
    Window anchors(anchor_axes);
    std::vector<std::uint64_t> stride(d, 1);
    for (std::size_t i = d - 1; i > 0; --i) stride[i - 1] = stride[i] * static_cast<std::uint64_t>(anchors.axis(i).extent());
    auto anchor_index = [&](const Point& a) {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < d; ++i) idx += static_cast<std::uint64_t>(a[i] - anchors.axis(i).lo) * stride[i];
        return idx;
    };
    std::unordered_map<Block, std::uint32_t, BlockKeyHash> ids;
    std::vector<std::uint32_t> label(anchors.point_count());
    anchors.for_each([&](const Point& a) {
        auto [it, inserted] = ids.emplace(block_at(g, a, t), static_cast<std::uint32_t>(ids.size()));
        label[anchor_index(a)] = it->second;
    });
    const std::size_t patches = ids.size();

    std::vector<std::uint64_t> stamp(patches, 0);
    std::uint64_t clock = 0;
    for (std::int64_t R = t / 2; 2 * (2 * R + 1) <= min_extent; ++R) {
        Window centers = w.shrunk(R);
        bool all_ok = true;
        centers.for_each([&](const Point& c) {
            if (!all_ok) return;
            ++clock;
            std::size_t found = 0;
            std::vector<Interval> box;
            for (std::size_t i = 0; i < d; ++i) box.push_back({c[i] - R, c[i] + R - t + 1});
            Window(std::move(box)).for_each([&](const Point& a) {
                auto id = label[anchor_index(a)];
                if (stamp[id] != clock) {
                    stamp[id] = clock;
                    ++found;
                }
            });
            if (found < patches) all_ok = false;
        });
        if (all_ok) return R;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent_with_definable: return "consistent-with-definable";
        case Verdict::not_definable_evidence: return "not-definable-evidence";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string_view to_string(LevelStatus s) {
    switch (s) {
        case LevelStatus::within: return "within";
        case LevelStatus::exceeds: return "exceeds";
        case LevelStatus::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

constexpr double kExponentMargin = 0.5;
constexpr double kResidualLimit = 0.1;
constexpr std::size_t kMinimumPoints = 4;
constexpr std::int64_t kLineSizeCap = 256;
constexpr std::int64_t kDefaultExtreme = 64;

class Classifier {
public:
    Classifier(const ClassifyOptions& options, DefinabilityReport& report) : options_(options), report_(report) {}

    /// Returns the status of the subtree rooted at `s`; stops at the first failure.
    LevelStatus visit(const PointSet& s, const std::vector<SectionStep>& path, std::optional<Window> clamp,
                      std::size_t depth) {
        LevelReport level = measure(s, path, clamp);
        LevelStatus status = level.status;
        report_.levels.push_back(std::move(level));
        if (status == LevelStatus::exceeds) {
            report_.failing_section = path;
            return status;
        }
        if (depth == 0 || s.dimension() < 2) return status;
        bool inconclusive = status == LevelStatus::inconclusive;
        for (const auto& [axis, c] : section_plan(s, clamp)) {
            std::optional<Window> sub_clamp;
            if (clamp) sub_clamp = clamp->without_axis(axis);
            std::vector<SectionStep> sub_path = path;
            sub_path.push_back({axis + 1, c});
            std::optional<PointSet> sub;
            try {
                sub = section_of(s, axis, c);
            } catch (const Error& e) {
                LevelReport failed;
                failed.path = sub_path;
                failed.dimension = s.dimension() - 1;
                failed.note = e.what();
                report_.levels.push_back(std::move(failed));
                inconclusive = true;
                continue;
            }
            LevelStatus sub_status = visit(*sub, sub_path, sub_clamp, depth - 1);
            if (sub_status == LevelStatus::exceeds) return sub_status;
            if (sub_status == LevelStatus::inconclusive) inconclusive = true;
        }
        return inconclusive ? LevelStatus::inconclusive : LevelStatus::within;
    }

private:
    /// Block sizes to measure. Oracle lines use doubling sizes so that short periods flatten out.
    std::vector<std::int64_t> block_sizes(const PointSet& s, const std::optional<Window>& clamp) const {
        std::vector<std::int64_t> sizes;
        if (options_.n_lo || options_.n_hi) {
            std::int64_t lo = options_.n_lo.value_or(2);
            for (std::int64_t n = lo; n <= options_.n_hi.value_or(lo + 7); ++n) sizes.push_back(n);
        } else if (s.dimension() == 1 && !s.is_symbolic()) {
            std::int64_t top = clamp ? std::min<std::int64_t>(kLineSizeCap, clamp->axis(0).extent() / 8) : kLineSizeCap;
            for (std::int64_t n = 4; n <= top; n *= 2) sizes.push_back(n);
        } else {
            std::int64_t lo = 2;
            if (s.dimension() == 1) {
                const Int& J = s.qfnf().modulus();
                lo = J > 2 ? (J < 64 ? static_cast<std::int64_t>(J) : 64) : 2;
            }
            for (std::int64_t n = lo; n <= lo + 7; ++n) sizes.push_back(n);
        }
        return sizes;
    }

    LevelReport measure(const PointSet& s, const std::vector<SectionStep>& path, const std::optional<Window>& clamp) {
        LevelReport level;
        level.path = path;
        level.dimension = s.dimension();
        StabilizeOptions opts;
        opts.clamp = clamp;
        opts.count = options_.count;
        try {
            for (std::int64_t n : block_sizes(s, clamp)) {
                // Block sizes the clamp cannot hold end the table.
                if (clamp && std::any_of(clamp->axes().begin(), clamp->axes().end(),
                                         [&](const Interval& a) { return a.extent() < n; }))
                    break;
                level.table.push_back(stabilized_r(s, n, opts));
            }
        } catch (const Error& e) {
            level.note = e.what();
        }
        std::size_t stabilized = 0;
        for (const auto& row : level.table) stabilized += row.stabilized ? 1 : 0;
        const double bound = static_cast<double>(s.dimension()) - 1.0 + kExponentMargin;
        try {
            level.fit = growth_fit(level.table);
        } catch (const Error& e) {
            if (level.note.empty()) level.note = e.what();
        }
        if (level.fit && stabilized >= kMinimumPoints && level.fit->exponent >= bound &&
            level.fit->residual <= kResidualLimit) {
            level.status = LevelStatus::exceeds;
        } else if (level.fit && level.note.empty() && stabilized == level.table.size() && !level.table.empty() &&
                   level.fit->exponent < bound) {
            level.status = LevelStatus::within;
        } else {
            level.status = LevelStatus::inconclusive;
            if (level.note.empty()) level.note = "growth fit not decisive or some counts did not stabilize";
        }
        return level;
    }

    std::vector<std::pair<std::size_t, std::int64_t>> section_plan(const PointSet& s,
                                                                   const std::optional<Window>& clamp) {
        std::vector<std::pair<std::size_t, std::int64_t>> plan;
        for (std::size_t axis = 0; axis < s.dimension(); ++axis) {
            std::set<std::int64_t> constants;
            if (s.is_symbolic()) {
                const Int& J = s.qfnf().modulus();
                std::int64_t span = J < 1024 ? 2 * static_cast<std::int64_t>(J) : 2048;
                for (std::int64_t c = -span; c <= span; ++c) constants.insert(c);
                if (clamp) {
                    constants.insert(clamp->axis(axis).lo);
                    constants.insert(clamp->axis(axis).hi);
                } else {
                    constants.insert(-kDefaultExtreme);
                    constants.insert(kDefaultExtreme);
                }
            } else {
                report_.heuristic_sections = true;
                for (std::int64_t c = -8; c <= 8; ++c) constants.insert(c);
            }
            if (clamp) {
                // Sections outside the clamp say nothing about the clamped region.
                const Interval& a = clamp->axis(axis);
                for (auto it = constants.begin(); it != constants.end();)
                    it = a.contains(*it) ? std::next(it) : constants.erase(it);
            }
            for (auto c : constants) plan.emplace_back(axis, c);
        }
        if (plan.size() > options_.max_sections) {
            std::mt19937_64 rng(options_.seed);
            std::shuffle(plan.begin(), plan.end(), rng);
            plan.resize(options_.max_sections);
            std::sort(plan.begin(), plan.end());
        }
        return plan;
    }

    PointSet section_of(const PointSet& s, std::size_t axis, std::int64_t c) const {
        std::string name = (s.name().empty() ? std::string("set") : s.name()) + "[" + s.variables()[axis] + "=" +
                           std::to_string(c) + "]";
        if (s.is_symbolic()) return PointSet::symbolic(section(s.qfnf(), axis, c), name, s.recurrence_hint());
        PointSet parent = s;
        return PointSet::oracle(
            s.dimension() - 1, name,
            [parent, axis, c](std::span<const std::int64_t> p) {
                Point full(p.begin(), p.end());
                full.insert(full.begin() + static_cast<std::ptrdiff_t>(axis), c);
                return parent.contains(full);
            },
            s.recurrence_hint());
    }

    const ClassifyOptions& options_;
    DefinabilityReport& report_;
};

}  // namespace

DefinabilityReport classify_definability(const PointSet& s, const ClassifyOptions& options) {
    if (options.window) require_dimension(s.dimension(), options.window->dimension(), "window");
    DefinabilityReport report;
    Classifier classifier(options, report);
    std::size_t depth = options.depth.value_or(s.dimension() > 0 ? s.dimension() - 1 : 0);
    LevelStatus status = classifier.visit(s, {}, options.window, depth);
    switch (status) {
        case LevelStatus::exceeds: report.verdict = Verdict::not_definable_evidence; break;
        case LevelStatus::within: report.verdict = Verdict::consistent_with_definable; break;
        case LevelStatus::inconclusive: report.verdict = Verdict::inconclusive; break;
    }
    return report;
}

std::string to_json(const DefinabilityReport& report) {
    using nlohmann::ordered_json;
    auto path_json = [](const std::vector<SectionStep>& path) {
        ordered_json p = ordered_json::array();
        for (const auto& step : path) p.push_back(ordered_json{{"axis", step.axis}, {"c", step.c}});
        return p;
    };
    ordered_json j;
    j["verdict"] = std::string(to_string(report.verdict));
    j["heuristic_sections"] = report.heuristic_sections;
    if (report.failing_section) {
        ordered_json f;
        f["path"] = path_json(*report.failing_section);
        if (!report.failing_section->empty()) {
            f["axis"] = report.failing_section->back().axis;
            f["c"] = report.failing_section->back().c;
        }
        for (const auto& level : report.levels) {
            if (level.status == LevelStatus::exceeds && level.fit) {
                f["exponent"] = level.fit->exponent;
                f["residual"] = level.fit->residual;
            }
        }
        j["failing_section"] = f;
    } else {
        j["failing_section"] = nullptr;
    }
    ordered_json levels = ordered_json::array();
    for (const auto& level : report.levels) {
        ordered_json l;
        l["path"] = path_json(level.path);
        l["dimension"] = level.dimension;
        l["status"] = std::string(to_string(level.status));
        l["bound"] = static_cast<double>(level.dimension) - 1.0;
        if (level.fit) {
            l["exponent"] = level.fit->exponent;
            l["residual"] = level.fit->residual;
        } else {
            l["exponent"] = nullptr;
            l["residual"] = nullptr;
        }
        ordered_json rows = ordered_json::array();
        for (const auto& r : level.table)
            rows.push_back(ordered_json{{"n", r.n},
                                        {"count", r.count},
                                        {"stabilized", r.stabilized},
                                        {"window", r.window.to_string()},
                                        {"L", r.escape}});
        l["rows"] = rows;
        if (!level.note.empty()) l["note"] = level.note;
        levels.push_back(l);
    }
    j["levels"] = levels;
    return j.dump(2);
}

}  // namespace defilab
