#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "defilab/complexity.hpp"
#include "defilab/geometry.hpp"
#include "defilab/grid.hpp"
#include "defilab/point_set.hpp"
#include "defilab/qfnf.hpp"

namespace defilab {

using Rational = boost::rational<std::int64_t>;

/// Nonzero period candidate.
class PeriodVector {
public:
    /// Throws Error for the zero vector.
    explicit PeriodVector(Point v);

    const Point& vector() const noexcept { return v_; }
    std::int64_t norm() const noexcept { return norm_; }
    std::size_t dimension() const noexcept { return v_.size(); }

    friend bool operator==(const PeriodVector&, const PeriodVector&) = default;

private:
    Point v_;
    std::int64_t norm_;
};

/// Orders by sup-norm, then lexicographically.
bool period_less(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// Every nonzero vector of dimension d with sup-norm in [lo, hi], in period_less order.
std::vector<Point> vectors_by_norm(std::size_t d, std::int64_t lo, std::int64_t hi);

struct LocalPeriodicityCert {
    std::vector<Point> V;
    std::int64_t K = 1;
    std::int64_t L = 0;

    /// Throws InvalidCertificate unless V is nonempty, has no zero vector, and K > sum of norms.
    void validate() const;
};

/// {"V": [[1,1],[1,0]], "K": 3, "L": 4}
std::string to_json(const LocalPeriodicityCert& cert);
LocalPeriodicityCert cert_from_json(std::string_view text);

/// B(x, K) = { y : ||x - y|| < K }, the cube of radius K - 1 around x.
Window neighborhood(std::span<const std::int64_t> x, std::int64_t K);

/// For all m with m, m + v in B(x, K): m in s <=> m + v in s.
bool is_v_periodic_inside(const PointSet& s, std::span<const std::int64_t> v, std::span<const std::int64_t> x,
                          std::int64_t K);
/// Same check on a raster; throws GeometryError when B(x, K) leaves the grid.
bool is_v_periodic_inside(const Grid& g, std::span<const std::int64_t> v, std::span<const std::int64_t> x,
                          std::int64_t K);

/// Smallest period inside B(x, K) in (norm, lex) order among norms 1..max_norm
/// (default 2K - 2, the largest norm for which the condition is not vacuous).
std::optional<Point> minimal_local_period(const Grid& g, std::span<const std::int64_t> x, std::int64_t K,
                                          std::optional<std::int64_t> max_norm = {});
std::optional<Point> minimal_local_period(const PointSet& s, std::span<const std::int64_t> x, std::int64_t K,
                                          std::optional<std::int64_t> max_norm = {});

struct PeriodSearchParams {
    Rational C{1};
    std::int64_t n = 2;
    std::int64_t m = 1;
    std::int64_t m0 = 0;

    /// Throws PreconditionError unless m < n and m^d - C n^(d-1) >= 1.
    void validate(std::size_t d) const;
};

/// Distinct n-blocks among the anchors z + y, y in [-m+1, 0]^d.
std::uint64_t touched_block_count(const Grid& g, std::span<const std::int64_t> z, std::int64_t n, std::int64_t m);

/// Pigeonhole period finder: looks for two anchors z + y, z + y' (y, y' in [-m+1, 0]^d) with equal
/// n-blocks and returns v = y - y' (the smaller of ±v in (norm, lex) order) once
/// M_{z-v,n-m} = M_{z,n-m} = M_{z+v,n-m} has been re-checked bitwise. Returns nothing when all
/// touched blocks are distinct.
std::optional<Point> find_local_period(const Grid& g, std::span<const std::int64_t> z, const PeriodSearchParams& params);

/// Triple block equality M_{z-v,k} = M_{z,k} = M_{z+v,k}.
bool triple_equality(const Grid& g, std::span<const std::int64_t> z, std::span<const std::int64_t> v, std::int64_t k);

/// (2C)^(1/d) (5K)^((d-1)/d)
double period_norm_bound(double C, std::int64_t K, std::size_t d);
double period_norm_bound(const Rational& C, std::int64_t K, std::size_t d);

struct VerificationReport {
    bool holds = true;
    /// First failing point in lexicographic order.
    std::optional<Point> violation;
    std::uint64_t checked = 0;
};

/// Checks every x in w with ||x|| >= L against some v in V inside B(x, K).
VerificationReport verify_local_periodicity(const PointSet& s, const LocalPeriodicityCert& cert, const Window& w);

/// Smallest L (at most the window's largest norm) such that every x in w with ||x|| >= L has a local
/// period from V inside B(x, K); nothing if even the outermost points fail. No K > sum ||v|| requirement.
std::optional<std::int64_t> muchnik_sample(const PointSet& s, std::int64_t K, const std::vector<Point>& V,
                                           const Window& w);

struct MorseHedlundVerdict {
    /// Smallest n <= n_max with p(n) <= n.
    std::optional<std::int64_t> certificate;
    /// Factor counts p(1), ..., p(n_max) of the finite word.
    std::vector<std::uint64_t> factor_counts;
    /// With a certificate: a period <= n and the index (in word coordinates) from which it holds.
    std::optional<std::int64_t> period;
    std::optional<std::int64_t> preperiod_start;
};

/// `word` is read as w[start], w[start + 1], ...; needs length >= 2 n_max.
MorseHedlundVerdict mh_classify_1d(const std::vector<bool>& word, std::int64_t start, std::int64_t n_max);
std::vector<bool> word_from_string(std::string_view bits);

/// Distinct-block certificate in d = 2: re-verifies that v is a period inside B(x, n) with ||v|| < n and
/// that no shorter vector is one (PreconditionError otherwise), then reports whether the ||v||^2
/// blocks of size 2n + ||v|| anchored at x - n(1,1) - z, z in [0, ||v|| - 1]^2, are pairwise distinct.
bool distinct_block_cert(const Grid& g, std::span<const std::int64_t> x, std::int64_t n,
                         std::span<const std::int64_t> v);

/// Every v with 1 <= ||v|| <= max_norm such that membership agrees at all in-grid pairs (x, x + v).
std::vector<Point> global_period_search(const Grid& g, std::int64_t max_norm);

/// Smallest R such that every ball of radius R inside w contains every t-block seen in w.
/// Balls span at most half of the window's shortest side.
std::optional<std::int64_t> repetitivity_probe(const PointSet& s, std::int64_t t, const Window& w);

enum class Verdict : std::uint8_t { consistent_with_definable, not_definable_evidence, inconclusive };

std::string_view to_string(Verdict v);

struct SectionStep {
    /// 1-based axis of the set the section is taken from.
    std::size_t axis = 1;
    std::int64_t c = 0;
};

enum class LevelStatus : std::uint8_t { within, exceeds, inconclusive };

std::string_view to_string(LevelStatus s);

struct LevelReport {
    std::vector<SectionStep> path;
    std::size_t dimension = 0;
    LevelStatus status = LevelStatus::inconclusive;
    ComplexityTable table;
    std::optional<GrowthFit> fit;
    std::string note;
};

struct DefinabilityReport {
    Verdict verdict = Verdict::inconclusive;
    std::vector<LevelReport> levels;
    /// Path of the first failing section (empty path means the whole set failed).
    std::optional<std::vector<SectionStep>> failing_section;
    /// Oracle sections are sampled on a fixed constant range with no guarantee.
    bool heuristic_sections = false;
};

struct ClassifyOptions {
    /// Section recursion depth; defaults to d - 1.
    std::optional<std::size_t> depth;
    /// Clamp for the top-level windows; sections use its projection.
    std::optional<Window> window;
    /// Block sizes n_lo..n_hi for every level; by default they depend on the level.
    std::optional<std::int64_t> n_lo;
    std::optional<std::int64_t> n_hi;
    /// Sections examined per level; when more candidates exist, `seed` picks which.
    std::size_t max_sections = 48;
    std::uint64_t seed = 0;
    EliminationLimits limits;
    CountOptions count;
};

DefinabilityReport classify_definability(const PointSet& s, const ClassifyOptions& options = {});

std::string to_json(const DefinabilityReport& report);

}  // namespace defilab
