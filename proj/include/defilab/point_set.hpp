#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defilab/formula.hpp"
#include "defilab/grid.hpp"
#include "defilab/qfnf.hpp"

namespace defilab {

/// Membership procedure of an oracle set. Must be deterministic and safe to call concurrently.
using Membership = std::function<bool(std::span<const std::int64_t>)>;

/// A subset of Z^d backed by a QFNF, a membership procedure, or a finite grid.
class PointSet {
public:
    enum class Backing : std::uint8_t { symbolic, oracle, grid };

    static PointSet symbolic(Qfnf q, std::string name = {}, std::optional<std::int64_t> recurrence_hint = {});
    static PointSet oracle(std::size_t dim, std::string name, Membership member,
                           std::optional<std::int64_t> recurrence_hint = {});
    /// Points outside the grid's window answer `outside`.
    static PointSet from_grid(Grid g, bool outside = false, std::string name = {});

    Backing backing() const noexcept;
    std::size_t dimension() const noexcept;
    const std::string& name() const noexcept;
    /// Axis names: the QFNF variables for symbolic sets, otherwise x, y, z (or x1..xd beyond three axes).
    const std::vector<std::string>& variables() const noexcept;
    /// Radius beyond which the example's far-field behaviour has settled, when known.
    std::optional<std::int64_t> recurrence_hint() const noexcept;

    bool contains(std::span<const std::int64_t> p) const;

    bool is_symbolic() const noexcept { return backing() == Backing::symbolic; }
    /// Throws Error unless the set is symbolic.
    const Qfnf& qfnf() const;
    /// Throws Error unless the set is grid-backed.
    const Grid& grid() const;

private:
    struct Impl;
    explicit PointSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

std::vector<std::string> default_axis_names(std::size_t dim);

/// {base} + N·v_1 + ... + N·v_k
struct LinearComponent {
    Point base;
    std::vector<Point> generators;
};

struct SemiLinearSet {
    std::size_t dimension = 0;
    std::vector<LinearComponent> components;
};

/// One existential nonnegative coefficient per generator; the empty union becomes "0 = 1".
Formula semilinear_to_formula(const SemiLinearSet& sl, const std::vector<std::string>& variables);

// Two-sided Fibonacci word: all 1s at negative indices, the fixed point of 0 -> 01, 1 -> 0 from 0 on.
bool fibonacci_letter(std::int64_t index);

PointSet fibonacci_set(std::size_t dim);
PointSet toeplitz_set();
PointSet example31();
PointSet example31_strict();
PointSet example32();
PointSet singleton_origin(std::size_t dim);
PointSet checkerboard();

std::string_view example31_formula();
std::string_view example31_strict_formula();
std::string_view example32_formula();
/// Hand-written quantifier-free form of ex32: psi1 | psi2 | psi3 over (x, y).
Qfnf example32_psi();

struct ExampleInfo {
    std::string name;
    std::string description;
};

const std::vector<ExampleInfo>& example_registry();
/// Looks up a registry name; the Fibonacci example is two-dimensional. Throws Error for unknown names.
PointSet example(std::string_view name);

}  // namespace defilab
