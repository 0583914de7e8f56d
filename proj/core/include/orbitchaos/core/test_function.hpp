#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "orbitchaos/core/event_set.hpp"
#include "orbitchaos/core/point.hpp"

namespace orbitchaos {

/// State space a coordinate-based test function is written on. Coordinates
/// are addressed by flat index: (x, y) -> (0, 1) on the square; component c
/// of factor n -> (n - 1) * factor_dim + c on a product space.
struct FunctionDomain {
    SpaceKind kind = SpaceKind::planar;
    int factor_dim = 1;

    static FunctionDomain planar() { return {SpaceKind::planar, 1}; }
    static FunctionDomain product(int factor_dim) { return {SpaceKind::product, factor_dim}; }
    bool operator==(const FunctionDomain&) const = default;
};

struct IndicatorFn {
    EventSet set;
    bool operator==(const IndicatorFn&) const = default;
};

struct Monomial {
    double coefficient = 1.0;
    std::vector<std::pair<int, int>> powers;  ///< (flat coordinate, exponent >= 1), sorted by coordinate
    bool operator==(const Monomial&) const = default;
};

struct PolynomialFn {
    FunctionDomain domain;
    std::vector<Monomial> terms;
    bool operator==(const PolynomialFn&) const = default;
};

enum class TrigKind { cos, sin };

/// cos or sin of 2*pi * <frequency, coords>.
struct TrigFn {
    FunctionDomain domain;
    TrigKind kind = TrigKind::cos;
    std::vector<double> frequency;
    bool operator==(const TrigFn&) const = default;
};

class BoundedTestFunction;

/// Function of the first `arity` factors of a product point.
struct CylinderFn {
    int arity = 1;
    std::shared_ptr<const BoundedTestFunction> inner;
    bool operator==(const CylinderFn& o) const;
};

/// Bounded measurable scalar function with a declared bound M >= sup |g|.
/// Indicators are admitted alongside continuous functions; results obtained
/// with them check the indicator-level intermediate claims of the chaos
/// argument rather than the C_b(E) statement itself.
class BoundedTestFunction {
public:
    static BoundedTestFunction indicator(EventSet set);
    static BoundedTestFunction polynomial(FunctionDomain domain, std::vector<Monomial> terms);
    static BoundedTestFunction constant(FunctionDomain domain, double c);
    static BoundedTestFunction trig(FunctionDomain domain, TrigKind kind, std::vector<double> frequency);
    static BoundedTestFunction cylinder(int arity, BoundedTestFunction inner);

    double bound() const noexcept { return bound_; }
    const auto& variant() const noexcept { return value_; }

    /// Product-space depth needed to evaluate (0 for planar functions).
    int required_depth() const;
    bool accepts(SpaceKind kind, int factor_dim) const noexcept;

    bool operator==(const BoundedTestFunction& o) const { return value_ == o.value_; }

private:
    using Variant = std::variant<IndicatorFn, PolynomialFn, TrigFn, CylinderFn>;
    BoundedTestFunction(Variant v, double bound) : value_(std::move(v)), bound_(bound) {}
    Variant value_;
    double bound_;
};

/// g(x). Throws DomainMismatch when x is not on g's space.
double evaluate(const BoundedTestFunction& g, const PhaseSpacePoint& x);

/// Closed-form integral of g against Lebesgue measure on the square or the
/// Lebesgue product measure on the product space.
double lebesgue_integral(const BoundedTestFunction& g);

}  // namespace orbitchaos
