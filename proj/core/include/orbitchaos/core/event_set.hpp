#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "orbitchaos/core/point.hpp"

namespace orbitchaos {

/// Half-open interval [lo, hi) with 0 <= lo < hi <= 1.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo, double hi);

    bool contains(double v) const noexcept { return lo <= v && v < hi; }
    double length() const noexcept { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// Axis-aligned box, a product of half-open intervals.
struct Box {
    std::vector<Interval> sides;

    bool contains(std::span<const double> coords) const;
    double volume() const noexcept;
    std::size_t dimension() const noexcept { return sides.size(); }
    bool operator==(const Box&) const = default;
};

/// Finite-dimensional cylinder of a product space: a map from constrained
/// factor index (1-based) to a box in that factor; every other factor is free.
struct Cylinder {
    int factor_dim = 1;
    std::map<int, Box> constraints;

    /// Largest constrained factor index (N_A); 0 for the full space.
    int max_index() const noexcept { return constraints.empty() ? 0 : constraints.rbegin()->first; }
    bool operator==(const Cylinder&) const = default;
};

/// The empty event, a member of every space.
struct EmptySet {
    bool operator==(const EmptySet&) const = default;
};

/// Measurable test set from the generating pi-systems: boxes of [0, 1]^d and
/// cylinders of product spaces. Membership is exact.
class EventSet {
public:
    static EventSet box(std::vector<Interval> sides);
    /// Single-component factors.
    static EventSet cylinder(std::map<int, Interval> constraints);
    static EventSet cylinder(int factor_dim, std::map<int, Box> constraints);
    static EventSet empty() { return EventSet(EmptySet{}); }

    bool is_box() const noexcept { return std::holds_alternative<Box>(value_); }
    bool is_cylinder() const noexcept { return std::holds_alternative<Cylinder>(value_); }
    bool is_empty() const noexcept { return std::holds_alternative<EmptySet>(value_); }
    const Box& as_box() const;
    const Cylinder& as_cylinder() const;

    /// Product-space depth a point needs for exact membership (N_A), 0 otherwise.
    int required_depth() const noexcept;

    /// Throws DomainMismatch when the set does not live on x's space and
    /// TruncationUnderflow when a product point is too shallow.
    bool contains(const PhaseSpacePoint& x) const;

    bool operator==(const EventSet&) const = default;

private:
    explicit EventSet(std::variant<Box, Cylinder, EmptySet> v) : value_(std::move(v)) {}
    std::variant<Box, Cylinder, EmptySet> value_;
};

}  // namespace orbitchaos
