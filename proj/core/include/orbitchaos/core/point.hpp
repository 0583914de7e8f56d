#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace orbitchaos {

/// Point of the unit square, coordinates reduced mod 1 into [0, 1).
struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Truncated point of a countable product space. Factor n (1-based) occupies
/// coords[(n - 1) * factor_dim, n * factor_dim); factors are either unit
/// intervals (factor_dim 1) or unit squares (factor_dim 2).
struct ProductPoint {
    int factor_dim = 1;
    std::vector<double> coords;

    std::size_t depth() const noexcept { return coords.size() / static_cast<std::size_t>(factor_dim); }
    std::span<const double> factor(std::size_t n) const;
};

/// Point of the Kac sphere of radius sqrt(n).
struct SpherePoint {
    std::vector<double> x;

    std::size_t dimension() const noexcept { return x.size(); }
};

inline bool operator==(const PlanarPoint& a, const PlanarPoint& b) { return a.x == b.x && a.y == b.y; }
inline bool operator==(const ProductPoint& a, const ProductPoint& b) {
    return a.factor_dim == b.factor_dim && a.coords == b.coords;
}
inline bool operator==(const SpherePoint& a, const SpherePoint& b) { return a.x == b.x; }

enum class SpaceKind { planar, product, sphere };

/// A point of one of the supported state spaces. Construction normalizes and
/// validates, so every PhaseSpacePoint satisfies its variant's invariants.
class PhaseSpacePoint {
public:
    /// Reduces both coordinates mod 1.
    static PhaseSpacePoint planar(double x, double y);
    /// Takes coordinates that must already lie in [0, 1]; depth >= 1.
    static PhaseSpacePoint product(int factor_dim, std::vector<double> coords);
    /// Rescales to the radius-sqrt(n) sphere, n = v.size() >= 2.
    static PhaseSpacePoint sphere(std::vector<double> v);

    SpaceKind kind() const noexcept { return static_cast<SpaceKind>(value_.index()); }
    const PlanarPoint& as_planar() const;
    const ProductPoint& as_product() const;
    const SpherePoint& as_sphere() const;

    bool operator==(const PhaseSpacePoint&) const = default;

private:
    explicit PhaseSpacePoint(std::variant<PlanarPoint, ProductPoint, SpherePoint> v) : value_(std::move(v)) {}
    std::variant<PlanarPoint, ProductPoint, SpherePoint> value_;
};

/// Reduces v mod 1 into [0, 1).
double wrap_unit(double v) noexcept;

}  // namespace orbitchaos
