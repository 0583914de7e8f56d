#include "orbitchaos/core/point.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "orbitchaos/core/error.hpp"

namespace orbitchaos {

double wrap_unit(double v) noexcept {
    double r = v - std::floor(v);
    // v slightly below an integer can round up to exactly 1.
    if (r >= 1.0) r = 0.0;
    return r;
}

std::span<const double> ProductPoint::factor(std::size_t n) const {
    if (n == 0 || n > depth()) {
        throw TruncationUnderflow("product point of depth " + std::to_string(depth()) + " has no factor " +
                                  std::to_string(n));
    }
    const auto fd = static_cast<std::size_t>(factor_dim);
    return std::span<const double>(coords).subspan((n - 1) * fd, fd);
}

PhaseSpacePoint PhaseSpacePoint::planar(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainMismatch("planar point needs finite coordinates");
    return PhaseSpacePoint(PlanarPoint{wrap_unit(x), wrap_unit(y)});
}

PhaseSpacePoint PhaseSpacePoint::product(int factor_dim, std::vector<double> coords) {
    if (factor_dim != 1 && factor_dim != 2) throw DomainMismatch("product factors must have dimension 1 or 2");
    if (coords.empty() || coords.size() % static_cast<std::size_t>(factor_dim) != 0) {
        throw DomainMismatch("product point needs a positive whole number of factors");
    }
    for (double c : coords) {
        if (!(c >= 0.0 && c <= 1.0)) throw DomainMismatch("product coordinate outside [0, 1]");
    }
    return PhaseSpacePoint(ProductPoint{factor_dim, std::move(coords)});
}

PhaseSpacePoint PhaseSpacePoint::sphere(std::vector<double> v) {
    if (v.size() < 2) throw DomainMismatch("sphere points need dimension >= 2");
    const double n = static_cast<double>(v.size());
    // Two passes: the second corrects the rounding left by the first.
    for (int pass = 0; pass < 2; ++pass) {
        const double norm2 = std::transform_reduce(v.begin(), v.end(), v.begin(), 0.0);
        if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw DegenerateSample("cannot project a zero vector onto the sphere");
        const double scale = std::sqrt(n / norm2);
        for (double& c : v) c *= scale;
    }
    return PhaseSpacePoint(SpherePoint{std::move(v)});
}

const PlanarPoint& PhaseSpacePoint::as_planar() const {
    if (const auto* p = std::get_if<PlanarPoint>(&value_)) return *p;
    throw DomainMismatch("expected a planar point");
}

const ProductPoint& PhaseSpacePoint::as_product() const {
    if (const auto* p = std::get_if<ProductPoint>(&value_)) return *p;
    throw DomainMismatch("expected a product-space point");
}

const SpherePoint& PhaseSpacePoint::as_sphere() const {
    if (const auto* p = std::get_if<SpherePoint>(&value_)) return *p;
    throw DomainMismatch("expected a sphere point");
}

}  // namespace orbitchaos
