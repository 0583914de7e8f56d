#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "orbitchaos/core/dyadic.hpp"
#include "orbitchaos/core/event_set.hpp"
#include "orbitchaos/core/point.hpp"
#include "orbitchaos/core/random.hpp"
#include "orbitchaos/core/test_function.hpp"

namespace orbitchaos {

enum class SystemKind { baker, cat, product_shift, product_phi, sphere_static };

/// Map applied to every factor before the left shift of a product system.
enum class InnerMap { identity, baker, cat };

enum class BaseMeasure { lebesgue_square, product_phi, lebesgue_product, uniform_sphere };

enum class StationaryLimit { none, lebesgue_square, lebesgue_product };

/// A dynamical system (E, B(E), mu, S): which base measure is sampled, which
/// map is iterated, and what is known about it in closed form.
///
/// Systems
///   baker          unit square, Lebesgue, S(x,y) = (2x, y/2) or (2x-1, y/2+1/2)
///   cat            unit square, Lebesgue, S(x,y) = (x+y, x+2y) mod 1
///   product-shift  product of copies of [0,1] (identity) or [0,1]^2 (baker,
///                  cat) under the Lebesgue product; (S w)_n = T(w_{n+1})
///   product-phi    product of [0,1] under the product of the densities phi_k,
///                  identity inner map; not measure preserving, stationary
///                  limit is the Lebesgue product
///   sphere:n       uniform measure on the Kac sphere, identity map
struct SystemDescriptor {
    SystemKind kind = SystemKind::baker;
    InnerMap inner_map = InnerMap::identity;
    BaseMeasure base_measure = BaseMeasure::lebesgue_square;
    int sphere_dimension = 0;
    bool is_measure_preserving = true;
    StationaryLimit known_stationary_limit = StationaryLimit::lebesgue_square;

    static SystemDescriptor baker();
    static SystemDescriptor cat();
    static SystemDescriptor product_shift(InnerMap inner);
    static SystemDescriptor product_phi();
    static SystemDescriptor sphere_static(int n);

    SpaceKind space() const noexcept;
    /// Dimension of one product factor (1 or 2); 1 for non-product systems.
    int factor_dim() const noexcept;
    FunctionDomain domain() const noexcept { return {space(), factor_dim()}; }
    /// Registry id, e.g. "baker" or "product-shift:cat".
    std::string id() const;

    bool operator==(const SystemDescriptor&) const = default;
};

/// Registry lookup: "baker", "cat", "product-phi", "product-shift:<identity|baker|cat>", "sphere:<n>".
SystemDescriptor make_system(std::string_view id);

/// S^k(x). Planar maps run on the 2^-53 grid in exact integer arithmetic
/// (coordinates are truncated onto the grid first). For product systems the
/// result drops the first k factors and applies the inner map k times to the
/// rest; at least one factor must remain.
PhaseSpacePoint iterate(const SystemDescriptor& sys, const PhaseSpacePoint& x, int k);

/// One draw from the base measure. `depth` is the number of product factors
/// (ignored for other spaces).
PhaseSpacePoint sample(const SystemDescriptor& sys, SampleStream& rng, int depth);
PhaseSpacePoint sample(const SystemDescriptor& sys, std::uint64_t seed, int depth);

/// Orbit x, S x, ..., S^steps x of one base draw; product points carry
/// `arity` factors each. For the baker map every step shifts a fresh random
/// bit into the bottom of x, so the orbit is the exact orbit of a point
/// sampled with 53 + steps binary digits rather than one whose digits run
/// out after 53 steps. The same holds for baker factors of product systems.
std::vector<PhaseSpacePoint> sample_trajectory(const SystemDescriptor& sys, SampleStream& rng, int steps,
                                               int arity = 1);

/// Closed-form base measure of a box (planar) or cylinder (product).
/// Throws UnsupportedSet for sphere systems.
double base_measure_of_box(const SystemDescriptor& sys, const EventSet& set);

/// Exact S^-k A for the baker map at resolution p + k <= 30.
DyadicRect baker_preimage(const DyadicRect& set, int k);

namespace phi_density {

/// Distribution function of phi_k, k >= 1.
double cdf(int k, double x) noexcept;
/// Inverse distribution function on [0, 1).
double inverse_cdf(int k, double u) noexcept;
/// mu_k([lo, hi)).
double mass(int k, const Interval& iv) noexcept;
/// phi_k(x), the density itself.
double density(int k, double x) noexcept;

}  // namespace phi_density

}  // namespace orbitchaos
