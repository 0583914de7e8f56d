#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orbitchaos/core/estimate.hpp"
#include "orbitchaos/core/event_set.hpp"
#include "orbitchaos/core/test_function.hpp"
#include "orbitchaos/dynamics/system.hpp"
#include "orbitchaos/mixing/mixing.hpp"

namespace orbitchaos {

inline const std::vector<int> kDefaultNGrid{4, 8, 16, 32, 64, 128};

/// (S^1 x, ..., S^n x) for one base draw x, optionally listed in the order
/// of a uniformly random permutation sigma: values[i] = S^(order[i]) x.
struct OrbitTuple {
    std::vector<PhaseSpacePoint> values;
    std::vector<int> order;  ///< exponents 1..n in listing order

    std::size_t size() const noexcept { return values.size(); }
};

/// Tuple of the base draw made by `rng`. The permutation, when requested, is
/// drawn from a stream derived from the same rng after the orbit.
OrbitTuple sample_orbit_tuple(const SystemDescriptor& sys, SampleStream& rng, int n, bool permuted, int arity = 1);
OrbitTuple sample_orbit_tuple(const SystemDescriptor& sys, int n, std::uint64_t seed, bool permuted, int arity = 1);
/// Unpermuted tuple of a given base point, via iterate().
OrbitTuple orbit_tuple_of(const SystemDescriptor& sys, const PhaseSpacePoint& x, int n);

/// X_n g = (1/n) sum_i g(values[i]). Addends are summed in sorted order so
/// the value does not depend on the listing order of the tuple.
double empirical_mean(const BoundedTestFunction& g, const OrbitTuple& orbit);

/// The squared deviation |(X_n - nu) g|^2 for one tuple.
double chaos_statistic(const BoundedTestFunction& g, const OrbitTuple& orbit, double nu);

enum class NuProvenance { closed_form, stationary_extrapolation };
std::string_view provenance_name(NuProvenance p) noexcept;

/// nu(g) with its uncertainty (zero for closed forms).
struct NuIntegral {
    double value = 0.0;
    double std_error = 0.0;
    NuProvenance provenance = NuProvenance::closed_form;
};

/// Closed-form nu(g) when the system has a known stationary limit; otherwise
/// the Monte Carlo mean of g(S^k x) at k = extrapolation_lag. Throws
/// MissingStationaryLimit when neither applies (no orbit to sample).
NuIntegral resolve_nu(const SystemDescriptor& sys, const BoundedTestFunction& g, std::uint64_t n_samples,
                      std::uint64_t seed, int extrapolation_lag = 64);

/// J_n(g) = E |(X_n - nu) g|^2 over orbit tuples of mu_n (or its
/// symmetrization when `permuted`). The error of a Monte Carlo nu is
/// propagated to first order. Throws MissingStationaryLimit when nu is absent.
MonteCarloEstimate chaos_functional(const SystemDescriptor& sys, const BoundedTestFunction& g, int n,
                                    const std::optional<NuIntegral>& nu, std::uint64_t n_samples, std::uint64_t seed,
                                    bool permuted = false);

struct ChaosRow {
    int n = 0;
    MonteCarloEstimate j_n;
};

struct ChaosSweepReport {
    std::string system;
    std::string g_id;
    NuIntegral nu;
    std::vector<ChaosRow> rows;
    /// Weighted least-squares slope of log J_n against log n with its 95%
    /// half-width; absent with fewer than 3 points or any J_n <= 0.
    std::optional<double> slope;
    std::optional<double> slope_half_width;
};

/// J_n over an n grid. All grid points reuse the same orbit samples (prefixes
/// of one trajectory of length max n), so the sweep costs one pass.
ChaosSweepReport chaos_sweep(const SystemDescriptor& sys, const BoundedTestFunction& g, const std::vector<int>& n_grid,
                             const std::optional<NuIntegral>& nu, std::uint64_t n_samples, std::uint64_t seed);

struct SlopeFit {
    double slope = 0.0;
    double half_width = 0.0;
};
/// Weighted least squares of y on x; weights 1 / sigma^2.
std::optional<SlopeFit> weighted_slope(const std::vector<double>& x, const std::vector<double>& y,
                                       const std::vector<double>& sigma);

struct FactorizationResult {
    MonteCarloEstimate lhs;
    double rhs = 0.0;
    double gap = 0.0;
};

/// k = phis.size() in {1, 2}. For k = 2, lhs averages phi_1(S^i x) phi_2(S^j x)
/// over all ordered pairs i != j (the two-marginal of the symmetrized mu_n);
/// for k = 1 it is the mean of phi_1(S^i x) over i. rhs = prod_j nu(phi_j).
/// Throws ArityError when k > n or k > 2.
FactorizationResult marginal_factorization_test(const SystemDescriptor& sys,
                                                const std::vector<BoundedTestFunction>& phis, int n,
                                                const std::vector<double>& nu_integrals, std::uint64_t n_samples,
                                                std::uint64_t seed);

/// Largest |stat(sigma orbit) - stat(orbit)| over `trials` random permutations
/// of the tuple, stat = chaos_statistic.
double symmetrization_invariance_check(const BoundedTestFunction& g, const OrbitTuple& orbit, double nu, int trials,
                                       std::uint64_t seed);

enum class DecompositionMode { exact, mc };

/// Terms of the expansion of J_n(indicator E1) into a correlation part, a
/// stationarity product part, the diagonal sum, the cross term and nu^2:
///   total = pair_covariance + pair_product + diagonal + cross + nu_squared.
/// With m_i = mu(S^-i E1) and p_ij = mu(S^-i E1 n S^-j E1):
///   pair_covariance = 2/n^2 sum_{i<j} (p_ij - m_i m_j)
///   pair_product    = 2/n^2 sum_{i<j} m_i m_j
///   diagonal        = 1/n^2 sum_i m_i
///   cross           = -2 nu/n sum_i m_i
/// `total` is computed separately from the full double sum
/// 1/n^2 sum_{i,j} p_ij - 2 nu/n sum_i m_i + nu^2 (exact mode) or as the mean
/// statistic (mc mode), so `residual` checks the rearrangement.
struct Decomposition {
    std::string system;
    std::string set;
    int n = 0;
    DecompositionMode mode = DecompositionMode::exact;
    Method method = Method::mc;
    double nu = 0.0;
    MonteCarloEstimate total;
    double pair_sum = 0.0;  ///< 2/n^2 sum_{i<j} p_ij = pair_covariance + pair_product
    double pair_covariance = 0.0;
    double pair_product = 0.0;
    double diagonal = 0.0;
    double cross = 0.0;
    double nu_squared = 0.0;
    double residual = 0.0;
    /// lag_sums[k - 1] = sum_{i=1}^{n-k} (p_{i,i+k} - m_i m_{i+k}), k = 1..n-1.
    std::vector<double> lag_sums;
};

/// Exact mode needs an exact oracle for (sys, E1) and throws UnsupportedSet
/// otherwise. `nu` defaults to the system's stationary limit of E1.
Decomposition prop33_decomposition(const SystemDescriptor& sys, const EventSet& e1, int n, DecompositionMode mode,
                                   std::uint64_t n_samples, std::uint64_t seed,
                                   std::optional<double> nu = std::nullopt);

/// Shipped test-function family for a system: two dyadic indicators, a
/// coordinate polynomial, a trigonometric function and a constant. Empty for
/// sphere systems.
std::vector<BoundedTestFunction> default_test_functions(const SystemDescriptor& sys);

}  // namespace orbitchaos
