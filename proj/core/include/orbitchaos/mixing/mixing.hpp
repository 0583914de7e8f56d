#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitchaos/core/estimate.hpp"
#include "orbitchaos/core/event_set.hpp"
#include "orbitchaos/dynamics/system.hpp"

namespace orbitchaos {

/// How a correlation value was obtained. exact_dyadic covers the baker
/// rectangle oracle, closed_form the product-measure formulas.
enum class Method { mc, exact_dyadic, closed_form };

std::string_view method_name(Method m) noexcept;

inline constexpr int kDefaultIMax = 16;
inline const std::vector<int> kDefaultLags{1, 2, 4, 8, 16, 32, 64};

// Exact oracles ---------------------------------------------------------------
// Available for the baker map on boxes with dyadic endpoints (via the dyadic
// preimage oracle) and for product systems with identity inner map on
// cylinders (product-measure closed forms). Return nullopt elsewhere.

/// Exact method available for (sys, sets), if any.
std::optional<Method> exact_method(const SystemDescriptor& sys, const EventSet& a, const EventSet& b);

/// mu(S^-k A).
std::optional<double> exact_preimage_measure(const SystemDescriptor& sys, const EventSet& a, int k);

/// mu(S^-i A  intersect  S^-j B).
std::optional<double> exact_joint_measure(const SystemDescriptor& sys, const EventSet& a, int i, const EventSet& b,
                                          int j);

/// Lazily extended chain A, S^-1 A, S^-2 A, ... of baker preimages; each
/// step reuses the previous one.
class PreimageCache {
public:
    explicit PreimageCache(DyadicRect base) { chain_.push_back(std::move(base)); }
    const DyadicRect& get(int k);

private:
    std::vector<DyadicRect> chain_;
};

/// nu(A) for the system's known stationary limit, nullopt when there is none.
std::optional<double> stationary_limit_measure(const SystemDescriptor& sys, const EventSet& a);

// Correlations ----------------------------------------------------------------

/// Monte Carlo estimate of C_k(A, B) = |mu(S^-k A n B) - mu(S^-k A) mu(B)|.
/// Both factors of the product come from the same samples; the standard
/// error is that of the plug-in covariance (delta method).
MonteCarloEstimate correlation(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k,
                               std::uint64_t n_samples, std::uint64_t seed);

/// C_k(A, B) from the exact oracle; throws UnsupportedSet when none applies.
double correlation_exact(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k);

struct UniformCorrelation {
    MonteCarloEstimate estimate;       ///< max over i of the per-i terms
    int i_star = 1;                    ///< maximizing i (smallest on ties)
    std::vector<MonteCarloEstimate> per_i;  ///< terms for i = 1..I_max
};

/// U_k = max_{1<=i<=I_max} |mu(S^-i A n S^-(k+i) B) - mu(S^-i A) mu(S^-(k+i) B)|,
/// the supremum over i truncated at I_max (an under-estimate of the sup).
UniformCorrelation uniform_correlation(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k,
                                       int i_max, std::uint64_t n_samples, std::uint64_t seed);
UniformCorrelation uniform_correlation_exact(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k,
                                             int i_max);

struct CorrelationRow {
    int k = 0;
    int i_star = 0;  ///< 0 for plain correlations
    MonteCarloEstimate estimate;
    Method method = Method::mc;
};

struct CorrelationReport {
    std::string system;
    EventSet set_a = EventSet::empty();
    EventSet set_b = EventSet::empty();
    int i_max = 0;  ///< 0 for plain correlation scans
    std::vector<CorrelationRow> rows;
};

CorrelationReport correlation_scan(const SystemDescriptor& sys, const EventSet& a, const EventSet& b,
                                   const std::vector<int>& lags, std::uint64_t n_samples, std::uint64_t seed,
                                   bool exact);
CorrelationReport uniform_correlation_scan(const SystemDescriptor& sys, const EventSet& a, const EventSet& b,
                                           const std::vector<int>& lags, int i_max, std::uint64_t n_samples,
                                           std::uint64_t seed, bool exact);

// Stationarity ----------------------------------------------------------------

struct StationaryRow {
    int k = 0;
    MonteCarloEstimate estimate;        ///< mu(S^-k A)
    std::optional<double> exact;        ///< closed-form / oracle mu(S^-k A)
    std::optional<double> gap;          ///< |estimate - nu(A)|
    std::optional<double> exact_gap;    ///< |exact - nu(A)|
};

struct StationaryScan {
    std::string system;
    EventSet set = EventSet::empty();
    std::optional<double> nu;  ///< closed-form nu(A) when the limit is known
    std::vector<StationaryRow> rows;
};

StationaryScan stationary_scan(const SystemDescriptor& sys, const EventSet& a, const std::vector<int>& k_list,
                               std::uint64_t n_samples, std::uint64_t seed);

struct TailBound {
    double bound = 0.0;        ///< 2 (1 - prod_{s>=k} (1 - 2^-s))
    int partial_product_terms = 0;
};

/// Certified bound on |M(S^-k A) - L(A)| for the product-phi system. The
/// product runs to s = k + 60, so the neglected tail changes 1 - P by less
/// than 2^-(k+60) < 1e-14.
TailBound tail_bound_check(int k);

}  // namespace orbitchaos
