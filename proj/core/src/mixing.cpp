#include "orbitchaos/mixing/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/parallel.hpp"

namespace orbitchaos {

namespace {

void check_set(const SystemDescriptor& sys, const EventSet& a) {
    if (a.is_empty()) return;
    switch (sys.space()) {
        case SpaceKind::planar:
            if (!a.is_box() || a.as_box().dimension() != 2) throw DomainMismatch("planar systems take 2-d boxes");
            return;
        case SpaceKind::product:
            if (!a.is_cylinder() || a.as_cylinder().factor_dim != sys.factor_dim()) {
                throw DomainMismatch("system " + sys.id() + " takes cylinders with factor dimension " +
                                     std::to_string(sys.factor_dim()));
            }
            return;
        case SpaceKind::sphere:
            throw DomainMismatch("sphere systems have no box or cylinder events");
    }
}

int arity_of(const EventSet& a, const EventSet& b) {
    return std::max({1, a.required_depth(), b.required_depth()});
}

bool is_dyadic_box(const EventSet& a) {
    if (a.is_empty()) return true;
    if (!a.is_box()) return false;
    for (const auto& s : a.as_box().sides) {
        if (dyadic_order(s.lo) < 0 || dyadic_order(s.hi) < 0) return false;
    }
    return true;
}

bool has_closed_form(const SystemDescriptor& sys) {
    return sys.kind == SystemKind::product_phi ||
           (sys.kind == SystemKind::product_shift && sys.inner_map == InnerMap::identity);
}

/// Coordinate constraints of S^-shift A for an identity-inner product system:
/// factor n of A constrains coordinate n + shift. Returns false when the
/// accumulated constraints become empty.
bool add_shifted(const EventSet& a, int shift, std::map<int, Interval>& into) {
    if (a.is_empty()) return false;
    for (const auto& [index, box] : a.as_cylinder().constraints) {
        const Interval& iv = box.sides[0];
        auto [it, inserted] = into.emplace(index + shift, iv);
        if (!inserted) {
            const double lo = std::max(it->second.lo, iv.lo);
            const double hi = std::min(it->second.hi, iv.hi);
            if (!(lo < hi)) return false;
            it->second = Interval(lo, hi);
        }
    }
    return true;
}

double product_measure(const SystemDescriptor& sys, const std::map<int, Interval>& constraints) {
    double m = 1.0;
    for (const auto& [coord, iv] : constraints) {
        m *= sys.base_measure == BaseMeasure::product_phi ? phi_density::mass(coord, iv) : iv.length();
    }
    return m;
}

DyadicRect dyadic_of(const EventSet& a) { return a.is_empty() ? DyadicRect::empty(0) : DyadicRect::from_box(a.as_box()); }

/// Accumulators for the i = 1..I_max terms of the uniform correlation.
struct CovarianceBank {
    std::vector<CovarianceAccumulator> terms;
    void merge(const CovarianceBank& o) {
        if (terms.empty()) terms.resize(o.terms.size());
        for (std::size_t i = 0; i < o.terms.size(); ++i) terms[i].merge(o.terms[i]);
    }
};

struct MeanBank {
    std::vector<MeanAccumulator> terms;
    void merge(const MeanBank& o) {
        if (terms.empty()) terms.resize(o.terms.size());
        for (std::size_t i = 0; i < o.terms.size(); ++i) terms[i].merge(o.terms[i]);
    }
};

MonteCarloEstimate covariance_estimate(const CovarianceAccumulator& acc, std::uint64_t seed, std::uint64_t batches) {
    MonteCarloEstimate e;
    e.value = std::fabs(acc.covariance());
    e.std_error = acc.covariance_std_error();
    e.n_samples = acc.count();
    e.seed = seed;
    e.batch_count = batches;
    return e;
}

double signed_exact_term(const SystemDescriptor& sys, const EventSet& a, int i, const EventSet& b, int j) {
    const auto joint = exact_joint_measure(sys, a, i, b, j);
    const auto ma = exact_preimage_measure(sys, a, i);
    const auto mb = exact_preimage_measure(sys, b, j);
    if (!joint || !ma || !mb) throw UnsupportedSet("no exact oracle for system " + sys.id() + " and these sets");
    return *joint - *ma * *mb;
}

}  // namespace

const DyadicRect& PreimageCache::get(int k) {
    if (k < 0) throw DomainMismatch("preimage order must be nonnegative");
    while (static_cast<int>(chain_.size()) <= k) chain_.push_back(baker_preimage(chain_.back(), 1));
    return chain_[static_cast<std::size_t>(k)];
}

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::mc:
            return "mc";
        case Method::exact_dyadic:
            return "exact-dyadic";
        case Method::closed_form:
            return "closed-form";
    }
    return "mc";
}

std::optional<Method> exact_method(const SystemDescriptor& sys, const EventSet& a, const EventSet& b) {
    if (sys.kind == SystemKind::baker && is_dyadic_box(a) && is_dyadic_box(b)) return Method::exact_dyadic;
    if (has_closed_form(sys) && (a.is_empty() || a.is_cylinder()) && (b.is_empty() || b.is_cylinder())) {
        return Method::closed_form;
    }
    return std::nullopt;
}

std::optional<double> exact_preimage_measure(const SystemDescriptor& sys, const EventSet& a, int k) {
    check_set(sys, a);
    if (a.is_empty()) return 0.0;
    if (!exact_method(sys, a, a)) return std::nullopt;
    if (sys.kind == SystemKind::baker) return baker_preimage(dyadic_of(a), k).measure();
    std::map<int, Interval> c;
    if (!add_shifted(a, k, c)) return 0.0;
    return product_measure(sys, c);
}

std::optional<double> exact_joint_measure(const SystemDescriptor& sys, const EventSet& a, int i, const EventSet& b,
                                          int j) {
    check_set(sys, a);
    check_set(sys, b);
    if (a.is_empty() || b.is_empty()) return 0.0;
    if (!exact_method(sys, a, b)) return std::nullopt;
    if (sys.kind == SystemKind::baker) {
        return baker_preimage(dyadic_of(a), i).intersect(baker_preimage(dyadic_of(b), j)).measure();
    }
    std::map<int, Interval> c;
    if (!add_shifted(a, i, c) || !add_shifted(b, j, c)) return 0.0;
    return product_measure(sys, c);
}

std::optional<double> stationary_limit_measure(const SystemDescriptor& sys, const EventSet& a) {
    check_set(sys, a);
    if (a.is_empty()) return 0.0;
    switch (sys.known_stationary_limit) {
        case StationaryLimit::none:
            return std::nullopt;
        case StationaryLimit::lebesgue_square:
            return a.as_box().volume();
        case StationaryLimit::lebesgue_product: {
            double m = 1.0;
            for (const auto& [index, box] : a.as_cylinder().constraints) m *= box.volume();
            return m;
        }
    }
    return std::nullopt;
}

MonteCarloEstimate correlation(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k,
                               std::uint64_t n_samples, std::uint64_t seed) {
    if (k < 0) throw DomainMismatch("lag must be nonnegative");
    check_set(sys, a);
    check_set(sys, b);
    const int arity = arity_of(a, b);
    std::uint64_t batches = 0;
    const auto acc = run_batched<CovarianceAccumulator>(
        n_samples, seed,
        [&](SampleStream& rng, CovarianceAccumulator& out) {
            const auto orbit = sample_trajectory(sys, rng, k, arity);
            const double in_a = a.contains(orbit[static_cast<std::size_t>(k)]) ? 1.0 : 0.0;
            const double in_b = b.contains(orbit[0]) ? 1.0 : 0.0;
            out.add(in_a, in_b);
        },
        &batches);
    return covariance_estimate(acc, seed, batches);
}

double correlation_exact(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k) {
    if (k < 0) throw DomainMismatch("lag must be nonnegative");
    return std::fabs(signed_exact_term(sys, a, k, b, 0));
}

UniformCorrelation uniform_correlation(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k,
                                       int i_max, std::uint64_t n_samples, std::uint64_t seed) {
    if (k < 0) throw DomainMismatch("lag must be nonnegative");
    if (i_max < 1) throw DomainMismatch("I_max must be >= 1");
    check_set(sys, a);
    check_set(sys, b);
    const int arity = arity_of(a, b);
    std::uint64_t batches = 0;
    const auto bank = run_batched<CovarianceBank>(
        n_samples, seed,
        [&](SampleStream& rng, CovarianceBank& out) {
            if (out.terms.empty()) out.terms.resize(static_cast<std::size_t>(i_max));
            const auto orbit = sample_trajectory(sys, rng, k + i_max, arity);
            for (int i = 1; i <= i_max; ++i) {
                const double in_a = a.contains(orbit[static_cast<std::size_t>(i)]) ? 1.0 : 0.0;
                const double in_b = b.contains(orbit[static_cast<std::size_t>(k + i)]) ? 1.0 : 0.0;
                out.terms[static_cast<std::size_t>(i - 1)].add(in_a, in_b);
            }
        },
        &batches);

    UniformCorrelation out;
    for (int i = 1; i <= i_max; ++i) {
        const auto& acc = static_cast<std::size_t>(i - 1) < bank.terms.size() ? bank.terms[static_cast<std::size_t>(i - 1)]
                                                                               : CovarianceAccumulator{};
        out.per_i.push_back(covariance_estimate(acc, seed, batches));
    }
    for (int i = 1; i <= i_max; ++i) {
        if (out.per_i[static_cast<std::size_t>(i - 1)].value > out.per_i[static_cast<std::size_t>(out.i_star - 1)].value) {
            out.i_star = i;
        }
    }
    out.estimate = out.per_i[static_cast<std::size_t>(out.i_star - 1)];
    return out;
}

UniformCorrelation uniform_correlation_exact(const SystemDescriptor& sys, const EventSet& a, const EventSet& b, int k,
                                             int i_max) {
    if (k < 0) throw DomainMismatch("lag must be nonnegative");
    if (i_max < 1) throw DomainMismatch("I_max must be >= 1");
    check_set(sys, a);
    check_set(sys, b);
    const auto method = exact_method(sys, a, b);
    if (!method) throw UnsupportedSet("no exact oracle for system " + sys.id() + " and these sets");

    UniformCorrelation out;
    if (*method == Method::exact_dyadic) {
        PreimageCache pa(dyadic_of(a));
        PreimageCache pb(dyadic_of(b));
        for (int i = 1; i <= i_max; ++i) {
            const auto& sa = pa.get(i);
            const auto& sb = pb.get(k + i);
            const double term = std::fabs(sa.intersect(sb).measure() - sa.measure() * sb.measure());
            out.per_i.push_back(MonteCarloEstimate::exact(term));
        }
    } else {
        for (int i = 1; i <= i_max; ++i) {
            out.per_i.push_back(MonteCarloEstimate::exact(std::fabs(signed_exact_term(sys, a, i, b, k + i))));
        }
    }
    for (int i = 1; i <= i_max; ++i) {
        if (out.per_i[static_cast<std::size_t>(i - 1)].value > out.per_i[static_cast<std::size_t>(out.i_star - 1)].value) {
            out.i_star = i;
        }
    }
    out.estimate = out.per_i[static_cast<std::size_t>(out.i_star - 1)];
    return out;
}

CorrelationReport correlation_scan(const SystemDescriptor& sys, const EventSet& a, const EventSet& b,
                                   const std::vector<int>& lags, std::uint64_t n_samples, std::uint64_t seed,
                                   bool exact) {
    CorrelationReport report{sys.id(), a, b, 0, {}};
    std::optional<Method> method;
    if (exact) {
        method = exact_method(sys, a, b);
        if (!method) throw UnsupportedSet("no exact oracle for system " + sys.id() + " and these sets");
    }
    for (int k : lags) {
        CorrelationRow row;
        row.k = k;
        if (method) {
            row.estimate = MonteCarloEstimate::exact(correlation_exact(sys, a, b, k));
            row.method = *method;
        } else {
            row.estimate = correlation(sys, a, b, k, n_samples, seed);
            row.method = Method::mc;
        }
        report.rows.push_back(row);
    }
    return report;
}

CorrelationReport uniform_correlation_scan(const SystemDescriptor& sys, const EventSet& a, const EventSet& b,
                                           const std::vector<int>& lags, int i_max, std::uint64_t n_samples,
                                           std::uint64_t seed, bool exact) {
    CorrelationReport report{sys.id(), a, b, i_max, {}};
    for (int k : lags) {
        CorrelationRow row;
        row.k = k;
        const auto u = exact ? uniform_correlation_exact(sys, a, b, k, i_max)
                             : uniform_correlation(sys, a, b, k, i_max, n_samples, seed);
        row.i_star = u.i_star;
        row.estimate = u.estimate;
        row.method = exact ? *exact_method(sys, a, b) : Method::mc;
        report.rows.push_back(row);
    }
    return report;
}

StationaryScan stationary_scan(const SystemDescriptor& sys, const EventSet& a, const std::vector<int>& k_list,
                               std::uint64_t n_samples, std::uint64_t seed) {
    if (k_list.empty()) throw DomainMismatch("stationary scan needs at least one lag");
    if (!std::is_sorted(k_list.begin(), k_list.end()) || k_list.front() < 0) {
        throw DomainMismatch("stationary scan lags must be nonnegative and ascending");
    }
    check_set(sys, a);
    const int k_max = k_list.back();
    const int arity = std::max(1, a.required_depth());
    std::uint64_t batches = 0;
    const auto bank = run_batched<MeanBank>(
        n_samples, seed,
        [&](SampleStream& rng, MeanBank& out) {
            if (out.terms.empty()) out.terms.resize(k_list.size());
            const auto orbit = sample_trajectory(sys, rng, k_max, arity);
            for (std::size_t i = 0; i < k_list.size(); ++i) {
                out.terms[i].add(a.contains(orbit[static_cast<std::size_t>(k_list[i])]) ? 1.0 : 0.0);
            }
        },
        &batches);

    StationaryScan scan{sys.id(), a, stationary_limit_measure(sys, a), {}};
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        StationaryRow row;
        row.k = k_list[i];
        row.estimate = i < bank.terms.size() ? bank.terms[i].estimate(seed, batches) : MeanAccumulator{}.estimate(seed);
        row.exact = exact_preimage_measure(sys, a, row.k);
        if (scan.nu) {
            row.gap = std::fabs(row.estimate.value - *scan.nu);
            if (row.exact) row.exact_gap = std::fabs(*row.exact - *scan.nu);
        }
        scan.rows.push_back(row);
    }
    return scan;
}

TailBound tail_bound_check(int k) {
    if (k < 1) throw DomainMismatch("tail bound needs k >= 1");
    constexpr int kExtra = 60;
    double log_product = 0.0;
    for (int s = k; s <= k + kExtra; ++s) log_product += std::log1p(-std::ldexp(1.0, -s));
    return {-2.0 * std::expm1(log_product), kExtra + 1};
}

}  // namespace orbitchaos
