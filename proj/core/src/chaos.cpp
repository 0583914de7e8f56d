#include "orbitchaos/chaos/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/grammar.hpp"
#include "orbitchaos/core/parallel.hpp"

namespace orbitchaos {

namespace {

constexpr std::uint64_t kPermutationTag = 0x7065726d;  // "perm"

void check_function(const SystemDescriptor& sys, const BoundedTestFunction& g) {
    if (!g.accepts(sys.space(), sys.factor_dim())) {
        throw DomainMismatch("test function " + to_string(g) + " does not live on system " + sys.id());
    }
}

int arity_for(const BoundedTestFunction& g) { return std::max(1, g.required_depth()); }

double sorted_mean(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    return sum.value() / static_cast<double>(values.size());
}

void shuffle(std::vector<int>& v, SampleStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// Combines the Monte Carlo error of J with that of nu: dJ/dnu = -2 E[X_n g - nu].
MonteCarloEstimate propagate_nu(MonteCarloEstimate j, double mean_deviation, const NuIntegral& nu) {
    if (nu.std_error > 0.0) {
        const double d = 2.0 * mean_deviation * nu.std_error;
        j.std_error = std::sqrt(j.std_error * j.std_error + d * d);
    }
    return j;
}

struct SweepBank {
    std::vector<MeanAccumulator> stat;
    std::vector<MeanAccumulator> deviation;
    void merge(const SweepBank& o) {
        if (stat.empty()) {
            stat.resize(o.stat.size());
            deviation.resize(o.deviation.size());
        }
        for (std::size_t i = 0; i < o.stat.size(); ++i) {
            stat[i].merge(o.stat[i]);
            deviation[i].merge(o.deviation[i]);
        }
    }
};

/// Integer hit counts of E1 along orbits: single[i] counts S^(i+1) x in E1,
/// pair[index(i, j)] counts both for i < j.
struct HitCounts {
    int n = 0;
    std::vector<std::uint64_t> single;
    std::vector<std::uint64_t> pair;
    MeanAccumulator stat;

    void resize(int n_) {
        n = n_;
        single.assign(static_cast<std::size_t>(n), 0);
        pair.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
    }
    void merge(const HitCounts& o) {
        if (o.n == 0) return;
        if (n == 0) resize(o.n);
        for (std::size_t i = 0; i < single.size(); ++i) single[i] += o.single[i];
        for (std::size_t i = 0; i < pair.size(); ++i) pair[i] += o.pair[i];
        stat.merge(o.stat);
    }
};

}  // namespace

OrbitTuple sample_orbit_tuple(const SystemDescriptor& sys, SampleStream& rng, int n, bool permuted, int arity) {
    if (n < 1) throw DomainMismatch("orbit tuples need n >= 1");
    auto orbit = sample_trajectory(sys, rng, n, arity);
    OrbitTuple t;
    t.order.resize(static_cast<std::size_t>(n));
    std::iota(t.order.begin(), t.order.end(), 1);
    if (permuted) {
        SampleStream perm(derive_seed(rng(), kPermutationTag));
        shuffle(t.order, perm);
    }
    t.values.reserve(static_cast<std::size_t>(n));
    for (int e : t.order) t.values.push_back(std::move(orbit[static_cast<std::size_t>(e)]));
    return t;
}

OrbitTuple sample_orbit_tuple(const SystemDescriptor& sys, int n, std::uint64_t seed, bool permuted, int arity) {
    SampleStream rng(seed);
    return sample_orbit_tuple(sys, rng, n, permuted, arity);
}

OrbitTuple orbit_tuple_of(const SystemDescriptor& sys, const PhaseSpacePoint& x, int n) {
    if (n < 1) throw DomainMismatch("orbit tuples need n >= 1");
    OrbitTuple t;
    PhaseSpacePoint current = x;
    for (int i = 1; i <= n; ++i) {
        current = iterate(sys, current, 1);
        t.values.push_back(current);
        t.order.push_back(i);
    }
    return t;
}

double empirical_mean(const BoundedTestFunction& g, const OrbitTuple& orbit) {
    if (orbit.values.empty()) throw DomainMismatch("empty orbit tuple");
    std::vector<double> v;
    v.reserve(orbit.size());
    for (const auto& x : orbit.values) v.push_back(evaluate(g, x));
    return sorted_mean(v);
}

double chaos_statistic(const BoundedTestFunction& g, const OrbitTuple& orbit, double nu) {
    const double d = empirical_mean(g, orbit) - nu;
    return d * d;
}

std::string_view provenance_name(NuProvenance p) noexcept {
    return p == NuProvenance::closed_form ? "closed-form" : "stationary-extrapolation";
}

NuIntegral resolve_nu(const SystemDescriptor& sys, const BoundedTestFunction& g, std::uint64_t n_samples,
                      std::uint64_t seed, int extrapolation_lag) {
    check_function(sys, g);
    if (sys.known_stationary_limit != StationaryLimit::none) {
        return {lebesgue_integral(g), 0.0, NuProvenance::closed_form};
    }
    if (sys.space() == SpaceKind::sphere || n_samples == 0) {
        throw MissingStationaryLimit("no stationary limit known or derivable for " + sys.id());
    }
    const int arity = arity_for(g);
    const auto acc = run_batched<MeanAccumulator>(n_samples, seed, [&](SampleStream& rng, MeanAccumulator& out) {
        const auto orbit = sample_trajectory(sys, rng, extrapolation_lag, arity);
        out.add(evaluate(g, orbit.back()));
    });
    return {acc.mean(), std::sqrt(acc.sample_variance() / static_cast<double>(acc.count())),
            NuProvenance::stationary_extrapolation};
}

MonteCarloEstimate chaos_functional(const SystemDescriptor& sys, const BoundedTestFunction& g, int n,
                                    const std::optional<NuIntegral>& nu, std::uint64_t n_samples, std::uint64_t seed,
                                    bool permuted) {
    if (!nu) throw MissingStationaryLimit("chaos functional needs nu(g)");
    if (n < 1) throw DomainMismatch("n must be >= 1");
    check_function(sys, g);
    const int arity = arity_for(g);
    const double nu_value = nu->value;
    std::uint64_t batches = 0;
    struct Acc {
        MeanAccumulator stat, deviation;
        void merge(const Acc& o) {
            stat.merge(o.stat);
            deviation.merge(o.deviation);
        }
    };
    const auto acc = run_batched<Acc>(
        n_samples, seed,
        [&](SampleStream& rng, Acc& out) {
            const auto tuple = sample_orbit_tuple(sys, rng, n, permuted, arity);
            const double d = empirical_mean(g, tuple) - nu_value;
            out.stat.add(d * d);
            out.deviation.add(d);
        },
        &batches);
    return propagate_nu(acc.stat.estimate(seed, batches), acc.deviation.mean(), *nu);
}

ChaosSweepReport chaos_sweep(const SystemDescriptor& sys, const BoundedTestFunction& g, const std::vector<int>& n_grid,
                             const std::optional<NuIntegral>& nu, std::uint64_t n_samples, std::uint64_t seed) {
    if (!nu) throw MissingStationaryLimit("chaos sweep needs nu(g)");
    if (n_grid.empty()) throw DomainMismatch("empty n grid");
    if (*std::min_element(n_grid.begin(), n_grid.end()) < 1) throw DomainMismatch("n must be >= 1");
    check_function(sys, g);
    const int arity = arity_for(g);
    const int n_max = *std::max_element(n_grid.begin(), n_grid.end());
    const double nu_value = nu->value;
    std::uint64_t batches = 0;
    const auto bank = run_batched<SweepBank>(
        n_samples, seed,
        [&](SampleStream& rng, SweepBank& out) {
            if (out.stat.empty()) {
                out.stat.resize(n_grid.size());
                out.deviation.resize(n_grid.size());
            }
            const auto orbit = sample_trajectory(sys, rng, n_max, arity);
            std::vector<double> values(static_cast<std::size_t>(n_max));
            for (int i = 1; i <= n_max; ++i) {
                values[static_cast<std::size_t>(i - 1)] = evaluate(g, orbit[static_cast<std::size_t>(i)]);
            }
            std::vector<double> prefix;
            for (std::size_t r = 0; r < n_grid.size(); ++r) {
                prefix.assign(values.begin(), values.begin() + n_grid[r]);
                const double d = sorted_mean(prefix) - nu_value;
                out.stat[r].add(d * d);
                out.deviation[r].add(d);
            }
        },
        &batches);

    ChaosSweepReport report;
    report.system = sys.id();
    report.g_id = to_string(g);
    report.nu = *nu;
    std::vector<double> lx, ly, ls;
    for (std::size_t r = 0; r < n_grid.size(); ++r) {
        MonteCarloEstimate j = r < bank.stat.size() ? bank.stat[r].estimate(seed, batches) : MonteCarloEstimate{};
        if (r < bank.deviation.size()) j = propagate_nu(j, bank.deviation[r].mean(), *nu);
        report.rows.push_back({n_grid[r], j});
        lx.push_back(std::log(static_cast<double>(n_grid[r])));
        ly.push_back(j.value > 0.0 ? std::log(j.value) : std::nan(""));
        ls.push_back(j.value > 0.0 ? j.std_error / j.value : 0.0);
    }
    if (const auto fit = weighted_slope(lx, ly, ls)) {
        report.slope = fit->slope;
        report.slope_half_width = fit->half_width;
    }
    return report;
}

std::optional<SlopeFit> weighted_slope(const std::vector<double>& x, const std::vector<double>& y,
                                       const std::vector<double>& sigma) {
    if (x.size() < 3 || x.size() != y.size() || x.size() != sigma.size()) return std::nullopt;
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(y[i]) || !(sigma[i] > 0.0)) return std::nullopt;
        const double w = 1.0 / (sigma[i] * sigma[i]);
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (sigma[i] * sigma[i]);
        sxx += w * (x[i] - mx) * (x[i] - mx);
        sxy += w * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) return std::nullopt;
    return SlopeFit{sxy / sxx, 1.96 / std::sqrt(sxx)};
}

FactorizationResult marginal_factorization_test(const SystemDescriptor& sys,
                                                const std::vector<BoundedTestFunction>& phis, int n,
                                                const std::vector<double>& nu_integrals, std::uint64_t n_samples,
                                                std::uint64_t seed) {
    const int k = static_cast<int>(phis.size());
    if (k < 1 || k > 2) throw ArityError("marginal factorization supports k = 1 or 2, got " + std::to_string(k));
    if (k > n) throw ArityError("marginal order k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
    if (nu_integrals.size() != phis.size()) throw ArityError("one nu integral per test function");
    int arity = 1;
    for (const auto& phi : phis) {
        check_function(sys, phi);
        arity = std::max(arity, arity_for(phi));
    }
    const double nn = static_cast<double>(n);
    std::uint64_t batches = 0;
    const auto acc = run_batched<MeanAccumulator>(
        n_samples, seed,
        [&](SampleStream& rng, MeanAccumulator& out) {
            const auto orbit = sample_trajectory(sys, rng, n, arity);
            CompensatedSum sa, sb, sab;
            for (int i = 1; i <= n; ++i) {
                const auto& x = orbit[static_cast<std::size_t>(i)];
                const double a = evaluate(phis[0], x);
                sa.add(a);
                if (k == 2) {
                    const double b = evaluate(phis[1], x);
                    sb.add(b);
                    sab.add(a * b);
                }
            }
            if (k == 1) {
                out.add(sa.value() / nn);
            } else {
                // sum over ordered pairs i != j of a_i b_j
                out.add((sa.value() * sb.value() - sab.value()) / (nn * (nn - 1.0)));
            }
        },
        &batches);
    FactorizationResult r;
    r.lhs = acc.estimate(seed, batches);
    r.rhs = 1.0;
    for (double v : nu_integrals) r.rhs *= v;
    r.gap = std::fabs(r.lhs.value - r.rhs);
    return r;
}

double symmetrization_invariance_check(const BoundedTestFunction& g, const OrbitTuple& orbit, double nu, int trials,
                                       std::uint64_t seed) {
    const double base = chaos_statistic(g, orbit, nu);
    double worst = 0.0;
    OrbitTuple shuffled = orbit;
    std::vector<int> perm(orbit.size());
    for (int t = 0; t < trials; ++t) {
        std::iota(perm.begin(), perm.end(), 0);
        SampleStream rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        shuffle(perm, rng);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            shuffled.values[i] = orbit.values[static_cast<std::size_t>(perm[i])];
            shuffled.order[i] = orbit.order[static_cast<std::size_t>(perm[i])];
        }
        worst = std::max(worst, std::fabs(chaos_statistic(g, shuffled, nu) - base));
    }
    return worst;
}

Decomposition prop33_decomposition(const SystemDescriptor& sys, const EventSet& e1, int n, DecompositionMode mode,
                                   std::uint64_t n_samples, std::uint64_t seed, std::optional<double> nu) {
    if (n < 1) throw DomainMismatch("n must be >= 1");
    if (!nu) nu = stationary_limit_measure(sys, e1);
    if (!nu) throw MissingStationaryLimit("no stationary limit of the set for " + sys.id());

    Decomposition d;
    d.system = sys.id();
    d.set = to_string(e1);
    d.n = n;
    d.mode = mode;
    d.nu = *nu;

    const auto un = static_cast<std::size_t>(n);
    std::vector<double> m(un + 1, 0.0);
    std::vector<std::vector<double>> p(un + 1, std::vector<double>(un + 1, 0.0));

    if (mode == DecompositionMode::exact) {
        const auto method = exact_method(sys, e1, e1);
        if (!method) throw UnsupportedSet("exact decomposition needs an exact oracle for " + sys.id() + " and " + d.set);
        d.method = *method;
        if (*method == Method::exact_dyadic && !e1.is_empty()) {
            PreimageCache cache(DyadicRect::from_box(e1.as_box()));
            for (int i = 1; i <= n; ++i) m[static_cast<std::size_t>(i)] = cache.get(i).measure();
            for (int i = 1; i <= n; ++i) {
                for (int j = i + 1; j <= n; ++j) {
                    const double v = cache.get(i).intersect(cache.get(j)).measure();
                    p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                }
            }
        } else {
            for (int i = 1; i <= n; ++i) m[static_cast<std::size_t>(i)] = *exact_preimage_measure(sys, e1, i);
            for (int i = 1; i <= n; ++i) {
                for (int j = i + 1; j <= n; ++j) {
                    p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = *exact_joint_measure(sys, e1, i, e1, j);
                }
            }
        }
        for (int i = 1; i <= n; ++i) p[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)];
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j < i; ++j) p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
        // Full double sum over ordered pairs, kept apart from the rearranged parts.
        CompensatedSum all_pairs, singles;
        for (std::size_t i = 1; i <= un; ++i) {
            for (std::size_t j = 1; j <= un; ++j) all_pairs.add(p[i][j]);
            singles.add(m[i]);
        }
        const double nn = static_cast<double>(n);
        d.total = MonteCarloEstimate::exact(all_pairs.value() / (nn * nn) - 2.0 * *nu / nn * singles.value() + *nu * *nu);
    } else {
        if (sys.space() == SpaceKind::sphere) throw DomainMismatch("decomposition needs an orbit system");
        d.method = Method::mc;
        const int arity = std::max(1, e1.required_depth());
        const double nu_value = *nu;
        std::uint64_t batches = 0;
        const auto counts = run_batched<HitCounts>(
            n_samples, seed,
            [&](SampleStream& rng, HitCounts& out) {
                if (out.n == 0) out.resize(n);
                const auto orbit = sample_trajectory(sys, rng, n, arity);
                std::vector<int> hits;
                for (int i = 1; i <= n; ++i) {
                    if (e1.contains(orbit[static_cast<std::size_t>(i)])) hits.push_back(i - 1);
                }
                for (std::size_t a = 0; a < hits.size(); ++a) {
                    ++out.single[static_cast<std::size_t>(hits[a])];
                    for (std::size_t b = a + 1; b < hits.size(); ++b) ++out.pair[out.index(hits[a], hits[b])];
                }
                const double x = static_cast<double>(hits.size()) / static_cast<double>(n) - nu_value;
                out.stat.add(x * x);
            },
            &batches);
        const double total_n = static_cast<double>(counts.stat.count());
        if (counts.n != 0 && total_n > 0) {
            for (int i = 1; i <= n; ++i) {
                m[static_cast<std::size_t>(i)] = static_cast<double>(counts.single[static_cast<std::size_t>(i - 1)]) / total_n;
                for (int j = i + 1; j <= n; ++j) {
                    p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        static_cast<double>(counts.pair[counts.index(i - 1, j - 1)]) / total_n;
                }
            }
        }
        d.total = counts.stat.estimate(seed, batches);
    }

    const double nn = static_cast<double>(n);
    CompensatedSum pair_all, pair_cov, pair_prod, diag;
    d.lag_sums.assign(un > 0 ? un - 1 : 0, 0.0);
    for (int k = 1; k < n; ++k) {
        CompensatedSum lag;
        for (int i = 1; i + k <= n; ++i) {
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(i + k);
            const double prod = m[ui] * m[uj];
            lag.add(p[ui][uj] - prod);
            pair_all.add(p[ui][uj]);
            pair_cov.add(p[ui][uj] - prod);
            pair_prod.add(prod);
        }
        d.lag_sums[static_cast<std::size_t>(k - 1)] = lag.value();
    }
    for (std::size_t i = 1; i <= un; ++i) diag.add(m[i]);
    d.pair_sum = 2.0 / (nn * nn) * pair_all.value();
    d.pair_covariance = 2.0 / (nn * nn) * pair_cov.value();
    d.pair_product = 2.0 / (nn * nn) * pair_prod.value();
    d.diagonal = diag.value() / (nn * nn);
    d.cross = -2.0 * d.nu / nn * diag.value();
    d.nu_squared = d.nu * d.nu;
    CompensatedSum parts;
    for (double v : {d.pair_covariance, d.pair_product, d.diagonal, d.cross, d.nu_squared}) parts.add(v);
    d.residual = std::fabs(d.total.value - parts.value());
    return d;
}

std::vector<BoundedTestFunction> default_test_functions(const SystemDescriptor& sys) {
    std::vector<std::string_view> specs;
    switch (sys.space()) {
        case SpaceKind::planar:
            specs = {"ind:box:0,0.5;0,1", "ind:box:0.25,0.75;0,0.5", "poly:x*y", "trig:cos:1,0", "const:1"};
            break;
        case SpaceKind::product:
            if (sys.factor_dim() == 1) {
                specs = {"ind:cyl:1:[0.5,0.75)", "ind:cyl:1:[0,0.5);2:[0.25,0.75)", "poly:x1*x2", "trig:cos:1",
                         "const:1"};
            } else {
                specs = {"ind:cyl:1:[0,0.5)x[0,1)", "ind:cyl:1:[0.25,0.75)x[0,0.5)", "poly:x1*y1", "trig:cos:1,0",
                         "const:1"};
            }
            break;
        case SpaceKind::sphere:
            break;
    }
    std::vector<BoundedTestFunction> out;
    for (auto s : specs) out.push_back(parse_test_function(s, sys.domain()));
    return out;
}

}  // namespace orbitchaos
