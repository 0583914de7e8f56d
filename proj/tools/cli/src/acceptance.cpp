#include "orbitchaos/cli/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "orbitchaos/chaos/chaos.hpp"
#include "orbitchaos/cli/csv.hpp"
#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/grammar.hpp"
#include "orbitchaos/core/parallel.hpp"
#include "orbitchaos/kacsphere/kacsphere.hpp"
#include "orbitchaos/mixing/mixing.hpp"

namespace orbitchaos::cli {

namespace {

/// Collects sub-checks; the criterion passes when all of them do.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            passed_ = false;
            if (failures_++ < 4) note("FAILED " + what);
        }
    }
    void note(const std::string& s) {
        if (!detail_.empty()) detail_ += "; ";
        detail_ += s;
    }
    bool passed() const { return passed_; }
    const std::string& detail() const { return detail_; }

private:
    bool passed_ = true;
    int failures_ = 0;
    std::string detail_;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

EventSet set(std::string_view s) { return parse_event_set(s); }

std::uint64_t sub_seed(const AcceptanceOptions& o, std::uint64_t tag) { return derive_seed(o.seed, tag); }

// AC1 -------------------------------------------------------------------------
void baker_mixing(Check& c, const AcceptanceOptions& o) {
    const auto sys = SystemDescriptor::baker();
    const auto a = set("box:0,0.5;0,0.5");
    double worst_residual = 0.0, worst_z = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double exact = correlation_exact(sys, a, a, k);
        const double expected = k == 1 ? 1.0 / 16.0 : 0.0;
        worst_residual = std::max(worst_residual, std::fabs(exact - expected));
        const auto mc = correlation(sys, a, a, k, 1'000'000, sub_seed(o, 100 + k));
        const double z = std::fabs(mc.value - exact) / mc.std_error;
        worst_z = std::max(worst_z, z);
        c.expect(z <= 3.0, "MC C_" + std::to_string(k) + " off by " + fmt(z) + " sigma");
    }
    c.expect(worst_residual <= 1e-12, "oracle residual " + fmt(worst_residual));
    c.note("oracle residual " + fmt(worst_residual) + ", MC max |z| " + fmt(worst_z));
}

// AC2 -------------------------------------------------------------------------
void uniform_collapse(Check& c, const AcceptanceOptions&) {
    const auto sys = SystemDescriptor::baker();
    const auto a = set("box:0,0.5;0,0.5");
    double worst = 0.0;
    for (int i_max = 1; i_max <= 8; ++i_max) {
        for (int k = 1; k <= 8; ++k) {
            const auto u = uniform_correlation_exact(sys, a, a, k, i_max);
            worst = std::max(worst, std::fabs(u.estimate.value - correlation_exact(sys, a, a, k)));
        }
    }
    c.expect(worst <= 1e-12, "max |U_k - C_k| = " + fmt(worst));
    c.note("max |U_k - C_k| over I_max, k <= 8: " + fmt(worst));
}

// AC3 -------------------------------------------------------------------------
EventSet random_cylinder(SampleStream& rng) {
    std::map<int, Interval> constraints;
    while (constraints.empty()) {
        for (int idx = 1; idx <= 3; ++idx) {
            if (uniform_index(rng, 2) == 0) continue;
            auto lo = static_cast<double>(uniform_index(rng, 64));
            auto hi = static_cast<double>(uniform_index(rng, 64));
            if (lo > hi) std::swap(lo, hi);
            hi += 1.0;
            constraints.emplace(idx, Interval(lo / 64.0, hi / 64.0));
        }
    }
    return EventSet::cylinder(std::move(constraints));
}

void phi_stationarity(Check& c, const AcceptanceOptions& o) {
    const auto sys = SystemDescriptor::product_phi();
    const std::vector<int> ks{1, 2, 3, 4, 5, 6, 7, 8};
    SampleStream rng(sub_seed(o, 300));
    double worst_slack = -1.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_cylinder(rng);
        const auto scan = stationary_scan(sys, a, ks, 100'000, sub_seed(o, 301 + trial));
        for (const auto& r : scan.rows) {
            const double bound = tail_bound_check(r.k).bound;
            const double slack = *r.gap - bound - 3.0 * r.estimate.std_error;
            worst_slack = std::max(worst_slack, slack);
            c.expect(slack <= 0.0, to_string(a) + " k=" + std::to_string(r.k) + " gap " + fmt(*r.gap) +
                                       " exceeds bound " + fmt(bound));
            c.expect(*r.exact_gap <= bound, to_string(a) + " closed-form gap exceeds bound");
        }
    }
    const auto strip = set("cyl:1:[0.5,0.75)");
    for (int k = 1; k <= 8; ++k) {
        const double gap = std::fabs(*exact_preimage_measure(sys, strip, k) - *stationary_limit_measure(sys, strip));
        c.expect(gap == (k == 1 ? 0.25 : 0.0), "closed-form gap of w1 in [1/2,3/4) at k=" + std::to_string(k) + " is " + fmt(gap));
    }
    c.note("10 cylinders, k=1..8, max (gap - bound - 3se) " + fmt(worst_slack) + "; strip gaps 0.25, 0, ..., 0");
}

// AC4 -------------------------------------------------------------------------
void phi_factorization(Check& c, const AcceptanceOptions& o) {
    const auto sys = SystemDescriptor::product_phi();
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"cyl:1:[0.5,0.75)", "cyl:1:[0.5,0.75)"},
        {"cyl:1:[0,0.5);2:[0.25,0.75)", "cyl:3:[0.5,1)"},
        {"cyl:2:[0,0.25)", "cyl:1:[0.5,0.75);3:[0,0.5)"},
    };
    double worst_z = 0.0, worst_exact = 0.0;
    std::uint64_t tag = 400;
    for (const auto& [sa, sb] : pairs) {
        const auto a = set(sa), b = set(sb);
        for (int k : {4, 8}) {
            const auto exact = uniform_correlation_exact(sys, a, b, k, kDefaultIMax);
            worst_exact = std::max(worst_exact, exact.estimate.value);
            c.expect(exact.estimate.value == 0.0, "closed-form U_" + std::to_string(k) + " nonzero for " + sa);
            const auto mc = uniform_correlation(sys, a, b, k, 8, 100'000, sub_seed(o, ++tag));
            const double z = mc.estimate.value / mc.estimate.std_error;
            worst_z = std::max(worst_z, z);
            c.expect(z <= 3.0, "MC U_" + std::to_string(k) + " = " + fmt(z) + " sigma for " + sa + " / " + sb);
        }
    }
    c.note("closed-form max U_k " + fmt(worst_exact) + ", MC max U_k/se " + fmt(worst_z) + " (I_max 8)");
}

// AC5 -------------------------------------------------------------------------
void baker_rate(Check& c, const AcceptanceOptions& o) {
    const auto sys = SystemDescriptor::baker();
    const auto g = parse_test_function("ind:box:0,0.5;0,1", sys.domain());
    const auto nu = resolve_nu(sys, g, 0, 0);
    const auto rep = chaos_sweep(sys, g, {8, 32, 128}, nu, 100'000, sub_seed(o, 500));
    for (const auto& r : rep.rows) {
        const double scaled = r.n * r.j_n.value;
        const double z = std::fabs(scaled - 0.25) / (r.n * r.j_n.std_error);
        c.expect(z <= 3.0, "n J_n at n=" + std::to_string(r.n) + " = " + fmt(scaled));
        c.note("n=" + std::to_string(r.n) + ": n J_n " + fmt(scaled) + " (" + fmt(z) + " se)");
    }
    c.expect(rep.slope.has_value() && std::fabs(*rep.slope + 1.0) <= 0.1, "slope not within -1 +- 0.1");
    if (rep.slope) c.note("slope " + fmt(*rep.slope) + " +- " + fmt(*rep.slope_half_width));
}

// AC6 -------------------------------------------------------------------------
void chaos_decay(Check& c, const AcceptanceOptions& o) {
    const std::vector<std::pair<std::string, std::uint64_t>> systems{
        {"cat", 100'000},
        {"product-shift:identity", 20'000},
        {"product-shift:baker", 20'000},
        {"product-shift:cat", 20'000},
    };
    std::uint64_t tag = 600;
    int checked = 0;
    double worst_ratio = 0.0;
    for (const auto& [id, samples] : systems) {
        const auto sys = make_system(id);
        for (const auto& g : default_test_functions(sys)) {
            const auto nu = resolve_nu(sys, g, 0, 0);
            const auto rep = chaos_sweep(sys, g, kDefaultNGrid, nu, samples, sub_seed(o, ++tag));
            const bool constant = std::holds_alternative<PolynomialFn>(g.variant()) &&
                                  std::get<PolynomialFn>(g.variant()).terms.size() == 1 &&
                                  std::get<PolynomialFn>(g.variant()).terms[0].powers.empty();
            if (constant) {
                for (const auto& r : rep.rows) c.expect(r.j_n.value == 0.0, id + " constant J_n nonzero");
                continue;
            }
            ++checked;
            for (std::size_t i = 1; i < rep.rows.size(); ++i) {
                c.expect(rep.rows[i].j_n.value < rep.rows[i - 1].j_n.value,
                         id + " " + rep.g_id + " J_n not decreasing at n=" + std::to_string(rep.rows[i].n));
            }
            const double ratio = rep.rows.back().j_n.value / rep.rows.front().j_n.value;
            worst_ratio = std::max(worst_ratio, ratio);
            c.expect(ratio < 0.25, id + " " + rep.g_id + " J_128/J_4 = " + fmt(ratio));
        }
    }
    c.note(std::to_string(checked) + " non-constant (system, g) sweeps decreasing, max J_128/J_4 " + fmt(worst_ratio) +
           "; constants give J_n = 0");
}

// AC7 -------------------------------------------------------------------------
void symmetrization(Check& c, const AcceptanceOptions& o) {
    struct Case {
        std::string system, g;
    };
    const std::vector<Case> cases{{"baker", "ind:box:0,0.5;0,1"}, {"cat", "trig:cos:1,0"}};
    std::uint64_t tag = 700;
    for (const auto& cs : cases) {
        const auto sys = make_system(cs.system);
        const auto g = parse_test_function(cs.g, sys.domain());
        const auto nu = resolve_nu(sys, g, 0, 0);
        const auto orbit = sample_orbit_tuple(sys, 64, sub_seed(o, ++tag), false);
        const double dev = symmetrization_invariance_check(g, orbit, nu.value, 1000, sub_seed(o, ++tag));
        c.expect(dev <= 1e-12, cs.system + " pointwise deviation " + fmt(dev));
        const auto plain = chaos_functional(sys, g, 64, nu, 100'000, sub_seed(o, ++tag), false);
        const auto perm = chaos_functional(sys, g, 64, nu, 100'000, sub_seed(o, ++tag), true);
        const double pooled = std::hypot(plain.std_error, perm.std_error);
        const double z = std::fabs(plain.value - perm.value) / pooled;
        c.expect(z <= 3.0, cs.system + " permuted vs unpermuted differ by " + fmt(z) + " pooled se");
        c.note(cs.system + ": deviation " + fmt(dev) + ", |J - J_sym| " + fmt(z) + " se");
    }
}

// AC8 -------------------------------------------------------------------------
void decomposition(Check& c, const AcceptanceOptions&) {
    const auto sys = SystemDescriptor::baker();
    double worst = 0.0;
    for (const char* s : {"box:0,0.5;0,1", "box:0,0.5;0,0.5"}) {
        for (int n : {4, 8, 16}) {
            const auto d = prop33_decomposition(sys, set(s), n, DecompositionMode::exact, 0, 0);
            worst = std::max(worst, d.residual);
            c.expect(d.residual <= 1e-12, std::string(s) + " n=" + std::to_string(n) + " residual " + fmt(d.residual));
            if (std::string_view(s) == "box:0,0.5;0,1") {
                c.expect(std::fabs(d.total.value - 0.25 / n) <= 1e-12, "strip total differs from 1/(4n)");
            }
        }
    }
    c.note("max residual " + fmt(worst) + " over both sets, n = 4, 8, 16");
}

// AC9 -------------------------------------------------------------------------
void factorization(Check& c, const AcceptanceOptions& o) {
    const auto baker = SystemDescriptor::baker();
    const auto strip = parse_test_function("ind:box:0,0.5;0,1", baker.domain());
    const auto f = marginal_factorization_test(baker, {strip, strip}, 16, {0.5, 0.5}, 100'000, sub_seed(o, 900));
    const double zb = std::fabs(f.lhs.value - 0.25) / f.lhs.std_error;
    c.expect(zb <= 3.0, "baker two-marginal " + fmt(f.lhs.value));
    c.note("baker n=16 lhs " + fmt(f.lhs.value) + " (" + fmt(zb) + " se)");
    const auto sq = kac::ScalarFunction::monomial(1.0, 2);
    std::uint64_t tag = 910;
    for (int n : {4, 16, 64}) {
        const double expected = static_cast<double>(n) / (n + 2);
        const auto m = kac::marginal_moment(n, 2, 2, 1'000'000, sub_seed(o, ++tag));
        const double zm = std::fabs(m.value - expected) / m.std_error;
        c.expect(zm <= 3.0, "E[x1^2 x2^2] at n=" + std::to_string(n) + " off by " + fmt(zm) + " se");
        const auto gap = kac::sphere_chaoticity_gap(n, sq, sq, 1'000'000, sub_seed(o, ++tag));
        const double zg = std::fabs(gap.gap - 2.0 / (n + 2)) / gap.lhs.std_error;
        c.expect(zg <= 3.0, "chaoticity gap at n=" + std::to_string(n) + " off by " + fmt(zg) + " se");
        c.note("sphere n=" + std::to_string(n) + ": moment " + fmt(zm) + " se, gap " + fmt(zg) + " se");
    }
}

// AC10 ------------------------------------------------------------------------
void marginal_density(Check& c, const AcceptanceOptions& o) {
    const auto r4 = kac::marginal_density(4, {}, 1'000'000, sub_seed(o, 1000));
    const auto r64 = kac::marginal_density(64, {}, 1'000'000, sub_seed(o, 1001));
    c.expect(r4.max_reference_z <= 4.0, "n=4 histogram off reference by " + fmt(r4.max_reference_z) + " se");
    c.expect(r64.sup_gaussian_deviation < r4.sup_gaussian_deviation, "Gaussian deviation did not shrink");
    c.note("n=4 max bin z " + fmt(r4.max_reference_z) + "; sup |hist - gauss| " + fmt(r4.sup_gaussian_deviation) +
           " (n=4) vs " + fmt(r64.sup_gaussian_deviation) + " (n=64)");
}

// AC11 ------------------------------------------------------------------------
std::vector<std::string> produce_csvs(const AcceptanceOptions& o) {
    std::vector<std::string> out;
    const auto baker = SystemDescriptor::baker();
    const auto a = set("box:0,0.5;0,0.5");
    out.push_back(mixing_csv(correlation_scan(baker, a, a, {1, 2, 4, 8}, 200'000, sub_seed(o, 1100), false)));
    out.push_back(mixing_csv(uniform_correlation_scan(baker, a, a, {1, 2}, 8, 50'000, sub_seed(o, 1101), false)));
    const auto g = parse_test_function("ind:box:0,0.5;0,1", baker.domain());
    out.push_back(chaos_csv({chaos_sweep(baker, g, {8, 32, 128}, resolve_nu(baker, g, 0, 0), 50'000, sub_seed(o, 1102))}));
    const auto cat = SystemDescriptor::cat();
    const auto h = parse_test_function("trig:cos:1,0", cat.domain());
    out.push_back(chaos_csv({chaos_sweep(cat, h, {4, 16, 64}, resolve_nu(cat, h, 0, 0), 50'000, sub_seed(o, 1103))}));
    const auto phi = SystemDescriptor::product_phi();
    out.push_back(stationary_csv(stationary_scan(phi, set("cyl:1:[0.5,0.75);2:[0,0.5)"), {1, 2, 4, 8}, 100'000,
                                                 sub_seed(o, 1104)),
                                 true));
    out.push_back(histogram_csv(kac::marginal_density(16, {}, 200'000, sub_seed(o, 1105))));
    return out;
}

void reproducibility(Check& c, const AcceptanceOptions& o) {
    const unsigned saved = worker_count();
    std::vector<std::string> first, second;
    try {
        set_worker_count(1);
        first = produce_csvs(o);
        set_worker_count(3);
        second = produce_csvs(o);
    } catch (...) {
        set_worker_count(saved);
        throw;
    }
    set_worker_count(saved);
    std::size_t same = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const bool eq = first[i] == second[i];
        same += eq ? 1 : 0;
        c.expect(eq, "CSV " + std::to_string(i) + " differs between reruns");
    }
    c.note(std::to_string(same) + "/" + std::to_string(first.size()) +
           " CSVs (mixing, uniform mixing, 2 chaos sweeps, stationary, histogram) bit-identical across reruns with 1 and 3 workers");
}

struct Criterion {
    const char* id;
    const char* title;
    double time_limit;  ///< seconds; 0 = none
    void (*run)(Check&, const AcceptanceOptions&);
};

const Criterion kCriteria[] = {
    {"AC1", "baker mixing exactness", 30, baker_mixing},
    {"AC2", "uniform correlation collapse (baker)", 0, uniform_collapse},
    {"AC3", "product-phi stationarity bound", 60, phi_stationarity},
    {"AC4", "product-phi exact factorization", 0, phi_factorization},
    {"AC5", "baker chaos rate", 120, baker_rate},
    {"AC6", "chaos decay on cat and product shifts", 0, chaos_decay},
    {"AC7", "symmetrization invariance", 0, symmetrization},
    {"AC8", "decomposition identity", 0, decomposition},
    {"AC9", "marginal factorization", 60, factorization},
    {"AC10", "Kac sphere marginal density", 0, marginal_density},
    {"AC11", "reproducibility", 0, reproducibility},
};

}  // namespace

std::vector<std::string> criterion_ids() {
    std::vector<std::string> ids;
    for (const auto& c : kCriteria) ids.emplace_back(c.id);
    return ids;
}

CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& options) {
    for (const auto& crit : kCriteria) {
        if (id != crit.id) continue;
        CriterionResult r{crit.id, crit.title, false, {}, 0.0};
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            crit.run(check, options);
        } catch (const std::exception& e) {
            check.expect(false, std::string("error: ") + e.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (crit.time_limit > 0) {
            check.expect(r.seconds < crit.time_limit, "runtime " + fmt(r.seconds) + " s over " + fmt(crit.time_limit) + " s");
        }
        r.passed = check.passed();
        r.detail = check.detail();
        return r;
    }
    throw ParseError("unknown acceptance criterion '" + id + "'");
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<std::string>& only) {
    std::vector<CriterionResult> out;
    for (const auto& id : only.empty() ? criterion_ids() : only) out.push_back(run_criterion(id, options));
    return out;
}

std::string format_result(const CriterionResult& r) {
    char t[32];
    std::snprintf(t, sizeof t, "%.2f s", r.seconds);
    return std::string(r.passed ? "PASS " : "FAIL ") + r.id + "  " + r.title + "  " + r.detail + "  (" + t + ")";
}

}  // namespace orbitchaos::cli
