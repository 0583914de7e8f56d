#include "orbitchaos/cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "orbitchaos/chaos/chaos.hpp"
#include "orbitchaos/cli/acceptance.hpp"
#include "orbitchaos/cli/csv.hpp"
#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/grammar.hpp"
#include "orbitchaos/core/parallel.hpp"
#include "orbitchaos/kacsphere/kacsphere.hpp"
#include "orbitchaos/mixing/mixing.hpp"

namespace orbitchaos::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Common {
    std::string system = "baker";
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t samples = 0;  ///< 0 = per-system default
    std::string out_dir = ".";
    bool assert_mode = false;
    unsigned threads = 0;
};

/// What a subcommand produced: files to write, gate violations, extra
/// manifest fields and lines for stdout.
struct Outcome {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> violations;
    json extra = json::object();
    std::vector<std::string> messages;
};

std::uint64_t default_samples(const SystemDescriptor& sys) {
    return sys.space() == SpaceKind::product ? 100'000 : 1'000'000;
}

std::uint64_t samples_for(const Common& c, const SystemDescriptor& sys) {
    return c.samples > 0 ? c.samples : default_samples(sys);
}

std::string fmt(double v) { return number(v); }

// mixing / uniform-mixing ------------------------------------------------------

struct MixingArgs {
    std::string set_a;
    std::string set_b;
    std::vector<int> lags = kDefaultLags;
    int i_max = kDefaultIMax;
    bool exact = false;
};

Outcome run_mixing(const Common& c, const MixingArgs& m, bool uniform) {
    const auto sys = make_system(c.system);
    const auto a = parse_event_set(m.set_a);
    const auto b = m.set_b.empty() ? a : parse_event_set(m.set_b);
    const auto n = samples_for(c, sys);
    const auto report = uniform ? uniform_correlation_scan(sys, a, b, m.lags, m.i_max, n, c.seed, m.exact)
                                : correlation_scan(sys, a, b, m.lags, n, c.seed, m.exact);
    Outcome o;
    o.files.emplace_back(uniform ? "uniform_mixing.csv" : "mixing.csv", mixing_csv(report));
    if (c.assert_mode) {
        const double upper = uniform ? 2.0 : 1.0;
        const bool oracle = exact_method(sys, a, b).has_value();
        for (const auto& r : report.rows) {
            const auto& e = r.estimate;
            if (e.value < 0.0 || e.value > upper) o.violations.push_back("k=" + std::to_string(r.k) + " value out of range");
            if (r.method != Method::mc && e.std_error != 0.0) o.violations.push_back("exact row with nonzero std_error");
            if (r.method == Method::mc && oracle) {
                double exact = 0.0;
                try {
                    exact = uniform ? uniform_correlation_exact(sys, a, b, r.k, m.i_max).estimate.value
                                    : correlation_exact(sys, a, b, r.k);
                } catch (const ResolutionOverflow&) {
                    continue;
                }
                if (std::fabs(e.value - exact) > 3.0 * e.std_error + 1e-12) {
                    o.violations.push_back("k=" + std::to_string(r.k) + " MC " + fmt(e.value) + " vs exact " + fmt(exact));
                }
            }
        }
    }
    return o;
}

// stationary ------------------------------------------------------------------

struct StationaryArgs {
    std::string set;
    std::vector<int> lags = kDefaultLags;
};

Outcome run_stationary(const Common& c, const StationaryArgs& s) {
    const auto sys = make_system(c.system);
    const auto a = parse_event_set(s.set);
    const auto scan = stationary_scan(sys, a, s.lags, samples_for(c, sys), c.seed);
    const bool phi = sys.kind == SystemKind::product_phi;
    Outcome o;
    o.files.emplace_back("stationary.csv", stationary_csv(scan, phi));
    if (c.assert_mode) {
        for (const auto& r : scan.rows) {
            if (phi && r.gap && r.k >= 1 && *r.gap > tail_bound_check(r.k).bound + 3.0 * r.estimate.std_error) {
                o.violations.push_back("k=" + std::to_string(r.k) + " gap exceeds tail bound");
            }
            if (sys.is_measure_preserving && r.exact && scan.nu && *r.exact_gap > 1e-12) {
                o.violations.push_back("k=" + std::to_string(r.k) + " preimage measure differs from mu(A)");
            }
        }
    }
    return o;
}

// chaos-sweep -----------------------------------------------------------------

struct ChaosArgs {
    std::vector<std::string> functions;
    std::vector<int> n_grid = kDefaultNGrid;
    std::uint64_t nu_samples = 100'000;
};

bool is_constant(const BoundedTestFunction& g) {
    const auto* p = std::get_if<PolynomialFn>(&g.variant());
    return p != nullptr && p->terms.size() == 1 && p->terms[0].powers.empty();
}

Outcome run_chaos(const Common& c, const ChaosArgs& a) {
    const auto sys = make_system(c.system);
    std::vector<BoundedTestFunction> gs;
    for (const auto& f : a.functions) gs.push_back(parse_test_function(f, sys.domain()));
    if (gs.empty()) gs = default_test_functions(sys);
    if (gs.empty()) throw DomainMismatch("no test functions for system " + sys.id());
    const auto n = samples_for(c, sys);
    std::vector<ChaosSweepReport> reports;
    Outcome o;
    json fits = json::array();
    std::uint64_t index = 0;
    for (const auto& g : gs) {
        const auto nu = resolve_nu(sys, g, a.nu_samples, derive_seed(c.seed, 0x6e75 + index));
        reports.push_back(chaos_sweep(sys, g, a.n_grid, nu, n, derive_seed(c.seed, index++)));
        const auto& rep = reports.back();
        json fit = {{"g_id", rep.g_id}};
        if (rep.slope) {
            fit["slope"] = *rep.slope;
            fit["half_width"] = *rep.slope_half_width;
            o.messages.push_back(rep.g_id + ": log-log slope " + fmt(*rep.slope) + " +- " + fmt(*rep.slope_half_width));
        }
        fits.push_back(fit);
        if (c.assert_mode) {
            for (const auto& r : rep.rows) {
                if (r.j_n.value < -3.0 * r.j_n.std_error) o.violations.push_back(rep.g_id + " J_n below -3 se");
            }
            if (!is_constant(g) && rep.rows.size() >= 2) {
                for (std::size_t i = 1; i < rep.rows.size(); ++i) {
                    if (rep.rows[i].n > rep.rows[i - 1].n && !(rep.rows[i].j_n.value < rep.rows[i - 1].j_n.value)) {
                        o.violations.push_back(rep.g_id + " J_n not decreasing at n=" + std::to_string(rep.rows[i].n));
                    }
                }
                const auto& lo = rep.rows.front();
                const auto& hi = rep.rows.back();
                if (hi.n >= 16 * lo.n && !(hi.j_n.value < lo.j_n.value / 4.0)) {
                    o.violations.push_back(rep.g_id + " J_n did not fall below a quarter of its first value");
                }
            }
        }
    }
    o.extra["slope_fits"] = fits;
    o.files.emplace_back("chaos.csv", chaos_csv(reports));
    return o;
}

// marginal-test ---------------------------------------------------------------

struct MarginalArgs {
    std::vector<std::string> phis;
    int n = 16;
};

/// Exact value of the symmetrized one- or two-marginal for indicators of sets
/// the preimage oracle handles, using invariance to reduce the pair sum to
/// lags. nullopt when any factor is not such an indicator.
std::optional<double> exact_marginal(const SystemDescriptor& sys, const std::vector<BoundedTestFunction>& phis,
                                     int n) {
    if (!sys.is_measure_preserving) return std::nullopt;
    std::vector<EventSet> sets;
    for (const auto& g : phis) {
        const auto* ind = std::get_if<IndicatorFn>(&g.variant());
        if (ind == nullptr) return std::nullopt;
        sets.push_back(ind->set);
    }
    try {
        if (sets.size() == 1) return exact_preimage_measure(sys, sets[0], 0);
        double sum = 0.0;
        for (int d = 1; d < n; ++d) {
            const auto ab = exact_joint_measure(sys, sets[0], 0, sets[1], d);
            const auto ba = exact_joint_measure(sys, sets[1], 0, sets[0], d);
            if (!ab || !ba) return std::nullopt;
            sum += (n - d) * (*ab + *ba);
        }
        return sum / (static_cast<double>(n) * (n - 1));
    } catch (const Error&) {
        return std::nullopt;
    }
}

Outcome run_marginal(const Common& c, const MarginalArgs& a) {
    const auto sys = make_system(c.system);
    std::vector<BoundedTestFunction> phis;
    std::vector<double> nus;
    std::string ids;
    for (std::size_t i = 0; i < a.phis.size(); ++i) {
        phis.push_back(parse_test_function(a.phis[i], sys.domain()));
        nus.push_back(resolve_nu(sys, phis.back(), 100'000, derive_seed(c.seed, 0x6e75 + i)).value);
        ids += (i > 0 ? ";" : "") + to_string(phis.back());
    }
    const auto r = marginal_factorization_test(sys, phis, a.n, nus, samples_for(c, sys), c.seed);
    std::ostringstream csv;
    csv << kMarginalHeader << '\n'
        << csv_field(sys.id()) << ',' << csv_field(ids) << ',' << a.n << ',' << phis.size() << ',' << fmt(r.lhs.value)
        << ',' << fmt(r.lhs.std_error) << ',' << fmt(r.rhs) << ',' << fmt(r.gap) << ',' << r.lhs.n_samples << '\n';
    Outcome o;
    o.files.emplace_back("marginal.csv", csv.str());
    o.messages.push_back("lhs " + fmt(r.lhs.value) + " +- " + fmt(r.lhs.std_error) + ", rhs " + fmt(r.rhs));
    if (c.assert_mode) {
        if (const auto exact = exact_marginal(sys, phis, a.n)) {
            o.messages.push_back("exact finite-n marginal " + fmt(*exact));
            if (std::fabs(r.lhs.value - *exact) > 3.0 * r.lhs.std_error + 1e-12) {
                o.violations.push_back("marginal " + fmt(r.lhs.value) + " vs exact " + fmt(*exact));
            }
        }
    }
    return o;
}

// sphere ----------------------------------------------------------------------

struct SphereArgs {
    int n = 16;
    std::vector<int> moment;
    std::vector<int> gap;
    bool histogram = false;
    kac::GridSpec grid;
};

Outcome run_sphere(const Common& c, const SphereArgs& a) {
    Outcome o;
    const std::uint64_t samples = c.samples > 0 ? c.samples : 1'000'000;
    if (!a.moment.empty()) {
        if (a.moment.size() != 2) throw ParseError("--moment takes two exponents a,b");
        const auto m = kac::marginal_moment(a.n, a.moment[0], a.moment[1], samples, c.seed);
        const double ref = kac::sphere_moment_reference(a.n, a.moment[0], a.moment[1]);
        std::ostringstream csv;
        csv << kMomentHeader << '\n'
            << a.n << ',' << a.moment[0] << ',' << a.moment[1] << ',' << fmt(m.value) << ',' << fmt(m.std_error) << ','
            << m.n_samples << ',' << m.seed << ',' << m.batch_count << ',' << fmt(ref) << '\n';
        o.files.emplace_back("sphere_moment.csv", csv.str());
        o.messages.push_back("E[x1^" + std::to_string(a.moment[0]) + " x2^" + std::to_string(a.moment[1]) + "] = " +
                             fmt(m.value) + " +- " + fmt(m.std_error) + " (exact " + fmt(ref) + ")");
        if (c.assert_mode && std::fabs(m.value - ref) > 3.0 * m.std_error + 1e-12) {
            o.violations.push_back("moment off the exact value by more than 3 se");
        }
    }
    if (!a.gap.empty()) {
        if (a.gap.size() != 2) throw ParseError("--gap takes two monomial powers p1,p2");
        const auto p1 = kac::ScalarFunction::monomial(1.0, a.gap[0]);
        const auto p2 = kac::ScalarFunction::monomial(1.0, a.gap[1]);
        const auto g = kac::sphere_chaoticity_gap(a.n, p1, p2, samples, c.seed);
        std::ostringstream csv;
        csv << kMarginalHeader << '\n'
            << "sphere:" << a.n << ',' << csv_field("x^" + std::to_string(a.gap[0]) + ";x^" + std::to_string(a.gap[1]))
            << ',' << a.n << ",2," << fmt(g.lhs.value) << ',' << fmt(g.lhs.std_error) << ',' << fmt(g.rhs) << ','
            << fmt(g.gap) << ',' << g.lhs.n_samples << '\n';
        o.files.emplace_back("sphere_gap.csv", csv.str());
        o.messages.push_back("chaoticity gap " + fmt(g.gap) + " +- " + fmt(g.lhs.std_error));
        if (c.assert_mode) {
            const double ref = std::fabs(kac::sphere_moment_reference(a.n, a.gap[0], a.gap[1]) - g.rhs);
            if (std::fabs(g.gap - ref) > 3.0 * g.lhs.std_error + 1e-12) o.violations.push_back("gap off its exact value");
        }
    }
    if (a.histogram) {
        const auto r = kac::marginal_density(a.n, a.grid, samples, c.seed);
        o.files.emplace_back("histogram.csv", histogram_csv(r));
        o.extra["histogram"] = {{"tail_mass", r.tail_mass},
                                {"sup_reference_deviation", r.sup_reference_deviation},
                                {"sup_gaussian_deviation", r.sup_gaussian_deviation},
                                {"max_reference_z", r.max_reference_z}};
        o.messages.push_back("sup |hist - reference| " + fmt(r.sup_reference_deviation) + ", sup |hist - gaussian| " +
                             fmt(r.sup_gaussian_deviation));
        if (c.assert_mode) {
            double total = r.tail_mass;
            for (const auto& b : r.bins) total += b.mass;
            if (std::fabs(total - 1.0) > 1e-12) o.violations.push_back("histogram mass does not sum to 1");
            if (r.max_reference_z > 4.0) o.violations.push_back("histogram deviates from reference by > 4 se");
        }
    }
    if (o.files.empty()) throw ParseError("sphere needs --moment, --gap or --histogram");
    return o;
}

// decompose -------------------------------------------------------------------

struct DecomposeArgs {
    std::string set;
    int n = 8;
    std::string mode = "exact";
};

Outcome run_decompose(const Common& c, const DecomposeArgs& a) {
    const auto sys = make_system(c.system);
    const auto e1 = parse_event_set(a.set);
    const auto mode = a.mode == "exact" ? DecompositionMode::exact : DecompositionMode::mc;
    const auto d = prop33_decomposition(sys, e1, a.n, mode, samples_for(c, sys), c.seed);
    json j = {{"system", d.system},
              {"set", d.set},
              {"n", d.n},
              {"mode", a.mode},
              {"method", std::string(method_name(d.method))},
              {"nu", d.nu},
              {"total", d.total.value},
              {"total_std_error", d.total.std_error},
              {"pair_sum", d.pair_sum},
              {"pair_covariance", d.pair_covariance},
              {"pair_product", d.pair_product},
              {"diagonal", d.diagonal},
              {"cross", d.cross},
              {"nu_squared", d.nu_squared},
              {"residual", d.residual},
              {"lag_sums", d.lag_sums},
              {"n_samples", d.total.n_samples},
              {"seed", mode == DecompositionMode::mc ? c.seed : 0}};
    Outcome o;
    o.files.emplace_back("decomposition.json", j.dump(2) + "\n");
    o.messages.push_back("total " + fmt(d.total.value) + ", residual " + fmt(d.residual));
    if (c.assert_mode && d.residual > (mode == DecompositionMode::exact ? 1e-12 : 1e-9)) {
        o.violations.push_back("reconstruction residual " + fmt(d.residual));
    }
    return o;
}

// plotdata --------------------------------------------------------------------

Outcome run_plotdata(const std::vector<std::string>& inputs) {
    std::vector<std::string> texts;
    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot read " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        texts.push_back(ss.str());
    }
    Outcome o;
    o.files.emplace_back("plotdata.csv", plotdata_csv(texts));
    return o;
}

// accept ----------------------------------------------------------------------

Outcome run_accept(const Common& c, const std::vector<std::string>& only) {
    AcceptanceOptions opts;
    opts.seed = c.seed;
    const auto results = run_acceptance(opts, only);
    std::ostringstream csv;
    csv << "criterion,passed,seconds,detail\n";
    Outcome o;
    for (const auto& r : results) {
        csv << r.id << ',' << (r.passed ? "true" : "false") << ',' << number(r.seconds) << ',' << csv_field(r.detail) << '\n';
        o.messages.push_back(format_result(r));
        if (!r.passed) o.violations.push_back(r.id + " failed");
    }
    o.files.emplace_back("acceptance.csv", csv.str());
    return o;
}

// driver ----------------------------------------------------------------------

json config_echo(const CLI::App& sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const auto name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config") continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            std::string joined;
            for (std::size_t i = 0; i < res.size(); ++i) joined += (i > 0 ? "," : "") + res[i];
            j[name] = joined;
        } else if (opt->get_expected_min() == 0) {
            j[name] = "false";
        } else {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void add_common(CLI::App* sub, Common& c, bool with_system = true) {
    if (with_system) sub->add_option("--system", c.system, "System id: baker, cat, product-phi, product-shift:<inner>")->capture_default_str();
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--samples", c.samples, "Monte Carlo samples (0: 1e6 planar and sphere, 1e5 product)")->capture_default_str();
    sub->add_option("--out", c.out_dir, "Output directory")->envname("ORBITCHAOS_OUT")->capture_default_str();
    sub->add_flag("--assert", c.assert_mode, "Exit 2 when an acceptance threshold is violated");
    sub->add_option("--threads", c.threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
}

}  // namespace

std::uint64_t fnv1a(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"orbitchaos"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"orbitchaos: mixing, stationarity and chaos estimators for orbit-based measures"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "INI/TOML config file; command-line flags take precedence");
    app.require_subcommand(1);

    Common common;
    MixingArgs mix;
    StationaryArgs stat;
    ChaosArgs chaos;
    MarginalArgs marg;
    SphereArgs sph;
    DecomposeArgs dec;
    std::vector<std::string> plot_inputs;
    std::vector<std::string> only;

    auto* mixing = app.add_subcommand("mixing", "Correlation C_k(A, B) over a lag grid");
    auto* umixing = app.add_subcommand("uniform-mixing", "Uniform correlation U_k(A, B), sup over i <= I_max");
    for (auto* sub : {mixing, umixing}) {
        add_common(sub, common);
        sub->add_option("--set-a", mix.set_a, "Set A")->required();
        sub->add_option("--set-b", mix.set_b, "Set B (defaults to A)");
        sub->add_option("--k", mix.lags, "Lags")->delimiter(',')->capture_default_str();
        sub->add_flag("--exact", mix.exact, "Use the exact oracle (baker dyadic boxes, product-phi / identity shifts)");
    }
    umixing->add_option("--i-max", mix.i_max, "Truncation of the sup over i")->capture_default_str();

    auto* stationary = app.add_subcommand("stationary", "mu(S^-k A) against the stationary limit");
    add_common(stationary, common);
    stationary->add_option("--set", stat.set, "Set A")->required();
    stationary->add_option("--k", stat.lags, "Lags")->delimiter(',')->capture_default_str();

    auto* sweep = app.add_subcommand("chaos-sweep", "J_n(g) over an n grid");
    add_common(sweep, common);
    sweep->add_option("--g", chaos.functions, "Test function (repeatable; default: the system's shipped family)");
    sweep->add_option("--n", chaos.n_grid, "n grid")->delimiter(',')->capture_default_str();
    sweep->add_option("--nu-samples", chaos.nu_samples, "Samples for nu when it has no closed form")->capture_default_str();

    auto* marginal = app.add_subcommand("marginal-test", "Two-marginal factorization of the symmetrized mu_n");
    add_common(marginal, common);
    marginal->add_option("--phi", marg.phis, "Test function (give one or two)")->required();
    marginal->add_option("--n", marg.n, "Tuple length n")->capture_default_str();

    auto* sphere = app.add_subcommand("sphere", "Kac sphere moments, chaoticity gap and marginal density");
    add_common(sphere, common, false);
    sphere->add_option("--n", sph.n, "Sphere dimension")->capture_default_str();
    sphere->add_option("--moment", sph.moment, "Exponents a,b of E[x1^a x2^b]")->delimiter(',');
    sphere->add_option("--gap", sph.gap, "Monomial powers p1,p2 of the chaoticity gap")->delimiter(',');
    sphere->add_flag("--histogram", sph.histogram, "Histogram of x1 against the exact marginal and the Gaussian");
    sphere->add_option("--bins", sph.grid.bins, "Histogram bins")->capture_default_str();
    sphere->add_option("--lo", sph.grid.lo, "Histogram left end (clipped to -sqrt(n))")->capture_default_str();
    sphere->add_option("--hi", sph.grid.hi, "Histogram right end (clipped to sqrt(n))")->capture_default_str();

    auto* decompose = app.add_subcommand("decompose", "Terms of the J_n expansion for an indicator");
    add_common(decompose, common);
    decompose->add_option("--set", dec.set, "Set E1")->required();
    decompose->add_option("--n", dec.n, "n")->capture_default_str();
    decompose->add_option("--mode", dec.mode, "exact or mc")
        ->check(CLI::IsMember({"exact", "mc"}))
        ->capture_default_str();

    auto* plot = app.add_subcommand("plotdata", "Long-format CSV (experiment,x,y,y_err) from report CSVs");
    add_common(plot, common, false);
    plot->add_option("inputs", plot_inputs, "Report CSV files");

    auto* accept = app.add_subcommand("accept", "Run the acceptance criteria");
    add_common(accept, common, false);
    accept->add_option("--only", only, "Criterion ids, e.g. AC1,AC5")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        set_worker_count(common.threads);
        const auto& name = chosen->get_name();
        if (name == "mixing" || name == "uniform-mixing") {
            outcome = run_mixing(common, mix, name == "uniform-mixing");
        } else if (name == "stationary") {
            outcome = run_stationary(common, stat);
        } else if (name == "chaos-sweep") {
            outcome = run_chaos(common, chaos);
        } else if (name == "marginal-test") {
            outcome = run_marginal(common, marg);
        } else if (name == "sphere") {
            outcome = run_sphere(common, sph);
        } else if (name == "decompose") {
            outcome = run_decompose(common, dec);
        } else if (name == "plotdata") {
            outcome = run_plotdata(plot_inputs);
        } else {
            outcome = run_accept(common, only);
        }
    } catch (const Error& e) {
        err << "orbitchaos: " << e.what() << '\n';
        return kExitConfig;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    if (ec) {
        err << "orbitchaos: cannot create output directory " << common.out_dir << ": " << ec.message() << '\n';
        return kExitConfig;
    }
    json outputs = json::array();
    for (const auto& [file, content] : outcome.files) {
        const auto path = fs::path(common.out_dir) / file;
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) {
            err << "orbitchaos: cannot write " << path.string() << '\n';
            return kExitConfig;
        }
        outputs.push_back(file);
        out << "wrote " << path.string() << '\n';
    }

    const json config = config_echo(*chosen);
    const std::string config_text = chosen->get_name() + "\n" + config.dump();
    json manifest = {{"tool", "orbitchaos"},
                     {"version", std::string(kToolVersion)},
                     {"subcommand", chosen->get_name()},
                     {"config", config},
                     {"config_hash", "fnv1a64:" + hex64(fnv1a(config_text))},
                     {"seed", common.seed},
                     {"module_versions",
                      {{"core", std::string(kToolVersion)},
                       {"dynamics", std::string(kToolVersion)},
                       {"mixing", std::string(kToolVersion)},
                       {"chaos", std::string(kToolVersion)},
                       {"kacsphere", std::string(kToolVersion)},
                       {"cli", std::string(kToolVersion)}}},
                     {"grammar_version", std::string(kGrammarVersion)},
                     {"worker_count", worker_count()},
                     {"outputs", outputs},
                     {"wall_time_seconds", wall}};
    if (common.assert_mode) manifest["assert"] = {{"passed", outcome.violations.empty()}, {"violations", outcome.violations}};
    for (const auto& [k, v] : outcome.extra.items()) manifest[k] = v;
    std::ofstream(fs::path(common.out_dir) / "manifest.json") << manifest.dump(2) << '\n';

    for (const auto& m : outcome.messages) out << m << '\n';
    if (common.assert_mode && !outcome.violations.empty()) {
        for (const auto& v : outcome.violations) err << "assertion: " << v << '\n';
        return kExitAssert;
    }
    return kExitOk;
}

}  // namespace orbitchaos::cli
