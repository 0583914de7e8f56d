#include "orbitchaos/kacsphere/kacsphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/parallel.hpp"
#include "orbitchaos/dynamics/system.hpp"

namespace orbitchaos::kac {

namespace {

void check_dimension(int n) {
    if (n < 2) throw DomainMismatch("sphere dimension must be >= 2");
}

double profile(int n, double x) {
    const double t = 1.0 - x * x / static_cast<double>(n);
    if (t <= 0.0) return 0.0;
    return std::pow(t, 0.5 * (n - 3));
}

double profile_integral(int n, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([n](double x) { return profile(n, x); }, a, b, 1e-13);
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

SpherePoint sample_sphere(int n, SampleStream& rng) {
    check_dimension(n);
    return sample(SystemDescriptor::sphere_static(n), rng, 0).as_sphere();
}

SpherePoint sample_sphere(int n, std::uint64_t seed) {
    SampleStream rng(seed);
    return sample_sphere(n, rng);
}

MonteCarloEstimate sphere_expectation(int n, const std::function<double(const std::vector<double>&)>& f,
                                      std::uint64_t n_samples, std::uint64_t seed) {
    check_dimension(n);
    const auto sys = SystemDescriptor::sphere_static(n);
    std::uint64_t batches = 0;
    const auto acc = run_batched<MeanAccumulator>(
        n_samples, seed,
        [&](SampleStream& rng, MeanAccumulator& out) { out.add(f(sample(sys, rng, 0).as_sphere().x)); }, &batches);
    return acc.estimate(seed, batches);
}

MonteCarloEstimate coordinate_moment(int n, const std::vector<std::pair<int, int>>& powers, std::uint64_t n_samples,
                                     std::uint64_t seed) {
    check_dimension(n);
    for (const auto& [c, p] : powers) {
        if (c < 0 || c >= n) throw DomainMismatch("coordinate index out of range");
        if (p < 0) throw DomainMismatch("negative exponent");
    }
    return sphere_expectation(
        n,
        [&powers](const std::vector<double>& x) {
            double v = 1.0;
            for (const auto& [c, p] : powers) v *= std::pow(x[static_cast<std::size_t>(c)], p);
            return v;
        },
        n_samples, seed);
}

MonteCarloEstimate marginal_moment(int n, int a, int b, std::uint64_t n_samples, std::uint64_t seed) {
    return coordinate_moment(n, {{0, a}, {1, b}}, n_samples, seed);
}

double gaussian_moment(int p) {
    if (p < 0) throw DomainMismatch("negative moment order");
    if (p % 2 == 1) return 0.0;
    double v = 1.0;
    for (int k = p - 1; k > 1; k -= 2) v *= k;
    return v;
}

double sphere_moment_reference(int n, int a, int b) {
    check_dimension(n);
    if (a < 0 || b < 0) throw DomainMismatch("negative exponent");
    if (a % 2 == 1 || b % 2 == 1) return 0.0;
    const int half = (a + b) / 2;
    double v = gaussian_moment(a) * gaussian_moment(b);
    for (int j = 0; j < half; ++j) v *= static_cast<double>(n) / (n + 2 * j);
    return v;
}

ScalarFunction ScalarFunction::monomial(double coefficient, int power) {
    if (power < 0) throw DomainMismatch("negative exponent");
    std::string name = power == 0 ? std::to_string(coefficient) : std::to_string(coefficient) + "*x^" + std::to_string(power);
    return ScalarFunction(std::move(name), [coefficient, power](double x) { return coefficient * std::pow(x, power); },
                          true, coefficient, power);
}

ScalarFunction ScalarFunction::general(std::string name, std::function<double(double)> f) {
    return ScalarFunction(std::move(name), std::move(f), false, 0.0, 0);
}

double ScalarFunction::gaussian_integral() const {
    if (is_monomial_) return coefficient_ * gaussian_moment(power_);
    const auto weighted = [this](double x) {
        return f_(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    };
    double error = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    double v = 0.0;
    try {
        v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(weighted, -inf, inf, 15, 1e-12, &error);
    } catch (const std::exception& e) {
        throw NonIntegrable("Gaussian integral of " + name_ + " failed: " + e.what());
    }
    if (!std::isfinite(v) || !(error <= 1e-10 * std::max(1.0, std::fabs(v)))) {
        throw NonIntegrable("Gaussian integral of " + name_ + " did not converge");
    }
    return v;
}

ChaoticityGap sphere_chaoticity_gap(int n, const ScalarFunction& phi1, const ScalarFunction& phi2,
                                    std::uint64_t n_samples, std::uint64_t seed) {
    ChaoticityGap out;
    out.rhs = phi1.gaussian_integral() * phi2.gaussian_integral();
    out.lhs = sphere_expectation(
        n, [&](const std::vector<double>& x) { return phi1(x[0]) * phi2(x[1]); }, n_samples, seed);
    out.gap = std::fabs(out.lhs.value - out.rhs);
    return out;
}

double marginal_normalizer(int n) {
    if (n < 2) throw DomainMismatch("sphere dimension must be >= 2");
    const double r = std::sqrt(static_cast<double>(n));
    return 1.0 / profile_integral(n, -r, r);
}

double marginal_reference_density(int n, double x) { return marginal_normalizer(n) * profile(n, x); }

MarginalReport marginal_density(int n, const GridSpec& grid, std::uint64_t n_samples, std::uint64_t seed) {
    if (n < 4) throw DomainMismatch("marginal density needs n >= 4");
    if (grid.bins < 1 || !(grid.lo < grid.hi)) throw DomainMismatch("histogram grid needs lo < hi and bins >= 1");
    const double r = std::sqrt(static_cast<double>(n));
    const double lo = std::max(grid.lo, -r);
    const double hi = std::min(grid.hi, r);
    if (!(lo < hi)) throw DomainMismatch("histogram grid lies outside [-sqrt(n), sqrt(n)]");
    const double width = (hi - lo) / grid.bins;
    const auto sys = SystemDescriptor::sphere_static(n);

    struct Counts {
        std::vector<std::uint64_t> bins;
        std::uint64_t total = 0;
        void merge(const Counts& o) {
            if (bins.size() < o.bins.size()) bins.resize(o.bins.size(), 0);
            for (std::size_t i = 0; i < o.bins.size(); ++i) bins[i] += o.bins[i];
            total += o.total;
        }
    };
    const auto counts = run_batched<Counts>(n_samples, seed, [&](SampleStream& rng, Counts& out) {
        if (out.bins.empty()) out.bins.assign(static_cast<std::size_t>(grid.bins), 0);
        const double x = sample(sys, rng, 0).as_sphere().x[0];
        ++out.total;
        if (x < lo || x >= hi) return;
        const auto b = std::min(static_cast<std::size_t>((x - lo) / width), static_cast<std::size_t>(grid.bins - 1));
        ++out.bins[b];
    });

    MarginalReport report;
    report.n = n;
    report.n_samples = counts.total;
    report.seed = seed;
    const double c = marginal_normalizer(n);
    const double total = static_cast<double>(std::max<std::uint64_t>(counts.total, 1));
    std::uint64_t inside = 0;
    for (int i = 0; i < grid.bins; ++i) {
        HistogramBin bin;
        bin.left = lo + width * i;
        bin.right = i + 1 == grid.bins ? hi : lo + width * (i + 1);
        const std::uint64_t k = i < static_cast<int>(counts.bins.size()) ? counts.bins[static_cast<std::size_t>(i)] : 0;
        inside += k;
        bin.mass = static_cast<double>(k) / total;
        bin.std_error = std::sqrt(bin.mass * (1.0 - bin.mass) / total);
        bin.reference_mass = c * profile_integral(n, bin.left, bin.right);
        bin.gaussian_mass = gaussian_cdf(bin.right) - gaussian_cdf(bin.left);
        const double w = bin.right - bin.left;
        report.sup_reference_deviation = std::max(report.sup_reference_deviation, std::fabs(bin.mass - bin.reference_mass) / w);
        report.sup_gaussian_deviation = std::max(report.sup_gaussian_deviation, std::fabs(bin.mass - bin.gaussian_mass) / w);
        const double null_se = std::sqrt(bin.reference_mass * (1.0 - bin.reference_mass) / total);
        if (null_se > 0.0) {
            report.max_reference_z = std::max(report.max_reference_z, std::fabs(bin.mass - bin.reference_mass) / null_se);
        }
        report.bins.push_back(bin);
    }
    report.tail_mass = static_cast<double>(counts.total - inside) / total;
    return report;
}

}  // namespace orbitchaos::kac
