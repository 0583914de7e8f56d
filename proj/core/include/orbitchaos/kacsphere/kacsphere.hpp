#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "orbitchaos/core/estimate.hpp"
#include "orbitchaos/core/point.hpp"
#include "orbitchaos/core/random.hpp"

namespace orbitchaos::kac {

/// Uniform point of the sphere sum x_i^2 = n in R^n: independent standard
/// normals rescaled to radius sqrt(n). All-zero draws are redrawn; ten in a
/// row raise DegenerateSample.
SpherePoint sample_sphere(int n, SampleStream& rng);
SpherePoint sample_sphere(int n, std::uint64_t seed);

/// Monte Carlo E[f(x)] under the uniform sphere measure.
MonteCarloEstimate sphere_expectation(int n, const std::function<double(const std::vector<double>&)>& f,
                                      std::uint64_t n_samples, std::uint64_t seed);

/// E[x_1^a x_2^b].
MonteCarloEstimate marginal_moment(int n, int a, int b, std::uint64_t n_samples, std::uint64_t seed);

/// Exact E[x_1^a x_2^b] on the radius-sqrt(n) sphere:
/// n^((a+b)/2) (a-1)!! (b-1)!! / (n (n+2) ... (n+a+b-2)) for even a, b, else 0.
double sphere_moment_reference(int n, int a, int b);

/// E[prod x_c^p] over (coordinate index (0-based), exponent) pairs.
MonteCarloEstimate coordinate_moment(int n, const std::vector<std::pair<int, int>>& powers, std::uint64_t n_samples,
                                     std::uint64_t seed);

/// Real function of one coordinate with a known standard-Gaussian integral:
/// monomials c x^p in closed form, anything else by quadrature.
class ScalarFunction {
public:
    static ScalarFunction monomial(double coefficient, int power);
    static ScalarFunction constant(double c) { return monomial(c, 0); }
    static ScalarFunction general(std::string name, std::function<double(double)> f);

    double operator()(double x) const { return f_(x); }
    const std::string& name() const noexcept { return name_; }
    /// Integral against the standard Gaussian. Throws NonIntegrable when the
    /// quadrature does not converge to a finite value.
    double gaussian_integral() const;

private:
    ScalarFunction(std::string name, std::function<double(double)> f, bool is_monomial, double c, int p)
        : name_(std::move(name)), f_(std::move(f)), is_monomial_(is_monomial), coefficient_(c), power_(p) {}
    std::string name_;
    std::function<double(double)> f_;
    bool is_monomial_;
    double coefficient_;
    int power_;
};

/// (p - 1)!! for even p >= 0, the p-th standard Gaussian moment; 0 for odd p.
double gaussian_moment(int p);

struct ChaoticityGap {
    MonteCarloEstimate lhs;  ///< E[phi_1(x_1) phi_2(x_2)]
    double rhs = 0.0;        ///< prod of standard-Gaussian integrals
    double gap = 0.0;
};

ChaoticityGap sphere_chaoticity_gap(int n, const ScalarFunction& phi1, const ScalarFunction& phi2,
                                    std::uint64_t n_samples, std::uint64_t seed);

struct GridSpec {
    double lo = -4.0;
    double hi = 4.0;
    int bins = 64;
};

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    double mass = 0.0;  ///< fraction of all samples with x_1 in [left, right)
    double std_error = 0.0;
    double reference_mass = 0.0;  ///< exact marginal of the sphere measure
    double gaussian_mass = 0.0;
};

struct MarginalReport {
    int n = 0;
    int m = 1;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<HistogramBin> bins;
    double tail_mass = 0.0;  ///< samples outside the grid
    double sup_reference_deviation = 0.0;  ///< max |mass - reference_mass| / width
    double sup_gaussian_deviation = 0.0;   ///< max |mass - gaussian_mass| / width
    /// max |mass - reference_mass| / se, with se the binomial standard error
    /// of the reference mass (so empty bins are not exempt).
    double max_reference_z = 0.0;
};

/// c_n with c_n (1 - x^2/n)^((n-3)/2) a probability density on |x| < sqrt(n),
/// computed by quadrature.
double marginal_normalizer(int n);
/// Density of x_1 under the uniform sphere measure.
double marginal_reference_density(int n, double x);

/// Histogram of x_1 on the grid intersected with [-sqrt(n), sqrt(n)].
/// Requires n >= 4; throws DomainMismatch when the grid misses the support.
MarginalReport marginal_density(int n, const GridSpec& grid, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace orbitchaos::kac
