#pragma once

#include <cstdint>

namespace orbitchaos {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept;
    void merge(const CompensatedSum& other) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// Universal return type of the stochastic estimators.
struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;  ///< sample standard deviation / sqrt(n_samples)
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;  ///< master seed the samples were drawn under
    std::uint64_t batch_count = 0;

    /// Exact (zero-variance) value, e.g. from a closed form or the dyadic oracle.
    static MonteCarloEstimate exact(double v) noexcept { return {v, 0.0, 0, 0, 0}; }
};

/// Pools two estimates of the same statistic. The pooled variance is
/// reconstructed from each side's standard error, so the result matches a
/// single pass over the union of both sample sets. Symmetric in its arguments.
MonteCarloEstimate merge_estimates(const MonteCarloEstimate& a, const MonteCarloEstimate& b) noexcept;

/// Streaming mean / variance accumulator (compensated sum for the mean,
/// Welford / Chan update for the second central moment).
class MeanAccumulator {
public:
    void add(double v) noexcept;
    void merge(const MeanAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept;
    double sample_variance() const noexcept;
    MonteCarloEstimate estimate(std::uint64_t seed, std::uint64_t batches = 1) const noexcept;

private:
    std::uint64_t n_ = 0;
    CompensatedSum sum_;
    double welford_mean_ = 0.0;
    double m2_ = 0.0;
};

/// Sufficient statistics for the covariance of a pair (a, b), enough to give
/// the covariance and the standard error of its plug-in estimator (delta
/// method, influence function (a - Ea)(b - Eb) - cov).
class CovarianceAccumulator {
public:
    void add(double a, double b) noexcept;
    void merge(const CovarianceAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean_a() const noexcept;
    double mean_b() const noexcept;
    double mean_ab() const noexcept;
    /// E[ab] - E[a]E[b] from the same sample set.
    double covariance() const noexcept;
    double covariance_std_error() const noexcept;

private:
    std::uint64_t n_ = 0;
    CompensatedSum a_, b_, ab_, a2_, b2_, a2b_, ab2_, a2b2_;
};

}  // namespace orbitchaos
