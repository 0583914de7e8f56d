#include "orbitchaos/core/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace orbitchaos {

void CompensatedSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
        compensation_ += (sum_ - t) + v;
    } else {
        compensation_ += (v - t) + sum_;
    }
    sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.compensation_);
}

MonteCarloEstimate merge_estimates(const MonteCarloEstimate& a, const MonteCarloEstimate& b) noexcept {
    if (a.n_samples == 0) return b;
    if (b.n_samples == 0) return a;
    const double na = static_cast<double>(a.n_samples);
    const double nb = static_cast<double>(b.n_samples);
    const double n = na + nb;

    MonteCarloEstimate out;
    out.n_samples = a.n_samples + b.n_samples;
    out.batch_count = a.batch_count + b.batch_count;
    out.seed = std::min(a.seed, b.seed);
    out.value = (na * a.value + nb * b.value) / n;

    // M2 = (n - 1) s^2 and s = se * sqrt(n).
    const auto m2_of = [](const MonteCarloEstimate& e, double ne) {
        return ne > 1.0 ? e.std_error * e.std_error * ne * (ne - 1.0) : 0.0;
    };
    const double delta = b.value - a.value;
    const double m2 = (m2_of(a, na) + m2_of(b, nb)) + delta * delta * (na * nb / n);
    const double variance = m2 / (n - 1.0);
    out.std_error = std::sqrt(variance / n);
    return out;
}

void MeanAccumulator::add(double v) noexcept {
    ++n_;
    sum_.add(v);
    const double delta = v - welford_mean_;
    welford_mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - welford_mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double delta = other.welford_mean_ - welford_mean_;
    m2_ += other.m2_ + delta * delta * na * nb / (na + nb);
    welford_mean_ += delta * nb / (na + nb);
    n_ += other.n_;
    sum_.merge(other.sum_);
}

double MeanAccumulator::mean() const noexcept {
    return n_ == 0 ? 0.0 : sum_.value() / static_cast<double>(n_);
}

double MeanAccumulator::sample_variance() const noexcept {
    return n_ < 2 ? 0.0 : std::max(0.0, m2_) / static_cast<double>(n_ - 1);
}

MonteCarloEstimate MeanAccumulator::estimate(std::uint64_t seed, std::uint64_t batches) const noexcept {
    MonteCarloEstimate e;
    e.value = mean();
    e.std_error = n_ == 0 ? 0.0 : std::sqrt(sample_variance() / static_cast<double>(n_));
    e.n_samples = n_;
    e.seed = seed;
    e.batch_count = batches;
    return e;
}

void CovarianceAccumulator::add(double a, double b) noexcept {
    ++n_;
    a_.add(a);
    b_.add(b);
    ab_.add(a * b);
    a2_.add(a * a);
    b2_.add(b * b);
    a2b_.add(a * a * b);
    ab2_.add(a * b * b);
    a2b2_.add(a * a * b * b);
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) noexcept {
    n_ += other.n_;
    a_.merge(other.a_);
    b_.merge(other.b_);
    ab_.merge(other.ab_);
    a2_.merge(other.a2_);
    b2_.merge(other.b2_);
    a2b_.merge(other.a2b_);
    ab2_.merge(other.ab2_);
    a2b2_.merge(other.a2b2_);
}

double CovarianceAccumulator::mean_a() const noexcept {
    return n_ == 0 ? 0.0 : a_.value() / static_cast<double>(n_);
}

double CovarianceAccumulator::mean_b() const noexcept {
    return n_ == 0 ? 0.0 : b_.value() / static_cast<double>(n_);
}

double CovarianceAccumulator::mean_ab() const noexcept {
    return n_ == 0 ? 0.0 : ab_.value() / static_cast<double>(n_);
}

double CovarianceAccumulator::covariance() const noexcept {
    return mean_ab() - mean_a() * mean_b();
}

double CovarianceAccumulator::covariance_std_error() const noexcept {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double ea = mean_a();
    const double eb = mean_b();
    const double eab = mean_ab();
    const double ea2 = a2_.value() / n;
    const double eb2 = b2_.value() / n;
    const double ea2b = a2b_.value() / n;
    const double eab2 = ab2_.value() / n;
    const double ea2b2 = a2b2_.value() / n;
    // E[(a - ea)^2 (b - eb)^2] expanded in raw moments.
    const double fourth = ea2b2 - 2.0 * eb * ea2b + eb * eb * ea2 - 2.0 * ea * eab2 + 4.0 * ea * eb * eab -
                          2.0 * ea * eb * eb * ea + ea * ea * eb2 - 2.0 * ea * ea * eb * eb + ea * ea * eb * eb;
    const double cov = eab - ea * eb;
    const double variance = std::max(0.0, fourth - cov * cov) * n / (n - 1.0);
    return std::sqrt(variance / n);
}

}  // namespace orbitchaos
