#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <cstdint>
#include <functional>

namespace oracle {

/// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Composite 5-point Gauss-Legendre rule; nodes are interior, so f may jump
/// at a and b.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels = 64) {
    static constexpr double nodes[] = {0.0, 0.5384693101056831, 0.9061798459386640};
    static constexpr double weights[] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = weights[0] * f(mid);
        for (int i = 1; i < 3; ++i) s += weights[i] * (f(mid - 0.5 * h * nodes[i]) + f(mid + 0.5 * h * nodes[i]));
        total += 0.5 * h * s;
    }
    return total;
}

/// Integral of f over [lo, hi) split at the given breakpoints.
inline double piecewise(const std::function<double(double)>& f, double lo, double hi, std::initializer_list<double> cuts) {
    double total = 0.0, left = lo;
    for (double c : cuts) {
        if (c <= left || c >= hi) continue;
        total += gauss_legendre(f, left, c);
        left = c;
    }
    return total + gauss_legendre(f, left, hi);
}

/// Density phi_k written out from its definition: 1 up to 1 - 2^(1-k), 2 up
/// to 1 - 2^-k, 0 beyond.
inline double phi(int k, double x) {
    const double a = 1.0 - std::pow(2.0, 1 - k);
    const double b = 1.0 - std::pow(2.0, -k);
    if (x < 0.0 || x > b) return 0.0;
    return x <= a ? 1.0 : 2.0;
}

inline double phi_integral(int k, const std::function<double(double)>& f, double lo, double hi) {
    return piecewise([&](double x) { return phi(k, x) * f(x); }, lo, hi,
                     {1.0 - std::pow(2.0, 1 - k), 1.0 - std::pow(2.0, -k)});
}

/// J_n for the indicator of {x < 1/2} under the baker map: g(S^i x) is binary
/// digit i + 1 of x, so enumerate all 2^n digit patterns.
inline double baker_strip_j(int n) {
    double total = 0.0;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << n); ++pattern) {
        const double mean = static_cast<double>(__builtin_popcountll(pattern)) / n;
        total += (mean - 0.5) * (mean - 0.5);
    }
    return total / static_cast<double>(std::uint64_t{1} << n);
}

/// Same for the quadrant [0,1/2)^2: for i >= 1 the point S^i x lies in it
/// exactly when binary digits i and i + 1 of x are both 0, so enumerate n + 1
/// digits. nu is the quadrant's area 1/4.
inline double baker_quadrant_j(int n) {
    double total = 0.0;
    const std::uint64_t patterns = std::uint64_t{1} << (n + 1);
    for (std::uint64_t d = 0; d < patterns; ++d) {
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += ((d >> i) & 3u) == 0;
        const double dev = static_cast<double>(hits) / n - 0.25;
        total += dev * dev;
    }
    return total / static_cast<double>(patterns);
}

/// Normalizer of (1 - x^2/n)^((n-3)/2) on |x| < sqrt(n): 1 / (sqrt(n) B(1/2, (n-1)/2)).
inline double beta_normalizer(int n) { return 1.0 / (std::sqrt(static_cast<double>(n)) * std::beta(0.5, 0.5 * (n - 1))); }

}  // namespace oracle
