#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's transforms; sums are evaluated directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;

// The phase is reduced to one cycle before scaling by 2 pi, so long tones
// keep ulp-level phase accuracy (exact when f_hz * k is representable).
inline cvec tone(std::size_t n, double f_hz, double fs, cplx amp = 1.0) {
    cvec x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double cycles = std::fmod(f_hz * static_cast<double>(k), fs) / fs;
        x[k] = amp * std::polar(1.0, 2.0 * kPi * cycles);
    }
    return x;
}

// DTFT at a single frequency (cycles/sample), direct summation.
inline cplx dtft(const cvec& x, double f_norm) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        acc += x[k] * std::polar(1.0, -2.0 * kPi * f_norm * static_cast<double>(k));
    return acc;
}

// Frequency (Hz) maximizing |DTFT| on a grid of `points` between lo and hi.
inline double dense_peak(const cvec& x, double fs, double lo, double hi, std::size_t points) {
    double best_f = lo, best = -1.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double f = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double m = std::abs(dtft(x, f / fs));
        if (m > best) {
            best = m;
            best_f = f;
        }
    }
    return best_f;
}

// Direct O(N^2) DFT magnitudes.
inline std::vector<double> dft_magnitude(const cvec& x) {
    const std::size_t n = x.size();
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k)
        mag[k] = std::abs(dtft(x, static_cast<double>(k) / static_cast<double>(n)));
    return mag;
}

inline double norm(const cvec& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

inline double rel_l2(const cvec& got, const cvec& want, std::size_t skip = 0) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = skip; i + skip < want.size(); ++i) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return std::sqrt(num / den);
}

// Geometric over arithmetic mean, evaluated with products (small inputs only).
inline double gm_over_am(const std::vector<double>& v) {
    double prod = 1.0, sum = 0.0;
    for (double x : v) {
        prod *= x;
        sum += x;
    }
    const auto n = static_cast<double>(v.size());
    return std::pow(prod, 1.0 / n) / (sum / n);
}

// Seeded generator helpers for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    cplx complex_normal() {
        std::normal_distribution<double> g(0.0, 1.0);
        const double re = g(rng_);
        return {re, g(rng_)};
    }
    cplx nonzero_scalar() {
        cplx s;
        do s = complex_normal() * std::exp(uniform(-5.0, 5.0)); while (std::abs(s) < 1e-9);
        return s;
    }
    cvec complex_vector(std::size_t n) {
        cvec v(n);
        for (auto& x : v) x = complex_normal();
        return v;
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace oracle
