#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace vafer {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Uniformly sampled complex baseband sequence.
struct ComplexSignal {
    cvec samples;
    double sample_rate = 0.0;

    ComplexSignal() = default;
    ComplexSignal(cvec s, double fs) : samples(std::move(s)), sample_rate(fs) {}
    ComplexSignal(std::size_t n, double fs) : samples(n), sample_rate(fs) {}

    std::size_t size() const { return samples.size(); }
    cplx& operator[](std::size_t i) { return samples[i]; }
    const cplx& operator[](std::size_t i) const { return samples[i]; }

    // Throws ConfigError on empty, non-finite, or bad sample rate.
    void validate() const;
};

double norm2(const cvec& x);          // sum of |x|^2
double l2_norm(const cvec& x);
cvec operator+(const cvec& a, const cvec& b);
cvec operator-(const cvec& a, const cvec& b);
cvec operator*(cplx s, const cvec& a);

// CSIG binary format: "CSIG", u32 version, f64 sample rate, then interleaved
// little-endian f64 (re, im) pairs.
void write_csig(std::ostream& os, const ComplexSignal& x);
ComplexSignal read_csig(std::istream& is, std::size_t count);
void write_csig(const std::filesystem::path& path, const ComplexSignal& x);
ComplexSignal read_csig(const std::filesystem::path& path);

void write_signal_csv(const std::filesystem::path& path, const ComplexSignal& x);

}  // namespace vafer
