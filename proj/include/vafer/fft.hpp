#pragma once

#include <span>

#include "vafer/signal.hpp"

namespace vafer::fft {

// In-place DFTs backed by FFTW. forward is unnormalized; inverse divides by n.
void forward(std::span<cplx> x);
void inverse(std::span<cplx> x);

cvec forward(cvec x);
cvec inverse(cvec x);

// Frequency of DFT bin k in cycles/sample, numpy fftfreq convention [-0.5, 0.5).
inline double bin_frequency(std::size_t k, std::size_t n) {
    const auto kk = static_cast<double>(k);
    const auto nn = static_cast<double>(n);
    return (2 * k < n) ? kk / nn : (kk - nn) / nn;
}

}  // namespace vafer::fft
