#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "vafer/signal.hpp"

namespace vafer {

struct Window {
    enum class Kind { gaussian };

    Kind kind = Kind::gaussian;
    std::size_t length = 127;  // odd
    double sigma = 127.0 / 16.0;  // samples
    std::size_t hop = 1;

    void validate() const;
    std::size_t half() const { return (length - 1) / 2; }
    // Next power of two >= 2L.
    std::size_t fft_size() const;
    // g[s] and dg/ds for s = -half..half, per sample.
    std::vector<double> values() const;
    std::vector<double> derivative() const;
};

enum class TfKind { stft, fsst };

// Rows are frames, columns ascending frequency over (-fs/2, fs/2].
struct TfSpectrum {
    std::size_t n_frames = 0;
    std::size_t n_bins = 0;
    cvec values;
    std::vector<double> time_axis;  // seconds
    std::vector<double> freq_axis;  // Hz
    Window window;
    std::size_t source_length = 0;
    double sample_rate = 0.0;
    TfKind kind = TfKind::stft;

    cplx& at(std::size_t frame, std::size_t bin) { return values[frame * n_bins + bin]; }
    const cplx& at(std::size_t frame, std::size_t bin) const { return values[frame * n_bins + bin]; }

    TfSpectrum& operator+=(const TfSpectrum& other);
};

// Signed DFT index (-M/2, M/2] of each column.
std::vector<std::ptrdiff_t> column_indices(std::size_t n_bins);

// Phase referenced to absolute time: V(t, w) = sum_s x[s] g(s - t) exp(-i w s).
TfSpectrum stft(const ComplexSignal& x, const Window& w);
// Same transform with g replaced by its derivative g'.
TfSpectrum stft_derivative(const ComplexSignal& x, const Window& w);

struct Reassignment {
    std::size_t n_frames = 0;
    std::size_t n_bins = 0;
    std::vector<double> omega_hat;  // rad/s, meaningful only where valid
    std::vector<std::uint8_t> valid;
};

// omega_hat = omega - Im(V^{g'} / V^g); entries with |V^g| below 1e-8 of the
// global maximum are marked invalid.
Reassignment reassignment_centroid(const TfSpectrum& v_g, const TfSpectrum& v_gprime);

TfSpectrum fsst(const ComplexSignal& x, const Window& w);
// Frequency-sum synthesis; requires hop 1.
ComplexSignal ifsst(const TfSpectrum& u, const Window& w);
// Weighted overlap-add inverse of stft.
ComplexSignal istft(const TfSpectrum& v, const Window& w);

// sum |V|^2 scaled by hop / (M sum g^2); equals the signal energy sum |x|^2
// away from the edges.
double stft_energy(const TfSpectrum& v);

void write_tf_db_csv(const std::filesystem::path& path, const TfSpectrum& s);

void to_json(nlohmann::json& j, const Window& w);
void from_json(const nlohmann::json& j, Window& w);

}  // namespace vafer
