#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "vafer/errors.hpp"
#include "vafer/signal.hpp"

namespace vafer {

enum class InitScheme { zero, uniform_grid, seeded_random };
enum class BoundaryMode { none, mirror, linear_prediction };

struct VmdConfig {
    int num_modes = 8;
    double penalty = 1000.0;      // alpha, for omega in rad/sample
    double lagrange_step = 0.0;   // tau; 0 disables dual ascent
    double tolerance = 1e-7;
    int max_iterations = 500;
    InitScheme init_scheme = InitScheme::uniform_grid;
    // Upper edge of the initial grid in Hz; unset means the full positive band.
    std::optional<double> init_band_hz;
    std::uint64_t seed = 0;
    BoundaryMode boundary = BoundaryMode::linear_prediction;
    double extension_fraction = 0.3;  // per side, relative to input length

    void validate() const;
};

// Frequency-domain iterate. Spectra are in FFT bin order over the
// (possibly extended) working length.
struct VmdState {
    std::vector<cvec> mode_spectra;
    std::vector<double> center_freqs;  // rad/sample
    cvec lagrange_spectrum;
    int iteration = 0;
};

struct VmfSet {
    std::vector<ComplexSignal> modes;
    std::vector<double> center_freqs_hz;  // ascending
    int iterations_used = 0;
    bool converged = false;
    double final_residual = 0.0;
};

class NotConverged : public NumericalError {
public:
    explicit NotConverged(VmfSet partial);
    const VmfSet& partial() const { return partial_; }

private:
    VmfSet partial_;
};

// Angular frequency of each bin of an n-point DFT, rad/sample in [-pi, pi).
std::vector<double> omega_axis(std::size_t n);

cvec update_mode(const VmdState& state, std::size_t k, const cvec& x_hat,
                 const std::vector<double>& omega, const VmdConfig& cfg);
// Power-weighted centroid over omega >= 0. Throws ZeroSpectrum when that half
// carries no power.
double update_center_freq(const cvec& mode_spectrum, const std::vector<double>& omega);
cvec update_lagrangian(const VmdState& state, const cvec& x_hat, const VmdConfig& cfg);
double convergence_metric(const std::vector<cvec>& prev, const std::vector<cvec>& next);

// Runs the ADMM iteration and reports non-convergence through VmfSet::converged.
VmfSet vmd_run(const ComplexSignal& x, const VmdConfig& cfg);
// As vmd_run, but throws NotConverged (carrying the partial set) on exhaustion.
VmfSet vmd_decompose(const ComplexSignal& x, const VmdConfig& cfg);

// Boundary extensions. Both return a signal of length n + 2*ext with the
// original samples at [ext, ext + n).
cvec mirror_extend(const cvec& x, std::size_t ext);
cvec linear_prediction_extend(const cvec& x, std::size_t ext, std::size_t order);
// Complex Burg AR fit; returns a[0..order] with a[0] = 1.
cvec burg_ar(const cvec& x, std::size_t order);

// Container: "VMFS", u32 version, u32 count, u32 reserved, then per mode a u64
// sample count followed by one CSIG record. Center frequencies and convergence
// diagnostics go to a plain-text sidecar next to it.
std::filesystem::path vmf_sidecar_path(const std::filesystem::path& container);
void write_vmf_set(const std::filesystem::path& container, const VmfSet& set);
VmfSet read_vmf_set(const std::filesystem::path& container);

void to_json(nlohmann::json& j, const VmdConfig& c);
void from_json(const nlohmann::json& j, VmdConfig& c);

}  // namespace vafer
