#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "vafer/signal.hpp"
#include "vafer/tf.hpp"
#include "vafer/vmd.hpp"

namespace vafer {

enum class TfVariant { fsst, stft };

struct ModeScore {
    std::size_t mode_index = 0;
    double energy = 0.0;
    double wiener_entropy = 0.0;
    bool selected = false;
};

struct VaferResult {
    ComplexSignal reconstructed;
    double threshold = 0.0;
    std::vector<ModeScore> scores;
    std::vector<std::size_t> selected_set;
    TfVariant variant = TfVariant::fsst;
    VmfSet diagnostics;
    bool empty_selection = false;
};

double mode_energy(const ComplexSignal& u);

// Geometric over arithmetic mean of v, with entries floored at 1e-12 max(v).
double wiener_entropy(const std::vector<double>& v);
// Entropy of the per-frame magnitude sum v[t] = sum_w |U(t, w)|.
double wiener_entropy(const TfSpectrum& u);

double energy_entropy_threshold(const std::vector<ModeScore>& scores);
// Marks W_k >= threshold (ties kept) on modes with nonzero energy; returns
// the selected indices in mode order.
std::vector<std::size_t> select_modes(std::vector<ModeScore>& scores, double threshold);

TfSpectrum analyze(const ComplexSignal& u, const Window& w, TfVariant variant);
ComplexSignal synthesize(const TfSpectrum& s, const Window& w, TfVariant variant);

VaferResult select_and_reconstruct(const VmfSet& vmfs, TfVariant variant, const Window& w);
VaferResult vafer_suppress(const ComplexSignal& x, const VmdConfig& cfg, const Window& w, TfVariant variant);

void write_mode_report(const std::filesystem::path& path, const VaferResult& r);

const char* to_string(TfVariant v);
TfVariant parse_variant(const std::string& s);

}  // namespace vafer
