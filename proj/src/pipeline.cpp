#include "vafer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vafer/errors.hpp"

namespace vafer {

double mode_energy(const ComplexSignal& u) { return norm2(u.samples) / u.sample_rate; }

double wiener_entropy(const std::vector<double>& v) {
    if (v.empty()) throw ZeroSpectrum("empty flatness vector");
    const double peak = *std::max_element(v.begin(), v.end());
    if (!(peak > 0.0)) throw ZeroSpectrum("flatness vector is identically zero");
    const double floor = 1e-12 * peak;
    double log_sum = 0.0, sum = 0.0;
    for (double x : v) {
        const double y = std::max(x, floor);
        log_sum += std::log(y);
        sum += y;
    }
    const auto n = static_cast<double>(v.size());
    // GM <= AM holds exactly but rounding can nudge a flat vector past 1.
    return std::clamp(std::exp(log_sum / n) / (sum / n), 0.0, 1.0);
}

double wiener_entropy(const TfSpectrum& u) {
    std::vector<double> v(u.n_frames, 0.0);
    for (std::size_t f = 0; f < u.n_frames; ++f)
        for (std::size_t c = 0; c < u.n_bins; ++c) v[f] += std::abs(u.at(f, c));
    return wiener_entropy(v);
}

double energy_entropy_threshold(const std::vector<ModeScore>& scores) {
    double num = 0.0, den = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : scores) {
        num += s.energy * s.wiener_entropy;
        den += s.energy;
        if (s.energy > 0.0) {
            lo = std::min(lo, s.wiener_entropy);
            hi = std::max(hi, s.wiener_entropy);
        }
    }
    if (!(den > 0.0)) throw AllModesZero("all modes carry zero energy");
    // A convex combination stays inside [lo, hi]; the division can round out.
    return std::clamp(num / den, lo, hi);
}

std::vector<std::size_t> select_modes(std::vector<ModeScore>& scores, double threshold) {
    std::vector<std::size_t> kept;
    for (auto& s : scores) {
        s.selected = s.energy > 0.0 && s.wiener_entropy >= threshold;
        if (s.selected) kept.push_back(s.mode_index);
    }
    return kept;
}

TfSpectrum analyze(const ComplexSignal& u, const Window& w, TfVariant variant) {
    return variant == TfVariant::fsst ? fsst(u, w) : stft(u, w);
}

ComplexSignal synthesize(const TfSpectrum& s, const Window& w, TfVariant variant) {
    return variant == TfVariant::fsst ? ifsst(s, w) : istft(s, w);
}

VaferResult select_and_reconstruct(const VmfSet& vmfs, TfVariant variant, const Window& w) {
    if (vmfs.modes.empty()) throw ConfigError("no modes to select from");
    VaferResult r;
    r.variant = variant;
    r.diagnostics = vmfs;

    std::vector<TfSpectrum> spectra;
    spectra.reserve(vmfs.modes.size());
    for (std::size_t k = 0; k < vmfs.modes.size(); ++k) {
        spectra.push_back(analyze(vmfs.modes[k], w, variant));
        ModeScore s;
        s.mode_index = k;
        s.energy = mode_energy(vmfs.modes[k]);
        // A silent mode has no flatness; it carries no energy, so it cannot
        // move the threshold and is never kept.
        s.wiener_entropy = s.energy > 0.0 ? wiener_entropy(spectra.back()) : 0.0;
        r.scores.push_back(s);
    }
    r.threshold = energy_entropy_threshold(r.scores);

    r.selected_set = select_modes(r.scores, r.threshold);
    std::optional<TfSpectrum> sum;
    for (std::size_t k : r.selected_set) {
        if (sum) *sum += spectra[k];
        else sum = spectra[k];
    }
    const auto& first = vmfs.modes.front();
    if (sum) {
        r.reconstructed = synthesize(*sum, w, variant);
    } else {
        r.empty_selection = true;
        r.reconstructed = ComplexSignal(first.size(), first.sample_rate);
        fmt::print(stderr, "warning: no mode reached the energy-entropy threshold; returning zeros\n");
    }
    return r;
}

VaferResult vafer_suppress(const ComplexSignal& x, const VmdConfig& cfg, const Window& w, TfVariant variant) {
    return select_and_reconstruct(vmd_decompose(x, cfg), variant, w);
}

void write_mode_report(const std::filesystem::path& path, const VaferResult& r) {
    auto out = fmt::output_file(path.string());
    out.print("# variant {}\n# threshold {:.17g}\n", to_string(r.variant), r.threshold);
    out.print("k,center_freq_Hz,E_k,W_k,selected\n");
    for (const auto& s : r.scores) {
        const double fc = s.mode_index < r.diagnostics.center_freqs_hz.size()
                              ? r.diagnostics.center_freqs_hz[s.mode_index]
                              : std::nan("");
        out.print("{},{:.17g},{:.17g},{:.17g},{}\n", s.mode_index + 1, fc, s.energy, s.wiener_entropy,
                  s.selected ? 1 : 0);
    }
}

const char* to_string(TfVariant v) { return v == TfVariant::fsst ? "fsst" : "stft"; }

TfVariant parse_variant(const std::string& s) {
    if (s == "fsst") return TfVariant::fsst;
    if (s == "stft") return TfVariant::stft;
    throw ConfigError(fmt::format("unknown variant '{}'", s));
}

}  // namespace vafer
