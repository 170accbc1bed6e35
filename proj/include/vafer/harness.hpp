#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vafer/metrics.hpp"
#include "vafer/pipeline.hpp"
#include "vafer/signal_model.hpp"
#include "vafer/tf.hpp"
#include "vafer/vmd.hpp"

namespace vafer {

inline constexpr double kCanonicalSinrDb = 9.1814;

struct MonteCarlo {
    int n_runs = 50;
    std::uint64_t base_seed = 1;
};

struct Sweep {
    std::string parameter;  // K, snr_db or contamination_pct
    std::vector<double> values;
};

struct ExperimentSpec {
    std::string id = "canonical";
    RadarScenario scenario;
    // When set, the interference gain is solved for before each run.
    std::optional<double> target_sinr_db;
    CalibrationTarget calibration = CalibrationTarget::with_noise;
    VmdConfig vmd;
    Window window;
    TfVariant variant = TfVariant::fsst;
    std::optional<Sweep> sweep;
    MonteCarlo monte_carlo;

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& s);
void from_json(const nlohmann::json& j, ExperimentSpec& s);
ExperimentSpec load_experiment(const std::filesystem::path& path);
std::string spec_hash(const ExperimentSpec& s);

// Two interferers at 1.5 and 2 times the victim slope, sharing a contiguous
// window of pct percent of the chirp that starts at 20% of it.
std::vector<Interferer> contiguous_interferers(const RadarParams& p, const std::vector<double>& slope_ratios,
                                               double pct, double start_fraction = 0.2);

ExperimentSpec canonical_experiment();        // 4 targets, 36% contamination, SNR 20 dB
ExperimentSpec snr_experiment(double snr_db); // 3 targets at 20/40/70 m
ExperimentSpec duration_experiment(double pct);
ExperimentSpec proxy_experiment();            // stand-in for the measured capture
ExperimentSpec clean_experiment();            // canonical targets, no interference, no noise

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index);

struct PreparedScenario {
    RadarScenario scenario;  // with the calibrated gain and trial seed applied
    SimulationOutput sim;
};

PreparedScenario prepare(const ExperimentSpec& spec, std::uint64_t seed);
// The VMD config used for a spec: init band defaults to the LPF cutoff.
VmdConfig effective_vmd(const ExperimentSpec& spec);
// vmd_decompose, but a non-converged run returns its partial set.
VmfSet decompose_flagged(const ComplexSignal& x, const VmdConfig& cfg);

struct MethodOutcome {
    VaferResult vafer;
    EvalReport report;
};

MethodOutcome evaluate_method(const PreparedScenario& ps, const VmfSet& vmfs, TfVariant variant, const Window& w,
                              const std::string& scenario_id, std::uint64_t seed);

struct CanonicalRun {
    PreparedScenario prepared;
    MethodOutcome outcome;
    double seconds = 0.0;
};

// Runs one experiment end to end. When out_dir is given, writes signals,
// spectra, the mode table, range profiles, the eval report and a manifest.
CanonicalRun run_canonical(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& out_dir = {});

struct ModeSweepRow {
    int K = 0;
    double sinr_out_db = 0.0;
    double rho = 0.0;
    std::size_t n_selected = 0;
    bool converged = false;
    bool failed = false;
};

std::vector<ModeSweepRow> sweep_modes(const ExperimentSpec& spec, const std::vector<int>& ks);

struct SnrTrialRow {
    double snr_db = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double sinr_in_db = 0.0;
    double sinr_out_db = 0.0;
    double rho = 0.0;
    bool converged = false;
    bool failed = false;
};

struct SnrSummaryRow {
    double snr_db = 0.0;
    std::size_t n_ok = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct SnrSweep {
    std::vector<SnrTrialRow> trials;
    std::vector<SnrSummaryRow> summary;
};

SnrSweep sweep_snr(const ExperimentSpec& base, const std::vector<double>& levels, int n_runs,
                   std::uint64_t base_seed, int threads = 1);

struct DurationRow {
    double pct = 0.0;
    std::string variant;
    double realized_fraction = 0.0;
    double sinr_in_db = 0.0;
    double sinr_out_db = 0.0;
    double rho = 0.0;
    bool converged = false;
    bool failed = false;
};

std::vector<DurationRow> sweep_duration(const ExperimentSpec& base, const std::vector<double>& pcts,
                                        std::uint64_t seed);

// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> v, double q);

void write_mode_sweep_csv(const std::filesystem::path& path, const std::vector<ModeSweepRow>& rows);
void write_snr_sweep_csv(const std::filesystem::path& trials, const std::filesystem::path& summary,
                         const SnrSweep& sweep);
void write_duration_csv(const std::filesystem::path& path, const std::vector<DurationRow>& rows);

// Appends "file<TAB>command<TAB>spec=<hash><TAB>seed=<seed>" to out_dir/manifest.txt.
void append_manifest(const std::filesystem::path& out_dir, const std::string& file, const std::string& command,
                     const std::string& hash, std::uint64_t seed);

}  // namespace vafer
