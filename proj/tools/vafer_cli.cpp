// Command-line front end: scenario simulation, suppression, evaluation and the
// parameter sweeps. All outputs are CSV or CSIG files plus a manifest.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vafer/errors.hpp"
#include "vafer/harness.hpp"

namespace fs = std::filesystem;
using namespace vafer;

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string variant;
    int runs = 0;
    int threads = 1;
};

ExperimentSpec load_or(const Common& c, ExperimentSpec fallback) {
    ExperimentSpec spec = c.config.empty() ? std::move(fallback) : load_experiment(c.config);
    if (c.seed) spec.scenario.rng_seed = *c.seed;
    if (!c.variant.empty()) spec.variant = parse_variant(c.variant);
    spec.validate();
    return spec;
}

fs::path fresh_dir(const Common& c) {
    fs::path dir(c.out_dir);
    fs::create_directories(dir);
    fs::remove(dir / "manifest.txt");
    return dir;
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
    return s;
}

void add_common(CLI::App* app, Common& c, bool with_variant) {
    app->add_option("--config", c.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "RNG seed (u64)");
    app->add_option("--out-dir", c.out_dir, "Output directory");
    if (with_variant)
        app->add_option("--variant", c.variant, "Time-frequency variant")->check(CLI::IsMember({"fsst", "stft"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMCW interference suppression by mode decomposition and synchrosqueezing"};
    app.require_subcommand(1);
    const std::string cmdline = command_line(argc, argv);

    Common c;
    std::string input, reference, contaminated;
    std::vector<int> ks;
    std::vector<double> levels, pcts;

    auto* sim = app.add_subcommand("simulate", "Synthesize clean, interference, noise and contaminated signals");
    add_common(sim, c, false);

    auto* sup = app.add_subcommand("suppress", "Run suppression on a CSIG signal");
    add_common(sup, c, true);
    sup->add_option("--input", input, "Contaminated signal (CSIG)")->required()->check(CLI::ExistingFile);

    auto* ev = app.add_subcommand("evaluate", "Score a reconstruction against the clean reference");
    add_common(ev, c, false);
    ev->add_option("--input", input, "Reconstructed signal (CSIG)")->required()->check(CLI::ExistingFile);
    ev->add_option("--reference", reference, "Clean target signal (CSIG)")->required()->check(CLI::ExistingFile);
    ev->add_option("--contaminated", contaminated, "Contaminated input, for SINR_I (CSIG)")
        ->check(CLI::ExistingFile);

    auto* sk = app.add_subcommand("sweep-k", "Sweep the number of modes on the canonical scenario");
    add_common(sk, c, true);
    sk->add_option("--k", ks, "Mode counts (default 2..14)");

    auto* ss = app.add_subcommand("sweep-snr", "Monte Carlo sweep over input SNR");
    add_common(ss, c, true);
    ss->add_option("--runs", c.runs, "Runs per level (default 50)");
    ss->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    ss->add_option("--levels", levels, "SNR levels in dB (default -20..10 step 5)");

    auto* sd = app.add_subcommand("sweep-duration", "Sweep the contaminated fraction of the chirp");
    add_common(sd, c, false);
    sd->add_option("--pcts", pcts, "Contamination percentages (default 10..70 step 10)");

    auto* can = app.add_subcommand("canonical", "Run the canonical four-target, two-interferer scenario");
    add_common(can, c, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidConfig;
    }

    try {
        if (sim->parsed()) {
            const ExperimentSpec spec = load_or(c, canonical_experiment());
            const auto dir = fresh_dir(c);
            const PreparedScenario ps = prepare(spec, spec.scenario.rng_seed);
            const std::string hash = spec_hash(spec);
            for (const auto& [stem, x] : {std::pair{"clean", &ps.sim.clean},
                                          {"interference", &ps.sim.interference},
                                          {"noise", &ps.sim.noise},
                                          {"contaminated", &ps.sim.contaminated}}) {
                write_csig(dir / fmt::format("{}.csig", stem), *x);
                write_signal_csv(dir / fmt::format("{}.csv", stem), *x);
                append_manifest(dir, fmt::format("{}.csig", stem), cmdline, hash, spec.scenario.rng_seed);
                append_manifest(dir, fmt::format("{}.csv", stem), cmdline, hash, spec.scenario.rng_seed);
            }
            fmt::print("interference gain {:.6g}, SINR_I {:.4f} dB\n", ps.scenario.interference_gain,
                       sinr_input(ps.sim.clean, ps.sim.interference, ps.sim.noise));
        } else if (sup->parsed()) {
            const ExperimentSpec spec = load_or(c, canonical_experiment());
            const auto dir = fresh_dir(c);
            const ComplexSignal x = read_csig(fs::path(input));
            const VmfSet vmfs = vmd_decompose(x, effective_vmd(spec));
            const VaferResult r = select_and_reconstruct(vmfs, spec.variant, spec.window);
            const std::string hash = spec_hash(spec);
            write_csig(dir / "reconstructed.csig", r.reconstructed);
            write_signal_csv(dir / "reconstructed.csv", r.reconstructed);
            write_vmf_set(dir / "modes.vmfs", vmfs);
            write_mode_report(dir / "mode_scores.csv", r);
            for (const char* f : {"reconstructed.csig", "reconstructed.csv", "modes.vmfs", "modes.vmfs.meta.txt",
                                  "mode_scores.csv"})
                append_manifest(dir, f, cmdline, hash, spec.scenario.rng_seed);
            fmt::print("threshold {:.6f}, selected {} of {} modes\n", r.threshold, r.selected_set.size(),
                       r.scores.size());
        } else if (ev->parsed()) {
            const ExperimentSpec spec = load_or(c, canonical_experiment());
            const auto dir = fresh_dir(c);
            const ComplexSignal r_hat = read_csig(fs::path(input));
            const ComplexSignal s = read_csig(fs::path(reference));
            EvalReport rep;
            rep.seed = spec.scenario.rng_seed;
            rep.scenario_id = spec.id;
            rep.method = "external";
            rep.sinr_in_db = std::numeric_limits<double>::quiet_NaN();
            if (!contaminated.empty()) {
                const ComplexSignal x = read_csig(fs::path(contaminated));
                const ComplexSignal zero(x.size(), x.sample_rate);
                rep.sinr_in_db = sinr_input(s, {x.samples - s.samples, x.sample_rate}, zero);
            }
            rep.sinr_out_db = sinr_output(s, r_hat);
            rep.rho = correlation_coefficient(s, r_hat);
            rep.profile = range_profile(r_hat, spec.scenario.params);
            rep.peaks = detect_peaks(rep.profile);
            write_eval_csv(dir / "eval.csv", {rep});
            write_range_profile_csv(dir / "range_profile.csv", rep.profile);
            const std::string hash = spec_hash(spec);
            append_manifest(dir, "eval.csv", cmdline, hash, rep.seed);
            append_manifest(dir, "range_profile.csv", cmdline, hash, rep.seed);
            fmt::print("{}\n{}\n", eval_csv_header(), eval_csv_row(rep));
        } else if (sk->parsed()) {
            const ExperimentSpec spec = load_or(c, canonical_experiment());
            const auto dir = fresh_dir(c);
            if (ks.empty())
                for (int k = 2; k <= 14; ++k) ks.push_back(k);
            write_mode_sweep_csv(dir / "sweep_k.csv", sweep_modes(spec, ks));
            append_manifest(dir, "sweep_k.csv", cmdline, spec_hash(spec), spec.scenario.rng_seed);
        } else if (ss->parsed()) {
            const ExperimentSpec spec = load_or(c, snr_experiment(0.0));
            const auto dir = fresh_dir(c);
            if (levels.empty()) levels = {-20, -15, -10, -5, 0, 5, 10};
            const int runs = c.runs > 0 ? c.runs : spec.monte_carlo.n_runs;
            const std::uint64_t base = c.seed.value_or(spec.monte_carlo.base_seed);
            const SnrSweep sw = sweep_snr(spec, levels, runs, base, c.threads);
            write_snr_sweep_csv(dir / "sweep_snr_trials.csv", dir / "sweep_snr_summary.csv", sw);
            append_manifest(dir, "sweep_snr_trials.csv", cmdline, spec_hash(spec), base);
            append_manifest(dir, "sweep_snr_summary.csv", cmdline, spec_hash(spec), base);
        } else if (sd->parsed()) {
            const ExperimentSpec spec = load_or(c, canonical_experiment());
            const auto dir = fresh_dir(c);
            if (pcts.empty()) pcts = {10, 20, 30, 40, 50, 60, 70};
            write_duration_csv(dir / "sweep_duration.csv", sweep_duration(spec, pcts, spec.scenario.rng_seed));
            append_manifest(dir, "sweep_duration.csv", cmdline, spec_hash(spec), spec.scenario.rng_seed);
        } else if (can->parsed()) {
            const ExperimentSpec spec = load_or(c, canonical_experiment());
            const CanonicalRun run = run_canonical(spec, fs::path(c.out_dir));
            const auto& rep = run.outcome.report;
            fmt::print("SINR_I {:.4f} dB, SINR_O {:.4f} dB, rho {:.5f}, threshold {:.4f}, {} modes kept, {} peaks\n",
                       rep.sinr_in_db, rep.sinr_out_db, rep.rho, run.outcome.vafer.threshold,
                       run.outcome.vafer.selected_set.size(), rep.peaks.size());
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "invalid configuration: {}\n", e.what());
        return kExitInvalidConfig;
    } catch (const NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
