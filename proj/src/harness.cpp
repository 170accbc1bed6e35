#include "vafer/harness.hpp"
#include "json_keys.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vafer/errors.hpp"

namespace vafer {

NLOHMANN_JSON_SERIALIZE_ENUM(CalibrationTarget, {
    {CalibrationTarget::with_noise, "with_noise"},
    {CalibrationTarget::interference_only, "interference_only"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(TfVariant, {
    {TfVariant::fsst, "fsst"},
    {TfVariant::stft, "stft"},
})

void ExperimentSpec::validate() const {
    scenario.validate();
    vmd.validate();
    window.validate();
    if (monte_carlo.n_runs < 1) throw ConfigError("monte_carlo.n_runs must be at least 1");
    if (sweep) {
        const auto& p = sweep->parameter;
        if (p != "K" && p != "snr_db" && p != "contamination_pct")
            throw ConfigError(fmt::format("unknown sweep parameter '{}'", p));
    }
}

void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    j = {{"id", s.id},
         {"scenario", s.scenario},
         {"target_sinr_db", s.target_sinr_db ? nlohmann::json(*s.target_sinr_db) : nlohmann::json(nullptr)},
         {"calibration", s.calibration},
         {"vmd", s.vmd},
         {"window", s.window},
         {"variant", s.variant},
         {"monte_carlo", {{"n_runs", s.monte_carlo.n_runs}, {"base_seed", s.monte_carlo.base_seed}}}};
    if (s.sweep) j["sweep"] = {{"parameter", s.sweep->parameter}, {"values", s.sweep->values}};
}

void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    detail::require_keys_from(j, "experiment", {"id", "scenario", "target_sinr_db", "calibration", "vmd", "window",
                                                "variant", "monte_carlo", "sweep"});
    // Keys left out fall back to the canonical experiment.
    s = canonical_experiment();
    s.id = j.value("id", s.id);
    if (j.contains("scenario")) s.scenario = j.at("scenario").get<RadarScenario>();
    if (j.contains("target_sinr_db")) {
        const auto& t = j.at("target_sinr_db");
        s.target_sinr_db = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
    }
    s.calibration = j.value("calibration", s.calibration);
    if (j.contains("vmd")) s.vmd = j.at("vmd").get<VmdConfig>();
    if (j.contains("window")) s.window = j.at("window").get<Window>();
    s.variant = j.value("variant", s.variant);
    if (j.contains("monte_carlo")) {
        const auto& mc = j.at("monte_carlo");
        detail::require_keys_from(mc, "monte_carlo", {"n_runs", "base_seed"});
        s.monte_carlo.n_runs = mc.value("n_runs", s.monte_carlo.n_runs);
        s.monte_carlo.base_seed = mc.value("base_seed", s.monte_carlo.base_seed);
    }
    if (j.contains("sweep") && j.at("sweep").is_null()) s.sweep.reset();
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        detail::require_keys_from(j.at("sweep"), "sweep", {"parameter", "values"});
        s.sweep = Sweep{j.at("sweep").at("parameter").get<std::string>(),
                        j.at("sweep").at("values").get<std::vector<double>>()};
    }
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(fmt::format("cannot open config {}", path.string()));
    ExperimentSpec spec;
    try {
        spec = nlohmann::json::parse(is).get<ExperimentSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    spec.validate();
    return spec;
}

std::string spec_hash(const ExperimentSpec& s) {
    // FNV-1a over the canonical JSON dump
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : nlohmann::json(s).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::vector<Interferer> contiguous_interferers(const RadarParams& p, const std::vector<double>& slope_ratios,
                                               double pct, double start_fraction) {
    if (!(pct > 0.0) || pct >= 100.0) throw ConfigError("contamination percentage must lie in (0, 100)");
    if (start_fraction + pct / 100.0 > 1.0) throw ConfigError("contamination window runs past the chirp");
    std::vector<Interferer> out;
    const double share = pct / 100.0 / static_cast<double>(slope_ratios.size());
    for (std::size_t m = 0; m < slope_ratios.size(); ++m) {
        Interferer it;
        it.start_freq = p.carrier_freq;
        it.slope = slope_ratios[m] * p.slope();
        it.window_start = (start_fraction + share * static_cast<double>(m)) * p.chirp_duration;
        it.window_end = (start_fraction + share * static_cast<double>(m + 1)) * p.chirp_duration;
        out.push_back(it);
    }
    return out;
}

namespace {

std::vector<Target> targets_at(std::initializer_list<double> ranges) {
    std::vector<Target> t;
    for (double r : ranges) t.push_back({r, {1.0, 0.0}});
    return t;
}

}  // namespace

ExperimentSpec canonical_experiment() {
    ExperimentSpec s;
    s.id = "canonical";
    s.scenario.targets = targets_at({10.0, 16.0, 30.0, 50.0});
    s.scenario.interferers = contiguous_interferers(s.scenario.params, {1.5, 2.0}, 36.0);
    s.scenario.snr_db = 20.0;
    s.scenario.rng_seed = 1;
    s.target_sinr_db = kCanonicalSinrDb;
    return s;
}

ExperimentSpec snr_experiment(double snr_db) {
    ExperimentSpec s = canonical_experiment();
    s.id = fmt::format("snr_{:g}", snr_db);
    s.scenario.targets = targets_at({20.0, 40.0, 70.0});
    s.scenario.snr_db = snr_db;
    // The interference level is held fixed relative to the targets while the
    // noise level varies.
    s.calibration = CalibrationTarget::interference_only;
    return s;
}

ExperimentSpec duration_experiment(double pct) {
    ExperimentSpec s = canonical_experiment();
    s.id = fmt::format("duration_{:g}", pct);
    s.scenario.interferers = contiguous_interferers(s.scenario.params, {1.5, 2.0}, pct);
    return s;
}

ExperimentSpec proxy_experiment() {
    ExperimentSpec s;
    s.id = "proxy";
    auto& p = s.scenario.params;
    p.carrier_freq = 77e9;
    p.bandwidth = 750e6;
    p.chirp_duration = 29.56e-6;
    p.sample_rate = 20e6;
    p.lpf_cutoff = 9e6;
    s.scenario.targets = targets_at({14.8});
    Interferer it;
    it.start_freq = 77e9;
    it.slope = 682e6 / 72.31e-6;
    it.delay = 2.0 / kSpeedOfLight;  // interfering radar 2 m away, one-way path
    it.window_start = 3e-6;
    it.window_end = 6e-6;
    s.scenario.interferers = {it};
    s.scenario.snr_db = 20.0;
    s.scenario.rng_seed = 7;
    s.target_sinr_db = 2.94;
    s.vmd.num_modes = 4;
    return s;
}

ExperimentSpec clean_experiment() {
    ExperimentSpec s = canonical_experiment();
    s.id = "clean";
    s.scenario.interferers.clear();
    s.scenario.snr_db.reset();
    s.target_sinr_db.reset();
    return s;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

PreparedScenario prepare(const ExperimentSpec& spec, std::uint64_t seed) {
    PreparedScenario ps;
    ps.scenario = spec.scenario;
    ps.scenario.rng_seed = seed;
    if (spec.target_sinr_db && !ps.scenario.interferers.empty())
        ps.scenario.interference_gain = calibrate_interference_gain(ps.scenario, *spec.target_sinr_db, spec.calibration);
    ps.sim = simulate(ps.scenario);
    return ps;
}

VmdConfig effective_vmd(const ExperimentSpec& spec) {
    VmdConfig cfg = spec.vmd;
    if (!cfg.init_band_hz) cfg.init_band_hz = spec.scenario.params.lpf_cutoff;
    return cfg;
}

VmfSet decompose_flagged(const ComplexSignal& x, const VmdConfig& cfg) {
    try {
        return vmd_decompose(x, cfg);
    } catch (const NotConverged& e) {
        return e.partial();
    }
}

MethodOutcome evaluate_method(const PreparedScenario& ps, const VmfSet& vmfs, TfVariant variant, const Window& w,
                              const std::string& scenario_id, std::uint64_t seed) {
    MethodOutcome out;
    out.vafer = select_and_reconstruct(vmfs, variant, w);
    auto& r = out.report;
    r.seed = seed;
    r.scenario_id = scenario_id;
    r.method = fmt::format("vafer-{}", to_string(variant));
    r.sinr_in_db = sinr_input(ps.sim.clean, ps.sim.interference, ps.sim.noise);
    r.sinr_out_db = sinr_output(ps.sim.clean, out.vafer.reconstructed);
    r.rho = out.vafer.empty_selection ? 0.0 : correlation_coefficient(ps.sim.clean, out.vafer.reconstructed);
    r.profile = range_profile(out.vafer.reconstructed, ps.scenario.params);
    r.peaks = detect_peaks(r.profile);
    return out;
}

CanonicalRun run_canonical(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& out_dir) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    CanonicalRun run;
    const std::uint64_t seed = spec.scenario.rng_seed;
    run.prepared = prepare(spec, seed);
    const VmfSet vmfs = vmd_decompose(run.prepared.sim.contaminated, effective_vmd(spec));
    run.outcome = evaluate_method(run.prepared, vmfs, spec.variant, spec.window, spec.id, seed);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out_dir) return run;

    namespace fs = std::filesystem;
    fs::create_directories(*out_dir);
    fs::remove(*out_dir / "manifest.txt");
    const std::string hash = spec_hash(spec);
    const std::string command = fmt::format("canonical --seed {} --variant {}", seed, to_string(spec.variant));
    auto emit = [&](const std::string& name) { append_manifest(*out_dir, name, command, hash, seed); };
    auto put_signal = [&](const std::string& stem, const ComplexSignal& x) {
        write_csig(*out_dir / (stem + ".csig"), x);
        write_signal_csv(*out_dir / (stem + ".csv"), x);
        emit(stem + ".csig");
        emit(stem + ".csv");
    };
    const auto& sim = run.prepared.sim;
    put_signal("clean", sim.clean);
    put_signal("interference", sim.interference);
    put_signal("noise", sim.noise);
    put_signal("contaminated", sim.contaminated);
    put_signal("reconstructed", run.outcome.vafer.reconstructed);

    write_tf_db_csv(*out_dir / "tf_contaminated_stft.csv", stft(sim.contaminated, spec.window));
    emit("tf_contaminated_stft.csv");
    write_tf_db_csv(*out_dir / "tf_contaminated_fsst.csv", fsst(sim.contaminated, spec.window));
    emit("tf_contaminated_fsst.csv");
    for (std::size_t k = 0; k < vmfs.modes.size(); ++k) {
        const auto name = fmt::format("tf_mode{}_{}.csv", k + 1, to_string(spec.variant));
        write_tf_db_csv(*out_dir / name, analyze(vmfs.modes[k], spec.window, spec.variant));
        emit(name);
    }
    write_vmf_set(*out_dir / "modes.vmfs", vmfs);
    emit("modes.vmfs");
    emit("modes.vmfs.meta.txt");
    write_mode_report(*out_dir / "mode_scores.csv", run.outcome.vafer);
    emit("mode_scores.csv");

    const auto& p = run.prepared.scenario.params;
    write_range_profile_csv(*out_dir / "range_clean.csv", range_profile(sim.clean, p));
    write_range_profile_csv(*out_dir / "range_contaminated.csv", range_profile(sim.contaminated, p));
    write_range_profile_csv(*out_dir / "range_reconstructed.csv", run.outcome.report.profile);
    for (const char* n : {"range_clean.csv", "range_contaminated.csv", "range_reconstructed.csv"}) emit(n);
    write_eval_csv(*out_dir / "eval.csv", {run.outcome.report});
    emit("eval.csv");
    return run;
}

std::vector<ModeSweepRow> sweep_modes(const ExperimentSpec& spec, const std::vector<int>& ks) {
    spec.validate();
    const std::uint64_t seed = spec.scenario.rng_seed;
    const PreparedScenario ps = prepare(spec, seed);
    std::vector<ModeSweepRow> rows;
    for (int K : ks) {
        ModeSweepRow row;
        row.K = K;
        try {
            VmdConfig cfg = effective_vmd(spec);
            cfg.num_modes = K;
            const VmfSet vmfs = decompose_flagged(ps.sim.contaminated, cfg);
            row.converged = vmfs.converged;
            const auto m = evaluate_method(ps, vmfs, spec.variant, spec.window, spec.id, seed);
            row.sinr_out_db = m.report.sinr_out_db;
            row.rho = m.report.rho;
            row.n_selected = m.vafer.selected_set.size();
        } catch (const std::exception& e) {
            fmt::print(stderr, "sweep-k: K={} failed: {}\n", K, e.what());
            row.failed = true;
            row.sinr_out_db = row.rho = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

SnrSweep sweep_snr(const ExperimentSpec& base, const std::vector<double>& levels, int n_runs,
                   std::uint64_t base_seed, int threads) {
    if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
    const auto runs = static_cast<std::size_t>(n_runs);
    SnrSweep out;
    out.trials.resize(levels.size() * runs);
    // Trial i uses the same seed at every level, so levels differ only in
    // the noise scale.
    auto work = [&](std::size_t job) {
        const std::size_t li = job / runs, i = job % runs;
        SnrTrialRow& row = out.trials[job];
        row.snr_db = levels[li];
        row.trial = i;
        row.seed = trial_seed(base_seed, i);
        try {
            ExperimentSpec spec = base;
            spec.scenario.snr_db = levels[li];
            const PreparedScenario ps = prepare(spec, row.seed);
            const VmfSet vmfs = decompose_flagged(ps.sim.contaminated, effective_vmd(spec));
            row.converged = vmfs.converged;
            const auto m = evaluate_method(ps, vmfs, spec.variant, spec.window, spec.id, row.seed);
            row.sinr_in_db = m.report.sinr_in_db;
            row.sinr_out_db = m.report.sinr_out_db;
            row.rho = m.report.rho;
        } catch (const std::exception& e) {
            fmt::print(stderr, "sweep-snr: level {} trial {} failed: {}\n", levels[li], i, e.what());
            row.failed = true;
            row.sinr_in_db = row.sinr_out_db = row.rho = std::numeric_limits<double>::quiet_NaN();
        }
    };

    const std::size_t jobs = out.trials.size();
    const auto n_threads = static_cast<std::size_t>(std::max(1, threads));
    if (n_threads == 1) {
        for (std::size_t j = 0; j < jobs; ++j) work(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t j = next++; j < jobs; j = next++) work(j);
            });
    }

    for (std::size_t li = 0; li < levels.size(); ++li) {
        std::vector<double> ok;
        for (std::size_t i = 0; i < runs; ++i) {
            const auto& row = out.trials[li * runs + i];
            if (!row.failed) ok.push_back(cap_db(row.sinr_out_db));
        }
        SnrSummaryRow s;
        s.snr_db = levels[li];
        s.n_ok = ok.size();
        s.median = quantile(ok, 0.5);
        s.q1 = quantile(ok, 0.25);
        s.q3 = quantile(ok, 0.75);
        out.summary.push_back(s);
    }
    return out;
}

std::vector<DurationRow> sweep_duration(const ExperimentSpec& base, const std::vector<double>& pcts,
                                        std::uint64_t seed) {
    std::vector<double> ratios;
    for (const auto& it : base.scenario.interferers) ratios.push_back(it.slope / base.scenario.params.slope());
    if (ratios.empty()) throw ConfigError("duration sweep needs at least one interferer");

    std::vector<DurationRow> rows;
    for (double pct : pcts) {
        DurationRow proto;
        proto.pct = pct;
        try {
            ExperimentSpec spec = base;
            spec.scenario.interferers = contiguous_interferers(spec.scenario.params, ratios, pct);
            const auto& p = spec.scenario.params;
            std::size_t active = 0;
            for (const auto& it : spec.scenario.interferers) {
                const auto [a, b] = active_samples(p, it);
                active += b - a;
            }
            proto.realized_fraction = static_cast<double>(active) / static_cast<double>(p.num_samples());
            const PreparedScenario ps = prepare(spec, seed);
            const VmfSet vmfs = decompose_flagged(ps.sim.contaminated, effective_vmd(spec));
            for (TfVariant v : {TfVariant::fsst, TfVariant::stft}) {
                DurationRow row = proto;
                row.variant = to_string(v);
                row.converged = vmfs.converged;
                const auto m = evaluate_method(ps, vmfs, v, spec.window, spec.id, seed);
                row.sinr_in_db = m.report.sinr_in_db;
                row.sinr_out_db = m.report.sinr_out_db;
                row.rho = m.report.rho;
                rows.push_back(row);
            }
        } catch (const std::exception& e) {
            fmt::print(stderr, "sweep-duration: {}% failed: {}\n", pct, e.what());
            for (const char* v : {"fsst", "stft"}) {
                DurationRow row = proto;
                row.variant = v;
                row.failed = true;
                row.sinr_in_db = row.sinr_out_db = row.rho = std::numeric_limits<double>::quiet_NaN();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_mode_sweep_csv(const std::filesystem::path& path, const std::vector<ModeSweepRow>& rows) {
    auto out = fmt::output_file(path.string());
    out.print("K,sinr_out_db,rho,n_selected,converged,status\n");
    for (const auto& r : rows)
        out.print("{},{:.10g},{:.10g},{},{},{}\n", r.K, cap_db(r.sinr_out_db), r.rho, r.n_selected,
                  r.converged ? 1 : 0, r.failed ? "failed" : "ok");
}

void write_snr_sweep_csv(const std::filesystem::path& trials, const std::filesystem::path& summary,
                         const SnrSweep& sweep) {
    {
        auto out = fmt::output_file(trials.string());
        out.print("snr_db,trial,seed,sinr_in_db,sinr_out_db,rho,converged,status\n");
        for (const auto& r : sweep.trials)
            out.print("{:g},{},{},{:.10g},{:.10g},{:.10g},{},{}\n", r.snr_db, r.trial, r.seed, cap_db(r.sinr_in_db),
                      cap_db(r.sinr_out_db), r.rho, r.converged ? 1 : 0, r.failed ? "failed" : "ok");
    }
    auto out = fmt::output_file(summary.string());
    out.print("snr_db,n_ok,median_sinr_out_db,q1_sinr_out_db,q3_sinr_out_db\n");
    for (const auto& s : sweep.summary)
        out.print("{:g},{},{:.10g},{:.10g},{:.10g}\n", s.snr_db, s.n_ok, s.median, s.q1, s.q3);
}

void write_duration_csv(const std::filesystem::path& path, const std::vector<DurationRow>& rows) {
    auto out = fmt::output_file(path.string());
    out.print("pct,variant,realized_fraction,sinr_in_db,sinr_out_db,rho,converged,status\n");
    for (const auto& r : rows)
        out.print("{:g},{},{:.10g},{:.10g},{:.10g},{:.10g},{},{}\n", r.pct, r.variant, r.realized_fraction,
                  cap_db(r.sinr_in_db), cap_db(r.sinr_out_db), r.rho, r.converged ? 1 : 0,
                  r.failed ? "failed" : "ok");
}

void append_manifest(const std::filesystem::path& out_dir, const std::string& file, const std::string& command,
                     const std::string& hash, std::uint64_t seed) {
    std::ofstream os(out_dir / "manifest.txt", std::ios::app);
    os << file << '\t' << command << "\tspec=" << hash << "\tseed=" << seed << '\n';
}

}  // namespace vafer
