// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "vafer/harness.hpp"

using namespace vafer;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

constexpr double kRangeTolerance = 0.28;
// FSST and STFT reconstructions of the same selection agree to round-off;
// differences below this are not an ordering.
constexpr double kTieDb = 1e-6;

const CanonicalRun& canonical() {
    static const CanonicalRun run = run_canonical(canonical_experiment());
    return run;
}

Verdict criterion_canonical() {
    const auto& run = canonical();
    const auto& r = run.outcome.report;
    const bool ok = std::abs(r.sinr_in_db - kCanonicalSinrDb) <= 0.5 && r.sinr_out_db >= 18.0 && r.rho >= 0.99 &&
                    run.seconds <= 60.0;
    return {ok, fmt::format("SINR_I {:.4f} dB, SINR_O {:.4f} dB (>= 18), rho {:.5f} (>= 0.99), {:.2f} s (<= 60)",
                            r.sinr_in_db, r.sinr_out_db, r.rho, run.seconds)};
}

Verdict criterion_ablation() {
    const auto& run = canonical();
    const auto spec = canonical_experiment();
    const auto& ps = run.prepared;
    const VmfSet& vmfs = run.outcome.vafer.diagnostics;
    const auto stft_run = evaluate_method(ps, vmfs, TfVariant::stft, spec.window, spec.id, spec.scenario.rng_seed);
    const double a = run.outcome.report.sinr_out_db, b = stft_run.report.sinr_out_db;
    return {a - b >= 1.0, fmt::format("SINR_O fsst {:.6f} dB, stft {:.6f} dB, margin {:.3e} dB (>= 1)", a, b, a - b)};
}

Verdict criterion_selection() {
    const auto& v = canonical().outcome.vafer;
    const bool ok = v.scores.size() == 8 && v.selected_set.size() == 4 && v.threshold >= 0.90 && v.threshold < 1.0;
    std::string kept;
    for (auto k : v.selected_set) kept += fmt::format("{} ", k + 1);
    return {ok, fmt::format("{} of {} modes kept [{}], T_beta {:.4f}", v.selected_set.size(), v.scores.size(), kept,
                            v.threshold)};
}

Verdict criterion_peaks() {
    const auto& peaks = canonical().outcome.report.peaks;
    const std::vector<double> want{10.0, 16.0, 30.0, 50.0};
    bool ok = peaks.size() == want.size();
    std::string found;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        found += fmt::format("{:.2f} ", peaks[i].range_m);
        if (ok && std::abs(peaks[i].range_m - want[i]) > kRangeTolerance) ok = false;
    }
    return {ok, fmt::format("{} peaks at [{}] m", peaks.size(), found)};
}

Verdict criterion_k_sweep() {
    std::vector<int> ks;
    for (int k = 2; k <= 14; ++k) ks.push_back(k);
    const auto rows = sweep_modes(canonical_experiment(), ks);
    int best_k = 0;
    double best = -1e300;
    std::string trace;
    for (const auto& r : rows) {
        trace += fmt::format("{}:{:.2f} ", r.K, r.sinr_out_db);
        if (!r.failed && r.sinr_out_db > best) {
            best = r.sinr_out_db;
            best_k = r.K;
        }
    }
    return {std::abs(best_k - 8) <= 1, fmt::format("argmax K = {} ({:.3f} dB); {}", best_k, best, trace)};
}

Verdict criterion_snr_sweep() {
    const std::vector<double> levels{-20, -15, -10, -5, 0, 5, 10};
    const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto sw = sweep_snr(snr_experiment(0.0), levels, 50, 2024, threads);
    int inversions = 0;
    double worst_drop = 0.0;
    std::string trace;
    bool complete = true;
    for (std::size_t i = 0; i < sw.summary.size(); ++i) {
        const auto& s = sw.summary[i];
        trace += fmt::format("{:g}:{:.2f} ", s.snr_db, s.median);
        if (s.n_ok != 50) complete = false;
        if (i > 0 && s.median < sw.summary[i - 1].median) {
            ++inversions;
            worst_drop = std::max(worst_drop, sw.summary[i - 1].median - s.median);
        }
    }
    const bool ok = complete && (inversions == 0 || (inversions == 1 && worst_drop <= 1.0));
    return {ok, fmt::format("medians [{}] dB; {} inversions, largest drop {:.3f} dB{}", trace, inversions,
                            worst_drop, complete ? "" : "; some trials failed")};
}

Verdict criterion_duration_sweep() {
    const std::vector<double> pcts{10, 20, 30, 40, 50, 60, 70};
    const auto rows = sweep_duration(canonical_experiment(), pcts, canonical_experiment().scenario.rng_seed);
    int wins = 0;
    double fsst10 = NAN, fsst70 = NAN;
    std::string trace;
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
        const auto& f = rows[i];
        const auto& s = rows[i + 1];
        if (!f.failed && !s.failed && f.sinr_out_db >= s.sinr_out_db - kTieDb) ++wins;
        trace += fmt::format("{:g}%:{:.2f}/{:.2f} ", f.pct, f.sinr_out_db, s.sinr_out_db);
        if (f.pct == 10) fsst10 = f.sinr_out_db;
        if (f.pct == 70) fsst70 = f.sinr_out_db;
    }
    const bool ok = wins >= 5 && std::abs(fsst70 - fsst10) <= 6.0;
    return {ok, fmt::format("fsst >= stft at {}/7; fsst 70% vs 10%: {:.2f} vs {:.2f} dB; fsst/stft [{}]", wins,
                            fsst70, fsst10, trace)};
}

Verdict criterion_vmd() {
    const double fs = 22e6;
    const std::size_t n = 990;
    oracle::cvec x = oracle::tone(n, 1e6, fs);
    const auto t4 = oracle::tone(n, 4e6, fs);
    for (std::size_t i = 0; i < n; ++i) x[i] += t4[i];
    VmdConfig cfg;
    cfg.num_modes = 2;
    const VmfSet set = vmd_decompose(ComplexSignal(x, fs), cfg);
    const double e1 = std::abs(set.center_freqs_hz[0] - 1e6) / 1e6;
    const double e4 = std::abs(set.center_freqs_hz[1] - 4e6) / 4e6;
    oracle::cvec sum(n);
    for (const auto& m : set.modes)
        for (std::size_t i = 0; i < n; ++i) sum[i] += m[i];
    const double recon = oracle::rel_l2(sum, x);

    oracle::Gen gen(8);
    bool gains_ok = true;
    for (int trial = 0; trial < 1000 && gains_ok; ++trial) {
        const auto bins = static_cast<std::size_t>(gen.integer(4, 64));
        VmdState st;
        const auto K = static_cast<std::size_t>(gen.integer(1, 8));
        st.mode_spectra.assign(K, cvec(bins));
        for (std::size_t k = 0; k < K; ++k) st.center_freqs.push_back(gen.uniform(0.0, std::numbers::pi));
        st.lagrange_spectrum.assign(bins, 0.0);
        VmdConfig c;
        c.penalty = gen.uniform(0.0, 1e4);
        const cvec ones(bins, 1.0);
        const auto k = static_cast<std::size_t>(gen.integer(0, static_cast<int>(K) - 1));
        for (const auto& g : update_mode(st, k, ones, omega_axis(bins), c))
            if (!(g.real() > 0.0 && g.real() <= 1.0 && g.imag() == 0.0)) gains_ok = false;
    }

    const std::vector<cvec> a{gen.complex_vector(32), gen.complex_vector(32)};
    std::vector<cvec> doubled{a[0]};
    for (auto& v : doubled[0]) v *= 2.0;
    const double same = convergence_metric(a, a);
    const double quarter = convergence_metric({a[0]}, doubled);

    const bool ok = e1 <= 0.01 && e4 <= 0.01 && recon <= 0.05 && gains_ok && same == 0.0 &&
                    std::abs(quarter - 0.25) <= 1e-15;
    return {ok, fmt::format("centers {:.1f}/{:.1f} Hz (rel err {:.2e}, {:.2e}); residual {:.4f}; gains in (0,1]: {}; "
                            "metric(same) {}, metric(double) {:.17g}",
                            set.center_freqs_hz[0], set.center_freqs_hz[1], e1, e4, recon, gains_ok, same, quarter)};
}

Verdict criterion_fsst() {
    const double fs = 22e6, f0 = 2e6;
    const std::size_t n = 990;
    const Window w;
    const ComplexSignal x(oracle::tone(n, f0, fs), fs);
    const TfSpectrum u = fsst(x, w);
    const std::size_t h = w.half();

    double worst_conc = 1.0;
    const auto nearest = static_cast<std::ptrdiff_t>(std::lround(f0 / fs * static_cast<double>(u.n_bins)));
    const auto center_col = nearest + static_cast<std::ptrdiff_t>(u.n_bins / 2) - 1;
    for (std::size_t f = h; f + h < n; ++f) {
        double near = 0.0, total = 0.0;
        for (std::size_t c = 0; c < u.n_bins; ++c) {
            const double e = std::norm(u.at(f, c));
            total += e;
            if (std::abs(static_cast<std::ptrdiff_t>(c) - center_col) <= 1) near += e;
        }
        worst_conc = std::min(worst_conc, near / total);
    }

    const ComplexSignal back = ifsst(u, w);
    const double rt = oracle::rel_l2(back.samples, x.samples, 2 * w.length);

    const Reassignment ra = reassignment_centroid(stft(x, w), stft_derivative(x, w));
    const double truth = 2.0 * std::numbers::pi * f0;
    double worst_centroid = 0.0;
    for (std::size_t f = h; f + h < n; ++f)
        for (std::size_t c = 0; c < ra.n_bins; ++c) {
            const std::size_t i = f * ra.n_bins + c;
            if (ra.valid[i]) worst_centroid = std::max(worst_centroid, std::abs(ra.omega_hat[i] - truth) / truth);
        }
    const bool ok = worst_conc >= 0.95 && rt <= 1e-2 && worst_centroid <= 1e-6;
    return {ok, fmt::format("min interior concentration {:.5f} (>= 0.95); round trip {:.2e} (<= 1e-2); centroid "
                            "max rel err {:.2e} (<= 1e-6)",
                            worst_conc, rt, worst_centroid)};
}

Verdict criterion_entropy() {
    const double flat = wiener_entropy(std::vector<double>(64, 3.7));
    const double w1248 = wiener_entropy(std::vector<double>{1, 2, 4, 8});
    oracle::Gen gen(10);
    bool bracket = true, argmax_kept = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int K = gen.integer(1, 12);
        std::vector<ModeScore> scores;
        for (int k = 0; k < K; ++k)
            scores.push_back({static_cast<std::size_t>(k), gen.uniform(1e-6, 10.0), gen.uniform(0.0, 1.0), false});
        const double t = energy_entropy_threshold(scores);
        double lo = 1.0, hi = 0.0;
        std::size_t arg = 0;
        for (const auto& s : scores) {
            lo = std::min(lo, s.wiener_entropy);
            if (s.wiener_entropy > hi) {
                hi = s.wiener_entropy;
                arg = s.mode_index;
            }
        }
        if (!(lo <= t && t <= hi)) bracket = false;
        const auto kept = select_modes(scores, t);
        if (std::find(kept.begin(), kept.end(), arg) == kept.end()) argmax_kept = false;
    }
    const bool ok = std::abs(flat - 1.0) <= 1e-12 && std::abs(w1248 - 0.7542) <= 1e-4 &&
                    std::abs(w1248 - oracle::gm_over_am({1, 2, 4, 8})) <= 1e-12 && bracket && argmax_kept;
    return {ok, fmt::format("W(const) {:.15f}; W([1,2,4,8]) {:.6f}; bracket over 1000 sets: {}; argmax kept: {}",
                            flat, w1248, bracket, argmax_kept)};
}

Verdict criterion_metrics() {
    oracle::Gen gen(11);
    const ComplexSignal s(gen.complex_vector(256), 1.0);
    ComplexSignal js = s, scaled = s;
    for (auto& v : js.samples) v *= cplx(0.0, 1.0);
    for (auto& v : scaled.samples) v *= 1.1;
    // Orthogonal partner: remove the projection onto s.
    ComplexSignal orth(gen.complex_vector(256), 1.0);
    cplx proj = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) proj += std::conj(s[i]) * orth[i];
    proj /= norm2(s.samples);
    for (std::size_t i = 0; i < s.size(); ++i) orth[i] -= proj * s[i];

    const double r_self = correlation_coefficient(s, s);
    const double r_j = correlation_coefficient(s, js);
    const double r_orth = correlation_coefficient(s, orth);
    const double sinr = sinr_output(s, scaled);

    const ComplexSignal other(gen.complex_vector(256), 1.0);
    const double base = correlation_coefficient(s, other);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const cplx a = gen.nonzero_scalar(), b = gen.nonzero_scalar();
        ComplexSignal sa = s, ob = other;
        for (auto& v : sa.samples) v *= a;
        for (auto& v : ob.samples) v *= b;
        worst = std::max(worst, std::abs(correlation_coefficient(sa, ob) - base));
    }
    const bool ok = std::abs(r_self - 1.0) <= 1e-12 && std::abs(r_j - 1.0) <= 1e-12 && r_orth <= 1e-12 &&
                    std::abs(sinr - 20.0) <= 1e-9 && worst <= 1e-12;
    return {ok, fmt::format("rho(s,s) {:.15f}, rho(s,js) {:.15f}, rho(orth) {:.2e}, SINR_O(s,1.1s) {:.12f} dB, "
                            "max scaling drift {:.2e}",
                            r_self, r_j, r_orth, sinr, worst)};
}

Verdict criterion_proxy() {
    const CanonicalRun run = run_canonical(proxy_experiment());
    const auto& r = run.outcome.report;
    const double gain = r.sinr_out_db - r.sinr_in_db;
    return {gain >= 6.0, fmt::format("SINR_I {:.3f} dB -> SINR_O {:.3f} dB, improvement {:.3f} dB (>= 6); {} peaks",
                                     r.sinr_in_db, r.sinr_out_db, gain, r.peaks.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"canonical SINR_O / rho / runtime", criterion_canonical},
        {"fsst beats stft by >= 1 dB", criterion_ablation},
        {"mode selection count and threshold", criterion_selection},
        {"range-profile peak count", criterion_peaks},
        {"K-sweep argmax", criterion_k_sweep},
        {"SNR-sweep median trend", criterion_snr_sweep},
        {"duration sweep", criterion_duration_sweep},
        {"VMD properties", criterion_vmd},
        {"FSST properties", criterion_fsst},
        {"entropy and threshold properties", criterion_entropy},
        {"metric identities", criterion_metrics},
        {"synthetic proxy improvement", criterion_proxy},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, fmt::format("threw: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!v.pass) ++failed;
        fmt::print("[{}] {:2} {}: {} ({:.1f} s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail,
                   secs);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
