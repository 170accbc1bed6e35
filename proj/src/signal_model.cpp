#include "vafer/signal_model.hpp"
#include "json_keys.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "vafer/errors.hpp"
#include "vafer/fft.hpp"

namespace vafer {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-j 2 pi cycles) with the integer part removed first.
cplx unit_phasor(double cycles) {
    const double frac = cycles - std::floor(cycles);
    return std::polar(1.0, -kTwoPi * frac);
}

double wrap_cycles(double c) { return c - std::floor(c); }

}  // namespace

std::size_t RadarParams::num_samples() const {
    return static_cast<std::size_t>(std::llround(chirp_duration * sample_rate));
}

double RadarParams::range_resolution() const {
    return sample_rate / static_cast<double>(num_samples()) * kSpeedOfLight / (2.0 * slope());
}

void RadarParams::validate() const {
    for (double v : {carrier_freq, bandwidth, chirp_duration, sample_rate, lpf_cutoff})
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError("radar parameters must be finite and positive");
    if (lpf_cutoff > sample_rate / 2.0)
        throw CutoffOutOfRange(fmt::format("lpf cutoff {} Hz exceeds fs/2 = {} Hz", lpf_cutoff, sample_rate / 2.0));
    if (chirp_duration * sample_rate < 1.5)
        throw ConfigError("chirp must span at least 2 samples");
}

double range_from_beat(double beat_hz, const RadarParams& p) {
    return beat_hz * kSpeedOfLight / (2.0 * p.slope());
}

void RadarScenario::validate() const {
    params.validate();
    for (const auto& t : targets) {
        if (!(t.range > 0.0)) throw ConfigError(fmt::format("target range {} must be positive", t.range));
        if (t.beat_frequency(params) > params.lpf_cutoff)
            throw TargetOutOfBand(fmt::format("target at {} m beats at {} Hz, above cutoff {} Hz",
                                              t.range, t.beat_frequency(params), params.lpf_cutoff));
    }
    for (const auto& i : interferers) {
        if (!(i.window_start >= 0.0) || !(i.window_end <= params.chirp_duration * (1 + 1e-12)) ||
            !(i.window_start <= i.window_end))
            throw ConfigError(fmt::format("interferer window [{}, {}) is not inside the chirp",
                                          i.window_start, i.window_end));
    }
    if (snr_db && !std::isfinite(*snr_db)) throw ConfigError("snr_db must be finite");
    if (!std::isfinite(interference_gain) || interference_gain < 0.0)
        throw ConfigError("interference gain must be finite and nonnegative");
}

// The mixer output TX * conj(RX) places each echo at +f_b, so the phase of the
// echo term is negated relative to the received-signal phase.
ComplexSignal synth_target_beat(const RadarParams& p, const std::vector<Target>& targets) {
    p.validate();
    const std::size_t n = p.num_samples();
    ComplexSignal out(n, p.sample_rate);
    const double mu = p.slope();
    for (const auto& tg : targets) {
        if (!(tg.range > 0.0)) throw ConfigError("target range must be positive");
        const double tau = tg.delay();
        if (mu * tau > p.lpf_cutoff)
            throw TargetOutOfBand(fmt::format("target at {} m is out of band", tg.range));
        const double fixed = wrap_cycles(-p.carrier_freq * tau) + mu * tau * tau / 2.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / p.sample_rate;
            out[k] += tg.amplitude * unit_phasor(fixed - mu * t * tau);
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> active_samples(const RadarParams& p, const Interferer& i) {
    const std::size_t n = p.num_samples();
    auto edge = [&](double seconds) {
        const double pos = std::ceil(seconds * p.sample_rate - 1e-9);
        return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n)));
    };
    const std::size_t first = edge(i.window_start);
    return {first, std::max(first, edge(i.window_end))};
}

ComplexSignal synth_interference_beat(const RadarParams& p, const std::vector<Interferer>& interferers) {
    p.validate();
    const std::size_t n = p.num_samples();
    ComplexSignal raw(n, p.sample_rate);
    const double mu = p.slope();
    for (const auto& it : interferers) {
        const double tp = it.delay;
        const double fixed = wrap_cycles(-it.start_freq * tp) +
                             (it.constant_delay_phase ? it.slope / 2.0 * tp * tp : 0.0);
        const double linear = (it.start_freq - p.carrier_freq) - it.slope * tp +
                              (it.constant_delay_phase ? 0.0 : it.slope / 2.0 * tp * tp);
        const auto [first, last] = active_samples(p, it);
        for (std::size_t k = first; k < last; ++k) {
            const double t = static_cast<double>(k) / p.sample_rate;
            raw[k] += unit_phasor(fixed + linear * t + 0.5 * (it.slope - mu) * t * t);
        }
    }
    return lowpass_filter(raw, p.lpf_cutoff);
}

ComplexSignal lowpass_filter(const ComplexSignal& x, double cutoff) {
    if (!(cutoff > 0.0) || cutoff > x.sample_rate / 2.0)
        throw CutoffOutOfRange(fmt::format("cutoff {} Hz outside (0, {}]", cutoff, x.sample_rate / 2.0));
    const std::size_t n = x.size();
    cvec spec = fft::forward(x.samples);
    const double limit = cutoff / x.sample_rate * static_cast<double>(n) + 1e-9;
    for (std::size_t k = 0; k < n; ++k) {
        const double bin = fft::bin_frequency(k, n) * static_cast<double>(n);
        if (std::abs(bin) > limit) spec[k] = 0.0;
    }
    return {fft::inverse(std::move(spec)), x.sample_rate};
}

ComplexSignal awgn(const ComplexSignal& x, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
    const double px = norm2(x.samples) / static_cast<double>(x.size());
    if (!(px > 0.0)) throw NoisePowerUndefined("reference signal has zero power");
    const double sigma = std::sqrt(px / std::pow(10.0, snr_db / 10.0) / 2.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    ComplexSignal noise(x.size(), x.sample_rate);
    for (auto& v : noise.samples) {
        const double re = gauss(rng);
        v = {re, gauss(rng)};
    }
    return noise;
}

ComplexSignal add_awgn(const ComplexSignal& x, double snr_db, std::uint64_t seed) {
    return {x.samples + awgn(x, snr_db, seed).samples, x.sample_rate};
}

SimulationOutput simulate(const RadarScenario& s) {
    s.validate();
    SimulationOutput out;
    out.clean = lowpass_filter(synth_target_beat(s.params, s.targets), s.params.lpf_cutoff);
    out.interference = synth_interference_beat(s.params, s.interferers);
    if (s.interference_gain != 1.0)
        out.interference.samples = cplx(s.interference_gain) * out.interference.samples;
    out.noise = s.snr_db ? awgn(out.clean, *s.snr_db, s.rng_seed)
                         : ComplexSignal(out.clean.size(), s.params.sample_rate);
    out.contaminated = {out.clean.samples + out.interference.samples + out.noise.samples,
                        s.params.sample_rate};
    return out;
}

double calibrate_interference_gain(const RadarScenario& s, double sinr_db, CalibrationTarget mode) {
    RadarScenario unit = s;
    unit.interference_gain = 1.0;
    if (mode == CalibrationTarget::interference_only) unit.snr_db.reset();
    const auto sim = simulate(unit);
    const double ps = l2_norm(sim.clean.samples);
    if (!(ps > 0.0)) throw NumericalError("cannot calibrate against a zero target signal");
    if (!(l2_norm(sim.interference.samples) > 0.0))
        throw NumericalError("cannot calibrate: interference is identically zero");

    auto sinr_at = [&](double log_gain) {
        const cplx g = std::pow(10.0, log_gain);
        double den = 0.0;
        for (std::size_t k = 0; k < sim.clean.size(); ++k)
            den += std::norm(g * sim.interference[k] + sim.noise[k]);
        return 20.0 * std::log10(ps / std::sqrt(den));
    };

    double lo = -8.0, hi = 8.0;
    if (!(sinr_at(lo) >= sinr_db && sinr_at(hi) <= sinr_db))
        throw NumericalError(fmt::format("SINR {} dB is not reachable by scaling the interference", sinr_db));
    for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (sinr_at(mid) > sinr_db ? lo : hi) = mid;
    }
    return std::pow(10.0, 0.5 * (lo + hi));
}

// Scenario files use SI units throughout; key suffixes name the unit.

void to_json(nlohmann::json& j, const RadarParams& p) {
    j = {{"carrier_freq_hz", p.carrier_freq},
         {"bandwidth_hz", p.bandwidth},
         {"chirp_duration_s", p.chirp_duration},
         {"sample_rate_hz", p.sample_rate},
         {"lpf_cutoff_hz", p.lpf_cutoff}};
}

void from_json(const nlohmann::json& j, RadarParams& p) {
    detail::require_keys_from(j, "params", {"carrier_freq_hz", "bandwidth_hz", "chirp_duration_s", "sample_rate_hz", "lpf_cutoff_hz"});
    RadarParams d;
    p.carrier_freq = j.value("carrier_freq_hz", d.carrier_freq);
    p.bandwidth = j.value("bandwidth_hz", d.bandwidth);
    p.chirp_duration = j.value("chirp_duration_s", d.chirp_duration);
    p.sample_rate = j.value("sample_rate_hz", d.sample_rate);
    p.lpf_cutoff = j.value("lpf_cutoff_hz", d.lpf_cutoff);
}

void to_json(nlohmann::json& j, const Target& t) {
    j = {{"range_m", t.range}, {"amplitude", {t.amplitude.real(), t.amplitude.imag()}}};
}

void from_json(const nlohmann::json& j, Target& t) {
    detail::require_keys_from(j, "target", {"range_m", "amplitude"});
    t.range = j.at("range_m").get<double>();
    t.amplitude = {1.0, 0.0};
    if (j.contains("amplitude")) {
        const auto& a = j.at("amplitude");
        if (a.is_number()) t.amplitude = a.get<double>();
        else t.amplitude = {a.at(0).get<double>(), a.at(1).get<double>()};
    }
}

void to_json(nlohmann::json& j, const Interferer& i) {
    j = {{"start_freq_hz", i.start_freq},
         {"slope_hz_per_s", i.slope},
         {"delay_s", i.delay},
         {"window_s", {i.window_start, i.window_end}},
         {"constant_delay_phase", i.constant_delay_phase}};
}

void from_json(const nlohmann::json& j, Interferer& i) {
    detail::require_keys_from(j, "interferer",
                              {"start_freq_hz", "slope_hz_per_s", "delay_s", "window_s", "constant_delay_phase"});
    i.start_freq = j.value("start_freq_hz", 77e9);
    i.slope = j.at("slope_hz_per_s").get<double>();
    i.delay = j.value("delay_s", 0.0);
    const auto& w = j.at("window_s");
    i.window_start = w.at(0).get<double>();
    i.window_end = w.at(1).get<double>();
    i.constant_delay_phase = j.value("constant_delay_phase", false);
}

void to_json(nlohmann::json& j, const RadarScenario& s) {
    j = {{"params", s.params},
         {"targets", s.targets},
         {"interferers", s.interferers},
         {"snr_db", s.snr_db ? nlohmann::json(*s.snr_db) : nlohmann::json(nullptr)},
         {"rng_seed", s.rng_seed},
         {"interference_gain", s.interference_gain}};
}

void from_json(const nlohmann::json& j, RadarScenario& s) {
    detail::require_keys_from(j, "scenario",
                              {"params", "targets", "interferers", "snr_db", "rng_seed", "interference_gain"});
    s = RadarScenario{};
    if (j.contains("params")) s.params = j.at("params").get<RadarParams>();
    if (j.contains("targets")) s.targets = j.at("targets").get<std::vector<Target>>();
    if (j.contains("interferers")) s.interferers = j.at("interferers").get<std::vector<Interferer>>();
    if (j.contains("snr_db") && !j.at("snr_db").is_null()) s.snr_db = j.at("snr_db").get<double>();
    s.rng_seed = j.value("rng_seed", std::uint64_t{0});
    s.interference_gain = j.value("interference_gain", 1.0);
}

}  // namespace vafer
