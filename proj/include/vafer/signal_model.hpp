#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "vafer/signal.hpp"

namespace vafer {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RadarParams {
    double carrier_freq = 77e9;
    double bandwidth = 540e6;
    double chirp_duration = 45e-6;
    double sample_rate = 22e6;
    double lpf_cutoff = 10e6;

    double slope() const { return bandwidth / chirp_duration; }
    std::size_t num_samples() const;
    // Range covered by one DFT bin of a full-chirp transform.
    double range_resolution() const;
    void validate() const;
};

struct Target {
    double range = 0.0;
    cplx amplitude{1.0, 0.0};

    double delay() const { return 2.0 * range / kSpeedOfLight; }
    double beat_frequency(const RadarParams& p) const { return p.slope() * delay(); }
};

double range_from_beat(double beat_hz, const RadarParams& p);

struct Interferer {
    double start_freq = 77e9;
    double slope = 0.0;
    double delay = 0.0;
    double window_start = 0.0;  // seconds, inclusive
    double window_end = 0.0;    // seconds, exclusive
    // Treat the (beta/2) tau'^2 term as a constant phase rather than a term
    // growing linearly in t.
    bool constant_delay_phase = false;
};

struct RadarScenario {
    RadarParams params;
    std::vector<Target> targets;
    std::vector<Interferer> interferers;
    std::optional<double> snr_db;  // nullopt: noise-free
    std::uint64_t rng_seed = 0;
    double interference_gain = 1.0;

    void validate() const;
};

struct SimulationOutput {
    ComplexSignal clean;         // low-pass filtered target beat
    ComplexSignal interference;  // gain-scaled, low-pass filtered
    ComplexSignal noise;
    ComplexSignal contaminated;
};

ComplexSignal synth_target_beat(const RadarParams& p, const std::vector<Target>& targets);
// Unit-gain interference beat, already low-pass filtered.
ComplexSignal synth_interference_beat(const RadarParams& p, const std::vector<Interferer>& interferers);
ComplexSignal lowpass_filter(const ComplexSignal& x, double cutoff);

// Noise alone, with variance referenced to the mean power of x.
ComplexSignal awgn(const ComplexSignal& x, double snr_db, std::uint64_t seed);
ComplexSignal add_awgn(const ComplexSignal& x, double snr_db, std::uint64_t seed);

SimulationOutput simulate(const RadarScenario& s);

// Sample index range [first, last) where an interferer is active.
std::pair<std::size_t, std::size_t> active_samples(const RadarParams& p, const Interferer& i);

enum class CalibrationTarget {
    with_noise,  // ||s|| / ||g*i + noise||
    interference_only,  // ||s|| / ||g*i||
};

// Finds the interference gain that makes the composed scenario hit sinr_db.
// Throws NumericalError if the target is unreachable.
double calibrate_interference_gain(const RadarScenario& s, double sinr_db,
                                   CalibrationTarget mode = CalibrationTarget::with_noise);

void to_json(nlohmann::json& j, const RadarParams& p);
void from_json(const nlohmann::json& j, RadarParams& p);
void to_json(nlohmann::json& j, const Target& t);
void from_json(const nlohmann::json& j, Target& t);
void to_json(nlohmann::json& j, const Interferer& i);
void from_json(const nlohmann::json& j, Interferer& i);
void to_json(nlohmann::json& j, const RadarScenario& s);
void from_json(const nlohmann::json& j, RadarScenario& s);

}  // namespace vafer
