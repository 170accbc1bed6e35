#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vafer/signal.hpp"
#include "vafer/signal_model.hpp"

namespace vafer {

inline constexpr double kSinrCapDb = 300.0;

// In-memory values may be +inf; cap_db clamps them for serialization.
double sinr_input(const ComplexSignal& s_r, const ComplexSignal& s_int, const ComplexSignal& noise);
double sinr_output(const ComplexSignal& s_r, const ComplexSignal& r_hat);
double correlation_coefficient(const ComplexSignal& s_r, const ComplexSignal& r_hat);
double cap_db(double db);

struct RangeProfile {
    std::vector<double> range_m;
    std::vector<double> level_db;
};

struct Peak {
    std::size_t index = 0;
    double range_m = 0.0;
    double level_db = 0.0;
    double prominence_db = 0.0;
};

// Windowless DFT magnitude over the nonnegative beat frequencies.
RangeProfile range_profile(const ComplexSignal& beat, const RadarParams& p);

inline constexpr double kDefaultProminenceDb = 12.0;

// Local maxima whose topographic prominence is at least min_prominence_db and
// whose level clears the profile median by the same margin.
std::vector<Peak> detect_peaks(const RangeProfile& profile, double min_prominence_db = kDefaultProminenceDb);

struct EvalReport {
    std::uint64_t seed = 0;
    std::string scenario_id;
    std::string method;
    double sinr_in_db = 0.0;
    double sinr_out_db = 0.0;
    double rho = 0.0;
    RangeProfile profile;
    std::vector<Peak> peaks;
};

std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& r);
void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalReport>& rows);
void write_range_profile_csv(const std::filesystem::path& path, const RangeProfile& p);

}  // namespace vafer
