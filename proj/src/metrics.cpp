#include "vafer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vafer/errors.hpp"
#include "vafer/fft.hpp"

namespace vafer {
namespace {

void require_same_length(const ComplexSignal& a, const ComplexSignal& b) {
    if (a.size() != b.size())
        throw LengthMismatch(fmt::format("signal lengths differ: {} vs {}", a.size(), b.size()));
}

double ratio_db(double num, double den) {
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(num / den);
}

}  // namespace

double sinr_input(const ComplexSignal& s_r, const ComplexSignal& s_int, const ComplexSignal& noise) {
    require_same_length(s_r, s_int);
    require_same_length(s_r, noise);
    return ratio_db(l2_norm(s_r.samples), l2_norm(s_int.samples + noise.samples));
}

double sinr_output(const ComplexSignal& s_r, const ComplexSignal& r_hat) {
    require_same_length(s_r, r_hat);
    return ratio_db(l2_norm(s_r.samples), l2_norm(s_r.samples - r_hat.samples));
}

double correlation_coefficient(const ComplexSignal& s_r, const ComplexSignal& r_hat) {
    require_same_length(s_r, r_hat);
    const double ns = l2_norm(s_r.samples), nr = l2_norm(r_hat.samples);
    if (!(ns > 0.0) || !(nr > 0.0)) throw ZeroSignal("correlation of a zero signal is undefined");
    cplx inner = 0.0;
    for (std::size_t i = 0; i < s_r.size(); ++i) inner += std::conj(s_r[i]) * r_hat[i];
    return std::min(1.0, std::abs(inner) / (ns * nr));
}

double cap_db(double db) { return std::min(db, kSinrCapDb); }

RangeProfile range_profile(const ComplexSignal& beat, const RadarParams& p) {
    const std::size_t n = beat.size();
    const cvec spec = fft::forward(beat.samples);
    RangeProfile out;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * beat.sample_rate / static_cast<double>(n);
        out.range_m.push_back(range_from_beat(f, p));
        out.level_db.push_back(20.0 * std::log10(std::max(std::abs(spec[k]), 1e-300)));
    }
    return out;
}

std::vector<Peak> detect_peaks(const RangeProfile& profile, double min_prominence_db) {
    const auto& y = profile.level_db;
    const std::size_t n = y.size();
    std::vector<Peak> peaks;
    if (n < 3) return peaks;

    std::vector<double> sorted = y;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    double median = sorted[n / 2];
    if (n % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2));
        median = 0.5 * (median + lower);
    }

    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        // Walk across a plateau; a peak must fall on its right side.
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 >= n || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t at = (i + j) / 2;
        double left_base = y[i];
        for (std::size_t l = i; l-- > 0;) {
            if (y[l] > y[i]) break;
            left_base = std::min(left_base, y[l]);
        }
        double right_base = y[i];
        for (std::size_t r = j + 1; r < n; ++r) {
            if (y[r] > y[i]) break;
            right_base = std::min(right_base, y[r]);
        }
        const double prominence = y[i] - std::max(left_base, right_base);
        if (prominence >= min_prominence_db && y[i] >= median + min_prominence_db)
            peaks.push_back({at, profile.range_m[at], y[at], prominence});
        i = j + 1;
    }
    return peaks;
}

std::string eval_csv_header() { return "seed,scenario_id,method,sinr_in_db,sinr_out_db,rho,n_peaks"; }

std::string eval_csv_row(const EvalReport& r) {
    return fmt::format("{},{},{},{:.10g},{:.10g},{:.10g},{}", r.seed, r.scenario_id, r.method, cap_db(r.sinr_in_db),
                       cap_db(r.sinr_out_db), r.rho, r.peaks.size());
}

void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalReport>& rows) {
    auto out = fmt::output_file(path.string());
    out.print("{}\n", eval_csv_header());
    for (const auto& r : rows) out.print("{}\n", eval_csv_row(r));
}

void write_range_profile_csv(const std::filesystem::path& path, const RangeProfile& p) {
    auto out = fmt::output_file(path.string());
    out.print("range_m,level_db\n");
    for (std::size_t i = 0; i < p.range_m.size(); ++i)
        out.print("{:.10g},{:.10g}\n", p.range_m[i], p.level_db[i]);
}

}  // namespace vafer
