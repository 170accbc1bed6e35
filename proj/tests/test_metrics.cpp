#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "vafer/errors.hpp"
#include "vafer/metrics.hpp"
#include "vafer/signal_model.hpp"

using namespace vafer;

namespace {

constexpr double kFs = 22e6;
const RadarParams kParams;

ComplexSignal beat_for(std::initializer_list<double> ranges) {
    std::vector<Target> t;
    for (double r : ranges) t.push_back({r, {1.0, 0.0}});
    return synth_target_beat(kParams, t);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("input SINR examples") {
    oracle::Gen gen(51);
    const ComplexSignal s(gen.complex_vector(100), kFs);
    const ComplexSignal zero(100, kFs);
    // ||s_int + noise|| = ||s|| with the noise carrying all of it.
    CHECK(std::abs(sinr_input(s, zero, {std::polar(1.0, 0.3) * s.samples, kFs})) <= 1e-12);
    CHECK(std::isinf(sinr_input(s, zero, zero)));
    CHECK(cap_db(sinr_input(s, zero, zero)) == kSinrCapDb);
    CHECK_THROWS_AS(sinr_input(s, ComplexSignal(99, kFs), zero), LengthMismatch);
}

TEST_CASE("output SINR examples") {
    oracle::Gen gen(52);
    const ComplexSignal s(gen.complex_vector(100), kFs);
    CHECK(std::isinf(sinr_output(s, s)));
    CHECK(sinr_output(s, ComplexSignal(100, kFs)) == 0.0);
    auto e = gen.complex_vector(100);
    const double scale = 0.1 * oracle::norm(s.samples) / oracle::norm(e);
    for (auto& v : e) v *= scale;
    CHECK(sinr_output(s, {s.samples + e, kFs}) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(sinr_output(s, {1.1 * s.samples, kFs}) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("correlation coefficient examples") {
    oracle::Gen gen(53);
    const ComplexSignal s(gen.complex_vector(128), kFs);
    CHECK(correlation_coefficient(s, s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(correlation_coefficient(s, {cplx(0, 1) * s.samples, kFs}) == doctest::Approx(1.0).epsilon(1e-15));

    const ComplexSignal a(oracle::tone(128, 1e6, kFs), kFs);
    // Tones on distinct DFT bins of the record are orthogonal.
    const ComplexSignal t1(oracle::tone(128, 3.0 * kFs / 128.0, kFs), kFs);
    const ComplexSignal t2(oracle::tone(128, 7.0 * kFs / 128.0, kFs), kFs);
    CHECK(correlation_coefficient(t1, t2) <= 1e-13);
    CHECK_THROWS_AS(correlation_coefficient(s, ComplexSignal(128, kFs)), ZeroSignal);
    CHECK(correlation_coefficient(a, s) <= 1.0);
}

TEST_CASE("range profile bin spacing and single-target peak") {
    const RangeProfile p = range_profile(beat_for({50.0}), kParams);
    REQUIRE(p.range_m.size() == 496);
    const double dr = p.range_m[1] - p.range_m[0];
    CHECK(dr == doctest::Approx(kParams.range_resolution()).epsilon(1e-12));
    CHECK(std::abs(dr - 0.2778) < 3e-4);
    const auto top = std::max_element(p.level_db.begin(), p.level_db.end()) - p.level_db.begin();
    CHECK(std::abs(p.range_m[static_cast<std::size_t>(top)] - 50.0) <= dr);
}

TEST_CASE("clean four-target profile") {
    const RangeProfile p = range_profile(beat_for({10.0, 16.0, 30.0, 50.0}), kParams);
    const double dr = p.range_m[1];
    const double floor = median(p.level_db);
    const double want[] = {10.0, 16.0, 30.0, 50.0};
    const auto peaks = detect_peaks(p, 15.0);
    REQUIRE(peaks.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(peaks[i].range_m - want[i]) <= dr);
        CHECK(peaks[i].prominence_db >= 15.0);
        CHECK(peaks[i].level_db >= floor + 20.0);
    }
    CHECK(detect_peaks(p).size() == 4);
}

TEST_CASE("peak detection edge cases") {
    RangeProfile mono;
    for (int i = 0; i < 50; ++i) {
        mono.range_m.push_back(i);
        mono.level_db.push_back(3.0 * i);
    }
    CHECK(detect_peaks(mono).empty());

    // One tall spike on a flat floor; a plateau top is reported at its middle.
    RangeProfile spike;
    for (int i = 0; i < 21; ++i) {
        spike.range_m.push_back(i);
        spike.level_db.push_back(0.0);
    }
    spike.level_db[9] = spike.level_db[10] = spike.level_db[11] = 30.0;
    const auto p = detect_peaks(spike);
    REQUIRE(p.size() == 1);
    CHECK(p[0].index == 10);
    CHECK(p[0].prominence_db == 30.0);

    // A side lobe riding on the spike's skirt has little prominence.
    spike.level_db[13] = 25.0;
    spike.level_db[12] = 24.0;
    CHECK(detect_peaks(spike).size() == 1);
}

TEST_CASE("EvalReport CSV caps infinite values") {
    EvalReport r;
    r.seed = 7;
    r.scenario_id = "x";
    r.method = "fsst";
    r.sinr_in_db = 3.5;
    r.sinr_out_db = std::numeric_limits<double>::infinity();
    r.rho = 1.0;
    CHECK(eval_csv_header() == "seed,scenario_id,method,sinr_in_db,sinr_out_db,rho,n_peaks");
    CHECK(eval_csv_row(r) == "7,x,fsst,3.5,300,1,0");
}

TEST_CASE("property: output SINR of a relative error eps is -20 log10 eps") {
    oracle::Gen gen(54);
    for (int trial = 0; trial < 500; ++trial) {
        const ComplexSignal s(gen.complex_vector(static_cast<std::size_t>(gen.integer(1, 300))), kFs);
        const double eps = std::pow(10.0, gen.uniform(-6.0, 1.0));
        const double got = sinr_output(s, {(1.0 + eps) * s.samples, kFs});
        CHECK(got == doctest::Approx(20.0 * std::log10(1.0 / eps)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("property: correlation is invariant under complex scaling of either argument") {
    oracle::Gen gen(55);
    const ComplexSignal s(gen.complex_vector(200), kFs);
    const ComplexSignal r(s.samples + 0.3 * gen.complex_vector(200), kFs);
    const double base = correlation_coefficient(s, r);
    for (int trial = 0; trial < 1000; ++trial) {
        const cplx a = gen.nonzero_scalar(), b = gen.nonzero_scalar();
        const double rho = correlation_coefficient({a * s.samples, kFs}, {b * r.samples, kFs});
        CHECK(std::abs(rho - base) <= 1e-12);
        CHECK(rho >= 0.0);
        CHECK(rho <= 1.0);
    }
}

TEST_CASE("property: profile peak location ignores a global phase") {
    oracle::Gen gen(56);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexSignal x = beat_for({gen.uniform(2.0, 120.0), gen.uniform(2.0, 120.0)});
        const cplx rot = std::polar(1.0, gen.uniform(-3.14, 3.14));
        const auto a = range_profile(x, kParams);
        const auto b = range_profile({rot * x.samples, kFs}, kParams);
        CHECK(std::max_element(a.level_db.begin(), a.level_db.end()) - a.level_db.begin() ==
              std::max_element(b.level_db.begin(), b.level_db.end()) - b.level_db.begin());
        const auto pa = detect_peaks(a), pb = detect_peaks(b);
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].index == pb[i].index);
    }
}

TEST_CASE("property: finite inputs give finite or capped SINR") {
    oracle::Gen gen(57);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(1, 64));
        const ComplexSignal s(gen.complex_vector(n), kFs);
        const ComplexSignal r = gen.uniform(0.0, 1.0) < 0.2 ? s : ComplexSignal(gen.complex_vector(n), kFs);
        const double v = cap_db(sinr_output(s, r));
        CHECK(v <= kSinrCapDb);
        CHECK(!std::isnan(v));
    }
}
