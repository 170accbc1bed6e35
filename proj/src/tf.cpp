#include "vafer/tf.hpp"
#include "json_keys.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vafer/errors.hpp"
#include "vafer/fft.hpp"

namespace vafer {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMagnitudeGuard = 1e-8;

TfSpectrum make_frame_grid(const ComplexSignal& x, const Window& w, TfKind kind) {
    w.validate();
    x.validate();
    if (w.length > x.size())
        throw WindowTooLong(fmt::format("window length {} exceeds signal length {}", w.length, x.size()));
    TfSpectrum s;
    s.n_frames = (x.size() - 1) / w.hop + 1;
    s.n_bins = w.fft_size();
    s.values.assign(s.n_frames * s.n_bins, 0.0);
    s.window = w;
    s.source_length = x.size();
    s.sample_rate = x.sample_rate;
    s.kind = kind;
    for (std::size_t f = 0; f < s.n_frames; ++f)
        s.time_axis.push_back(static_cast<double>(f * w.hop) / x.sample_rate);
    for (auto m : column_indices(s.n_bins))
        s.freq_axis.push_back(static_cast<double>(m) * x.sample_rate / static_cast<double>(s.n_bins));
    return s;
}

std::size_t fft_bin(std::ptrdiff_t m, std::size_t n) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((m % nn) + nn) % nn);
}

// Window-local DFT of frame f (phase referenced to the frame center), FFT bin order.
void local_spectrum(const ComplexSignal& x, const std::vector<double>& taper, std::size_t center, cvec& buf) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const auto h = static_cast<std::ptrdiff_t>((taper.size() - 1) / 2);
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto c = static_cast<std::ptrdiff_t>(center);
    for (std::ptrdiff_t s = -h; s <= h; ++s) {
        const std::ptrdiff_t idx = c + s;
        if (idx < 0 || idx >= n) continue;
        buf[fft_bin(s, buf.size())] = x[static_cast<std::size_t>(idx)] * taper[static_cast<std::size_t>(s + h)];
    }
    fft::forward(std::span<cplx>(buf));
}

TfSpectrum transform(const ComplexSignal& x, const Window& w, const std::vector<double>& taper) {
    TfSpectrum s = make_frame_grid(x, w, TfKind::stft);
    const auto cols = column_indices(s.n_bins);
    cvec buf(s.n_bins);
    for (std::size_t f = 0; f < s.n_frames; ++f) {
        const std::size_t center = f * w.hop;
        local_spectrum(x, taper, center, buf);
        for (std::size_t c = 0; c < s.n_bins; ++c) {
            // exp(-i omega t), with omega*t reduced modulo 2 pi in integer arithmetic
            const auto turns = (cols[c] * static_cast<std::ptrdiff_t>(center)) % static_cast<std::ptrdiff_t>(s.n_bins);
            const double phase = -kTwoPi * static_cast<double>(turns) / static_cast<double>(s.n_bins);
            s.at(f, c) = buf[fft_bin(cols[c], s.n_bins)] * std::polar(1.0, phase);
        }
    }
    return s;
}

}  // namespace

void Window::validate() const {
    if (length % 2 == 0 || length == 0) throw ConfigError("window length must be odd");
    if (!(sigma > 0.0)) throw ConfigError("window sigma must be positive");
    if (hop < 1) throw ConfigError("hop must be at least 1");
}

std::size_t Window::fft_size() const {
    std::size_t m = 1;
    while (m < 2 * length) m <<= 1;
    return m;
}

std::vector<double> Window::values() const {
    const auto h = static_cast<double>(half());
    std::vector<double> g(length);
    for (std::size_t i = 0; i < length; ++i) {
        const double s = static_cast<double>(i) - h;
        g[i] = std::exp(-s * s / (2.0 * sigma * sigma));
    }
    return g;
}

std::vector<double> Window::derivative() const {
    auto g = values();
    const auto h = static_cast<double>(half());
    for (std::size_t i = 0; i < length; ++i) g[i] *= -(static_cast<double>(i) - h) / (sigma * sigma);
    return g;
}

TfSpectrum& TfSpectrum::operator+=(const TfSpectrum& other) {
    if (other.n_frames != n_frames || other.n_bins != n_bins) throw ShapeMismatch("spectra shapes differ");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

std::vector<std::ptrdiff_t> column_indices(std::size_t n_bins) {
    std::vector<std::ptrdiff_t> m(n_bins);
    const auto half = static_cast<std::ptrdiff_t>(n_bins / 2);
    for (std::size_t c = 0; c < n_bins; ++c) m[c] = static_cast<std::ptrdiff_t>(c) - half + 1;
    return m;
}

TfSpectrum stft(const ComplexSignal& x, const Window& w) { return transform(x, w, w.values()); }

TfSpectrum stft_derivative(const ComplexSignal& x, const Window& w) { return transform(x, w, w.derivative()); }

Reassignment reassignment_centroid(const TfSpectrum& v_g, const TfSpectrum& v_gprime) {
    if (v_g.n_frames != v_gprime.n_frames || v_g.n_bins != v_gprime.n_bins)
        throw ShapeMismatch("V^g and V^g' shapes differ");
    Reassignment r;
    r.n_frames = v_g.n_frames;
    r.n_bins = v_g.n_bins;
    r.omega_hat.assign(v_g.values.size(), 0.0);
    r.valid.assign(v_g.values.size(), 0);
    double peak = 0.0;
    for (const auto& v : v_g.values) peak = std::max(peak, std::abs(v));
    const double guard = kMagnitudeGuard * peak;
    const auto cols = column_indices(v_g.n_bins);
    for (std::size_t f = 0; f < r.n_frames; ++f) {
        for (std::size_t c = 0; c < r.n_bins; ++c) {
            const std::size_t i = f * r.n_bins + c;
            const double mag = std::abs(v_g.values[i]);
            if (!(mag > 0.0) || mag < guard) continue;
            const double omega = kTwoPi * static_cast<double>(cols[c]) / static_cast<double>(r.n_bins);
            r.omega_hat[i] = (omega - (v_gprime.values[i] / v_g.values[i]).imag()) * v_g.sample_rate;
            r.valid[i] = 1;
        }
    }
    return r;
}

TfSpectrum fsst(const ComplexSignal& x, const Window& w) {
    const TfSpectrum vg = stft(x, w);
    const Reassignment ra = reassignment_centroid(vg, stft_derivative(x, w));
    TfSpectrum u = make_frame_grid(x, w, TfKind::fsst);
    const std::size_t M = u.n_bins;
    const auto cols = column_indices(M);
    const double g0 = w.values()[w.half()];
    const double scale = 1.0 / (static_cast<double>(M) * g0);
    const auto half = static_cast<std::ptrdiff_t>(M / 2);
    for (std::size_t f = 0; f < u.n_frames; ++f) {
        const auto center = static_cast<std::ptrdiff_t>(f * w.hop);
        for (std::size_t c = 0; c < M; ++c) {
            const std::size_t i = f * M + c;
            if (!ra.valid[i]) continue;
            // Undo the absolute-time phase at the analysis frequency so the
            // frequency sum of a frame returns the center sample.
            const auto turns = (cols[c] * center) % static_cast<std::ptrdiff_t>(M);
            const cplx local = vg.values[i] * std::polar(1.0, kTwoPi * static_cast<double>(turns) / static_cast<double>(M));
            const double cycles = ra.omega_hat[i] / (kTwoPi * u.sample_rate);
            auto target = static_cast<std::ptrdiff_t>(std::llround(cycles * static_cast<double>(M)));
            target = static_cast<std::ptrdiff_t>(fft_bin(target, M));
            if (target > half) target -= static_cast<std::ptrdiff_t>(M);
            u.at(f, static_cast<std::size_t>(target + half - 1)) += local * scale;
        }
    }
    return u;
}

ComplexSignal ifsst(const TfSpectrum& u, const Window& w) {
    if (w.hop != 1 || u.window.hop != 1) throw UnsupportedHop("inverse FSST requires hop 1");
    if (u.n_frames != u.source_length) throw ShapeMismatch("frame count does not match source length");
    ComplexSignal out(u.source_length, u.sample_rate);
    for (std::size_t f = 0; f < u.n_frames; ++f) {
        cplx acc = 0.0;
        for (std::size_t c = 0; c < u.n_bins; ++c) acc += u.at(f, c);
        out[f] = acc;
    }
    return out;
}

ComplexSignal istft(const TfSpectrum& v, const Window& w) {
    w.validate();
    if (v.n_bins != w.fft_size()) throw ShapeMismatch("spectrum bin count does not match the window");
    const std::size_t M = v.n_bins;
    const auto cols = column_indices(M);
    const auto g = w.values();
    const auto h = static_cast<std::ptrdiff_t>(w.half());
    const auto n = static_cast<std::ptrdiff_t>(v.source_length);
    cvec num(v.source_length);
    std::vector<double> den(v.source_length, 0.0);
    cvec buf(M);
    for (std::size_t f = 0; f < v.n_frames; ++f) {
        const auto center = static_cast<std::ptrdiff_t>(f * w.hop);
        for (std::size_t c = 0; c < M; ++c) {
            const auto turns = (cols[c] * center) % static_cast<std::ptrdiff_t>(M);
            buf[fft_bin(cols[c], M)] =
                v.at(f, c) * std::polar(1.0, kTwoPi * static_cast<double>(turns) / static_cast<double>(M));
        }
        fft::inverse(std::span<cplx>(buf));
        for (std::ptrdiff_t s = -h; s <= h; ++s) {
            const std::ptrdiff_t idx = center + s;
            if (idx < 0 || idx >= n) continue;
            const double gs = g[static_cast<std::size_t>(s + h)];
            num[static_cast<std::size_t>(idx)] += gs * buf[fft_bin(s, M)];
            den[static_cast<std::size_t>(idx)] += gs * gs;
        }
    }
    ComplexSignal out(v.source_length, v.sample_rate);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (den[i] > 0.0) out[i] = num[i] / den[i];
    return out;
}

double stft_energy(const TfSpectrum& v) {
    double g2 = 0.0;
    for (double gi : v.window.values()) g2 += gi * gi;
    return norm2(v.values) * static_cast<double>(v.window.hop) / (static_cast<double>(v.n_bins) * g2);
}

void write_tf_db_csv(const std::filesystem::path& path, const TfSpectrum& s) {
    auto out = fmt::output_file(path.string());
    out.print("time_s");
    for (double f : s.freq_axis) out.print(",{:.9g}", f);
    out.print("\n");
    for (std::size_t f = 0; f < s.n_frames; ++f) {
        out.print("{:.9g}", s.time_axis[f]);
        for (std::size_t c = 0; c < s.n_bins; ++c)
            out.print(",{:.6g}", 20.0 * std::log10(std::max(std::abs(s.at(f, c)), 1e-15)));
        out.print("\n");
    }
}

NLOHMANN_JSON_SERIALIZE_ENUM(Window::Kind, {{Window::Kind::gaussian, "gaussian"}})

void to_json(nlohmann::json& j, const Window& w) {
    j = {{"kind", w.kind}, {"length", w.length}, {"sigma", w.sigma}, {"hop", w.hop}};
}

void from_json(const nlohmann::json& j, Window& w) {
    detail::require_keys_from(j, "window", {"kind", "length", "sigma", "hop"});
    Window d;
    w.kind = j.value("kind", d.kind);
    w.length = j.value("length", d.length);
    w.sigma = j.value("sigma", static_cast<double>(w.length) / 16.0);
    w.hop = j.value("hop", d.hop);
}

}  // namespace vafer
