#include "vafer/vmd.hpp"
#include "json_keys.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vafer/fft.hpp"

namespace vafer {

NLOHMANN_JSON_SERIALIZE_ENUM(InitScheme, {
    {InitScheme::zero, "zero"},
    {InitScheme::uniform_grid, "uniform_grid"},
    {InitScheme::seeded_random, "seeded_random"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(BoundaryMode, {
    {BoundaryMode::none, "none"},
    {BoundaryMode::mirror, "mirror"},
    {BoundaryMode::linear_prediction, "linear_prediction"},
})

void VmdConfig::validate() const {
    if (num_modes < 1) throw ConfigError("num_modes must be at least 1");
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw ConfigError("penalty must be finite and nonnegative");
    if (!(lagrange_step >= 0.0)) throw ConfigError("lagrange_step must be nonnegative");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (init_band_hz && !(*init_band_hz > 0.0)) throw ConfigError("init_band_hz must be positive");
    if (!(extension_fraction >= 0.0) || extension_fraction > 1.0)
        throw ConfigError("extension_fraction must lie in [0, 1]");
}

NotConverged::NotConverged(VmfSet partial)
    : NumericalError(fmt::format("VMD did not converge in {} iterations (residual {:.3e})",
                                 partial.iterations_used, partial.final_residual)),
      partial_(std::move(partial)) {}

std::vector<double> omega_axis(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = 2.0 * std::numbers::pi * fft::bin_frequency(k, n);
    return w;
}

cvec update_mode(const VmdState& state, std::size_t k, const cvec& x_hat,
                 const std::vector<double>& omega, const VmdConfig& cfg) {
    const std::size_t n = x_hat.size();
    const double wk = state.center_freqs[k];
    cvec out(n);
    for (std::size_t b = 0; b < n; ++b) {
        cplx residual = x_hat[b] + 0.5 * state.lagrange_spectrum[b];
        for (std::size_t i = 0; i < state.mode_spectra.size(); ++i)
            if (i != k) residual -= state.mode_spectra[i][b];
        const double d = omega[b] - wk;
        out[b] = residual / (1.0 + 2.0 * cfg.penalty * d * d);
    }
    return out;
}

double update_center_freq(const cvec& mode_spectrum, const std::vector<double>& omega) {
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < mode_spectrum.size(); ++b) {
        if (omega[b] < 0.0) continue;
        const double p = std::norm(mode_spectrum[b]);
        num += omega[b] * p;
        den += p;
    }
    if (!(den > 0.0)) throw ZeroSpectrum("mode spectrum has no power at nonnegative frequencies");
    return num / den;
}

cvec update_lagrangian(const VmdState& state, const cvec& x_hat, const VmdConfig& cfg) {
    cvec lam = state.lagrange_spectrum;
    if (cfg.lagrange_step == 0.0) return lam;
    for (std::size_t b = 0; b < lam.size(); ++b) {
        cplx residual = x_hat[b];
        for (const auto& m : state.mode_spectra) residual -= m[b];
        lam[b] += cfg.lagrange_step * residual;
    }
    return lam;
}

double convergence_metric(const std::vector<cvec>& prev, const std::vector<cvec>& next) {
    if (prev.size() != next.size()) throw LengthMismatch("mode counts differ");
    double total = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
        const double den = norm2(next[k]);
        if (den > 0.0) total += norm2(next[k] - prev[k]) / den;
    }
    return total;
}

namespace {

std::vector<double> initial_centers(const VmdConfig& cfg, double fs) {
    const auto K = static_cast<std::size_t>(cfg.num_modes);
    double limit = std::numbers::pi;
    if (cfg.init_band_hz) limit = std::min(limit, 2.0 * std::numbers::pi * *cfg.init_band_hz / fs);
    std::vector<double> w(K, 0.0);
    switch (cfg.init_scheme) {
    case InitScheme::zero:
        break;
    case InitScheme::uniform_grid:
        for (std::size_t k = 0; k < K; ++k) w[k] = limit * static_cast<double>(k) / static_cast<double>(K);
        break;
    case InitScheme::seeded_random: {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(0.0, limit);
        for (auto& v : w) v = u(rng);
        std::sort(w.begin(), w.end());
        break;
    }
    }
    return w;
}

}  // namespace

VmfSet vmd_run(const ComplexSignal& x, const VmdConfig& cfg) {
    cfg.validate();
    x.validate();
    const std::size_t n = x.size();
    const auto K = static_cast<std::size_t>(cfg.num_modes);
    if (n < 4 * K) throw ConfigError(fmt::format("input of {} samples is too short for {} modes", n, K));
    if (!(norm2(x.samples) > 0.0)) throw DegenerateInput("VMD input is identically zero");

    std::size_t ext = 0;
    cvec work;
    switch (cfg.boundary) {
    case BoundaryMode::none:
        work = x.samples;
        break;
    case BoundaryMode::mirror:
        ext = std::min(n, static_cast<std::size_t>(std::lround(cfg.extension_fraction * static_cast<double>(n))));
        work = mirror_extend(x.samples, ext);
        break;
    case BoundaryMode::linear_prediction:
        ext = static_cast<std::size_t>(std::lround(cfg.extension_fraction * static_cast<double>(n)));
        work = linear_prediction_extend(x.samples, ext, std::min<std::size_t>(64, std::max<std::size_t>(1, n / 4)));
        break;
    }

    const std::size_t m = work.size();
    const cvec x_hat = fft::forward(work);
    const auto omega = omega_axis(m);

    VmdState st;
    st.mode_spectra.assign(K, cvec(m));
    st.center_freqs = initial_centers(cfg, x.sample_rate);
    st.lagrange_spectrum.assign(m, 0.0);

    bool converged = false;
    double residual = 0.0;
    while (st.iteration < cfg.max_iterations) {
        ++st.iteration;
        const auto prev = st.mode_spectra;
        for (std::size_t k = 0; k < K; ++k) {
            st.mode_spectra[k] = update_mode(st, k, x_hat, omega, cfg);
            try {
                st.center_freqs[k] = update_center_freq(st.mode_spectra[k], omega);
            } catch (const ZeroSpectrum&) {
                // keep the previous center
            }
        }
        st.lagrange_spectrum = update_lagrangian(st, x_hat, cfg);
        residual = convergence_metric(prev, st.mode_spectra);
        if (residual < cfg.tolerance) {
            converged = true;
            break;
        }
    }

    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return st.center_freqs[a] < st.center_freqs[b]; });

    VmfSet out;
    out.iterations_used = st.iteration;
    out.converged = converged;
    out.final_residual = residual;
    for (std::size_t k : order) {
        cvec u = fft::inverse(st.mode_spectra[k]);
        out.modes.emplace_back(cvec(u.begin() + static_cast<std::ptrdiff_t>(ext),
                                    u.begin() + static_cast<std::ptrdiff_t>(ext + n)),
                               x.sample_rate);
        out.center_freqs_hz.push_back(st.center_freqs[k] * x.sample_rate / (2.0 * std::numbers::pi));
    }
    return out;
}

VmfSet vmd_decompose(const ComplexSignal& x, const VmdConfig& cfg) {
    VmfSet set = vmd_run(x, cfg);
    if (!set.converged) throw NotConverged(std::move(set));
    return set;
}

namespace {

constexpr char kVmfMagic[4] = {'V', 'M', 'F', 'S'};

void put_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::ostream& os, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_uint(std::istream& is, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw ConfigError("truncated VMFS container");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

}  // namespace

std::filesystem::path vmf_sidecar_path(const std::filesystem::path& container) {
    auto p = container;
    p += ".meta.txt";
    return p;
}

void write_vmf_set(const std::filesystem::path& container, const VmfSet& set) {
    {
        std::ofstream os(container, std::ios::binary);
        if (!os) throw ConfigError(fmt::format("cannot open {} for writing", container.string()));
        os.write(kVmfMagic, 4);
        put_u32(os, 1);
        put_u32(os, static_cast<std::uint32_t>(set.modes.size()));
        put_u32(os, 0);
        for (const auto& m : set.modes) {
            put_u64(os, m.size());
            write_csig(os, m);
        }
    }
    auto out = fmt::output_file(vmf_sidecar_path(container).string());
    out.print("modes {}\niterations {}\nconverged {}\nfinal_residual {:.17g}\n", set.modes.size(),
              set.iterations_used, set.converged ? 1 : 0, set.final_residual);
    for (double f : set.center_freqs_hz) out.print("center_freq_hz {:.17g}\n", f);
}

VmfSet read_vmf_set(const std::filesystem::path& container) {
    std::ifstream is(container, std::ios::binary);
    if (!is) throw ConfigError(fmt::format("cannot open {}", container.string()));
    char magic[4];
    if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kVmfMagic)) throw ConfigError("not a VMFS container");
    if (get_uint(is, 4) != 1) throw ConfigError("unsupported VMFS version");
    const auto count = get_uint(is, 4);
    get_uint(is, 4);
    VmfSet set;
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto samples = get_uint(is, 8);
        set.modes.push_back(read_csig(is, samples));
    }
    std::ifstream side(vmf_sidecar_path(container));
    std::string key;
    while (side >> key) {
        if (key == "iterations") side >> set.iterations_used;
        else if (key == "converged") { int c; side >> c; set.converged = c != 0; }
        else if (key == "final_residual") side >> set.final_residual;
        else if (key == "center_freq_hz") { double f; side >> f; set.center_freqs_hz.push_back(f); }
        else { std::string skip; side >> skip; }
    }
    return set;
}

void to_json(nlohmann::json& j, const VmdConfig& c) {
    j = {{"num_modes", c.num_modes},
         {"penalty_alpha", c.penalty},
         {"lagrange_step", c.lagrange_step},
         {"tolerance", c.tolerance},
         {"max_iterations", c.max_iterations},
         {"init_scheme", c.init_scheme},
         {"init_band_hz", c.init_band_hz ? nlohmann::json(*c.init_band_hz) : nlohmann::json(nullptr)},
         {"seed", c.seed},
         {"boundary", c.boundary},
         {"extension_fraction", c.extension_fraction}};
}

void from_json(const nlohmann::json& j, VmdConfig& c) {
    detail::require_keys_from(j, "vmd",
                              {"num_modes", "penalty_alpha", "lagrange_step", "tolerance", "max_iterations", "init_scheme",
                               "init_band_hz", "seed", "boundary", "extension_fraction"});
    VmdConfig d;
    c.num_modes = j.value("num_modes", d.num_modes);
    c.penalty = j.value("penalty_alpha", d.penalty);
    c.lagrange_step = j.value("lagrange_step", d.lagrange_step);
    c.tolerance = j.value("tolerance", d.tolerance);
    c.max_iterations = j.value("max_iterations", d.max_iterations);
    c.init_scheme = j.value("init_scheme", d.init_scheme);
    c.init_band_hz.reset();
    if (j.contains("init_band_hz") && !j.at("init_band_hz").is_null()) c.init_band_hz = j.at("init_band_hz").get<double>();
    c.seed = j.value("seed", d.seed);
    c.boundary = j.value("boundary", d.boundary);
    c.extension_fraction = j.value("extension_fraction", d.extension_fraction);
}

}  // namespace vafer
