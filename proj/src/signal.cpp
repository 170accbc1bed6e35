#include "vafer/signal.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "vafer/errors.hpp"

namespace vafer {

void ComplexSignal::validate() const {
    if (samples.empty()) throw ConfigError("signal is empty");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw ConfigError(fmt::format("invalid sample rate {}", sample_rate));
    for (const auto& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ConfigError("signal contains non-finite samples");
}

double norm2(const cvec& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return s;
}

double l2_norm(const cvec& x) { return std::sqrt(norm2(x)); }

cvec operator+(const cvec& a, const cvec& b) {
    if (a.size() != b.size()) throw LengthMismatch("length mismatch in signal sum");
    cvec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

cvec operator-(const cvec& a, const cvec& b) {
    if (a.size() != b.size()) throw LengthMismatch("length mismatch in signal difference");
    cvec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

cvec operator*(cplx s, const cvec& a) {
    cvec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

namespace {

constexpr std::array<char, 4> kMagic{'C', 'S', 'I', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw ConfigError("truncated CSIG stream");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

void write_csig(std::ostream& os, const ComplexSignal& x) {
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(os, kVersion);
    put_le<double>(os, x.sample_rate);
    for (const auto& v : x.samples) {
        put_le<double>(os, v.real());
        put_le<double>(os, v.imag());
    }
}

ComplexSignal read_csig(std::istream& is, std::size_t count) {
    std::array<char, 4> magic;
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw ConfigError("not a CSIG stream");
    const auto version = get_le<std::uint32_t>(is);
    if (version != kVersion) throw ConfigError(fmt::format("unsupported CSIG version {}", version));
    ComplexSignal x(count, get_le<double>(is));
    for (auto& v : x.samples) {
        const double re = get_le<double>(is);
        v = {re, get_le<double>(is)};
    }
    return x;
}

void write_csig(const std::filesystem::path& path, const ComplexSignal& x) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError(fmt::format("cannot open {} for writing", path.string()));
    write_csig(os, x);
}

ComplexSignal read_csig(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(fmt::format("cannot open {}", path.string()));
    const auto bytes = std::filesystem::file_size(path);
    if (bytes < 16 || (bytes - 16) % 16 != 0)
        throw ConfigError(fmt::format("{}: size {} is not a whole CSIG record", path.string(), bytes));
    return read_csig(is, (bytes - 16) / 16);
}

void write_signal_csv(const std::filesystem::path& path, const ComplexSignal& x) {
    auto out = fmt::output_file(path.string());
    out.print("index,re,im\n");
    for (std::size_t i = 0; i < x.size(); ++i)
        out.print("{},{:.17g},{:.17g}\n", i, x[i].real(), x[i].imag());
}

}  // namespace vafer
