#include <algorithm>

#include "vafer/errors.hpp"
#include "vafer/vmd.hpp"

namespace vafer {

cvec burg_ar(const cvec& x, std::size_t order) {
    const std::size_t n = x.size();
    if (order >= n) throw ConfigError("AR order must be below the signal length");
    cvec f = x, b = x;
    cvec a{1.0};
    a.reserve(order + 1);
    for (std::size_t m = 0; m < order; ++m) {
        // f[m+1..n) against b[m..n-1)
        cplx num = 0.0;
        double den = 0.0;
        for (std::size_t i = m + 1; i < n; ++i) {
            num += std::conj(b[i - 1]) * f[i];
            den += std::norm(f[i]) + std::norm(b[i - 1]);
        }
        if (!(den > 0.0)) break;
        const cplx k = -2.0 * num / den;

        a.push_back(0.0);
        const cvec prev = a;
        const std::size_t len = a.size();
        for (std::size_t j = 0; j < len; ++j) a[j] = prev[j] + k * std::conj(prev[len - 1 - j]);

        for (std::size_t i = n - 1; i > m; --i) {
            const cplx fi = f[i], bi = b[i - 1];
            f[i] = fi + k * bi;
            b[i] = bi + std::conj(k) * fi;
        }
    }
    a.resize(order + 1, 0.0);
    return a;
}

namespace {

// Extends y forward over [from, y.size()) with the AR predictor a.
void predict_forward(cvec& y, std::size_t from, const cvec& a) {
    const std::size_t p = a.size() - 1;
    for (std::size_t i = from; i < y.size(); ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 1; j <= p; ++j) acc += a[j] * y[i - j];
        y[i] = -acc;
    }
}

cvec reversed_conj(const cvec& x) {
    cvec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::conj(x[x.size() - 1 - i]);
    return r;
}

}  // namespace

cvec linear_prediction_extend(const cvec& x, std::size_t ext, std::size_t order) {
    const std::size_t n = x.size();
    if (order == 0 || order > n) throw ConfigError("invalid prediction order");
    cvec y(n + 2 * ext);
    std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>(ext));
    predict_forward(y, ext + n, burg_ar(x, order));

    // Backward extension: forward prediction of the time-reversed conjugate.
    cvec z = reversed_conj(y);
    predict_forward(z, ext + n, burg_ar(reversed_conj(x), order));
    for (std::size_t i = 0; i < ext; ++i) y[i] = std::conj(z[y.size() - 1 - i]);
    return y;
}

cvec mirror_extend(const cvec& x, std::size_t ext) {
    const std::size_t n = x.size();
    if (ext > n) throw ConfigError("mirror extension longer than the signal");
    cvec y(n + 2 * ext);
    for (std::size_t i = 0; i < ext; ++i) {
        y[i] = x[ext - 1 - i];
        y[ext + n + i] = x[n - 1 - i];
    }
    std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>(ext));
    return y;
}

}  // namespace vafer
