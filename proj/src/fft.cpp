#include "vafer/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace vafer::fft {
namespace {

// FFTW planning is not thread-safe; execution with new arrays is. Plans are
// created unaligned and in-place so any std::vector buffer can be fed to them.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        cvec scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(std::span<cplx> x, int sign) {
    if (x.size() < 2) return;
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(cache().get(x.size(), sign), buf, buf);
}

}  // namespace

void forward(std::span<cplx> x) { run(x, FFTW_FORWARD); }

void inverse(std::span<cplx> x) {
    run(x, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= scale;
}

cvec forward(cvec x) {
    forward(std::span<cplx>(x));
    return x;
}

cvec inverse(cvec x) {
    inverse(std::span<cplx>(x));
    return x;
}

}  // namespace vafer::fft
