#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <numbers>

namespace besov::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Signed frequency of FFT bin i out of n.
int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }
}  // namespace

RealFft::RealFft(const Grid& g) {
    const int d = g.dim();
    int n[3] = {1, 1, 1};
    n_real_ = 1;
    for (int a = 0; a < d; ++a) {
        n[a] = g.axis(a).nodes;
        n_real_ *= static_cast<std::size_t>(n[a]);
    }
    n_spec_ = n_real_ / static_cast<std::size_t>(n[d - 1]) * static_cast<std::size_t>(n[d - 1] / 2 + 1);
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(n_real_);
    fftw_complex* spec = fftw_alloc_complex(n_spec_);
    spec_ = spec;
    fwd_ = fftw_plan_dft_r2c(d, n, real_, spec, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r(d, n, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(real_);
    fftw_free(spec_);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
    std::memcpy(real_, in, n_real_ * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::memcpy(static_cast<void*>(out), spec_, n_spec_ * sizeof(fftw_complex));
}

void RealFft::backward(const std::complex<double>* in, double* out) {
    // c2r destroys its input, so work on the internal copy
    std::memcpy(spec_, static_cast<const void*>(in), n_spec_ * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(bwd_));
    const double scale = 1.0 / static_cast<double>(n_real_);
    for (std::size_t i = 0; i < n_real_; ++i) out[i] = real_[i] * scale;
}

std::vector<double> RealFft::wavenumber_squared(const Grid& g) const {
    std::vector<double> k2(n_spec_, 0.0);
    const int d = g.dim();
    const int last = g.axis(d - 1).nodes / 2 + 1;
    for (std::size_t s = 0; s < n_spec_; ++s) {
        std::size_t rem = s;
        double acc = 0.0;
        for (int a = d - 1; a >= 0; --a) {
            const int len = a == d - 1 ? last : g.axis(a).nodes;
            const int i = static_cast<int>(rem % len);
            rem /= len;
            const int k = a == d - 1 ? i : signed_mode(i, g.axis(a).nodes);
            const double xi = 2.0 * std::numbers::pi * k / (g.axis(a).hi - g.axis(a).lo);
            acc += xi * xi;
        }
        k2[s] = acc;
    }
    return k2;
}

std::vector<int> RealFft::mode_order(const Grid& g) const {
    std::vector<int> ord(n_spec_, 0);
    const int d = g.dim();
    const int last = g.axis(d - 1).nodes / 2 + 1;
    for (std::size_t s = 0; s < n_spec_; ++s) {
        std::size_t rem = s;
        int m = 0;
        for (int a = d - 1; a >= 0; --a) {
            const int len = a == d - 1 ? last : g.axis(a).nodes;
            const int i = static_cast<int>(rem % len);
            rem /= len;
            const int k = a == d - 1 ? i : signed_mode(i, g.axis(a).nodes);
            m = std::max(m, std::abs(k));
        }
        ord[s] = m;
    }
    return ord;
}

}  // namespace besov::detail
