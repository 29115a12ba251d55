#pragma once

#include <complex>
#include <vector>

#include "besov/grid.hpp"

namespace besov::detail {

// Real-to-complex FFT over a whole grid with plans bound to internal buffers.
// One instance must not be shared between threads; planning is serialised internally.
class RealFft {
public:
    explicit RealFft(const Grid& g);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t real_size() const noexcept { return n_real_; }
    std::size_t spectrum_size() const noexcept { return n_spec_; }

    // Unnormalised forward transform.
    void forward(const double* in, std::complex<double>* out);
    // Inverse transform divided by the node count.
    void backward(const std::complex<double>* in, double* out);

    // |xi|^2 for each spectrum entry, in r2c layout; xi = 2 pi k / (hi - lo) per axis.
    std::vector<double> wavenumber_squared(const Grid& g) const;
    // Largest |k| over axes for each spectrum entry.
    std::vector<int> mode_order(const Grid& g) const;

private:
    std::size_t n_real_ = 0, n_spec_ = 0;
    double* real_ = nullptr;
    void* spec_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

}  // namespace besov::detail
