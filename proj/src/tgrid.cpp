#include "besov/tgrid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace besov {

TGrid::TGrid(int j_min, int per_octave) : j_min_(j_min), L_(per_octave) {
    if (j_min >= 0) throw std::invalid_argument("j_min must be negative");
    if (per_octave < 1) throw std::invalid_argument("nodes per octave must be at least 1");
    if (j_min < -60) throw std::invalid_argument("j_min below -60 underflows the t grid");
    const std::size_t n = static_cast<std::size_t>(-j_min) * static_cast<std::size_t>(per_octave) + 1;
    nodes_.resize(n);
    weights_.assign(n, std::numbers::ln2 / per_octave);
    for (std::size_t i = 0; i < n; ++i) {
        const long k = static_cast<long>(i);
        // Exact powers of two at octave boundaries.
        nodes_[i] = k % per_octave == 0 ? std::ldexp(1.0, j_min + static_cast<int>(k / per_octave))
                                        : std::exp2(j_min + static_cast<double>(k) / per_octave);
    }
    weights_.front() *= 0.5;
    weights_.back() *= 0.5;
}

std::size_t TGrid::dyadic_index(int j) const {
    if (j < j_min_ || j > 0) throw std::out_of_range("dyadic level " + std::to_string(j) + " outside the t grid");
    return static_cast<std::size_t>(j - j_min_) * static_cast<std::size_t>(L_);
}

int TGrid::octave_of(std::size_t n) const noexcept {
    const int j = j_min_ + static_cast<int>(n / static_cast<std::size_t>(L_));
    return j > -1 ? -1 : j;
}

}  // namespace besov
