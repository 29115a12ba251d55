#pragma once

#include <vector>

namespace besov {

// Geometric grid for the measure dt/t on (2^{j_min}, 1]: nodes 2^{j + l/L} for j in [j_min, -1],
// l in [0, L), closed by t = 1. Weights are the trapezoid rule in log t (ln2/L, halved at both ends).
class TGrid {
public:
    explicit TGrid(int j_min = -16, int per_octave = 8);

    int j_min() const noexcept { return j_min_; }
    int per_octave() const noexcept { return L_; }
    int octaves() const noexcept { return -j_min_; }
    double t_min() const noexcept { return nodes_.front(); }

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    // Node index of 2^j for j in [j_min, 0].
    std::size_t dyadic_index(int j) const;
    // Octave j = floor(log2 t) of node n; the final node t = 1 is reported as octave -1.
    int octave_of(std::size_t n) const noexcept;

    // Same range with twice the nodes per octave.
    TGrid refined() const { return TGrid(j_min_, 2 * L_); }

    bool operator==(const TGrid&) const = default;

private:
    int j_min_;
    int L_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace besov
