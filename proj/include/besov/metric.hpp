#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "besov/grid.hpp"

namespace besov {

// Sub-Riemannian distance from the identity on the discrete Heisenberg lattice
// {(i h, j h, k h^2/2)}, a subgroup. Edges are right translations by the 16 horizontal
// steps (a h, b h, 0) with |a|,|b| <= 2, gcd(a,b) = 1, weighted by their Euclidean length.
// Lattice paths are genuine horizontal curves, so the result bounds the true distance from above.
class HeisenbergLattice {
public:
    HeisenbergLattice(double h, double r_max);

    double spacing() const noexcept { return h_; }
    double r_max() const noexcept { return r_max_; }
    // +inf when the point lies outside the explored ball.
    double distance(int i, int j, int k) const noexcept;
    // Distance of the nearest lattice point.
    double distance(const Point& p) const noexcept;
    Point point(int i, int j, int k) const noexcept;
    // Haar measure of {d <= r}: lattice count times h^4/2.
    double ball_volume(double r) const;

private:
    std::size_t index(int i, int j, int k) const noexcept;

    double h_;
    double r_max_;
    int R_;  // |i|, |j| <= R
    int K_;  // |k| <= K
    std::vector<float> dist_;
    std::vector<double> sorted_;  // finite distances, ascending
};

enum class BallMetric { Gauge, Dijkstra };

struct VolumeOptions {
    BallMetric metric = BallMetric::Gauge;
    // Heisenberg lattice spacing used for counting.
    double lattice_spacing = 1.0 / 32.0;
    // Sub-cells per axis when counting on Euclid/Torus grids; 0 picks 256, 16 or 4 by dimension.
    int supersample = 0;
};

struct VolumeTable {
    std::vector<double> radii;
    std::vector<double> volumes;
    double d_fit = 0.0;        // slope of log V against log r over r <= 1
    double log_c_fit = 0.0;    // intercept of the same fit
    double rms_residual = 0.0; // in log space
};

// Haar measure of CC balls around the identity by cell counting. Throws std::out_of_range
// when a ball does not fit inside the domain window (Torus accepts any radius).
VolumeTable ball_volume_fit(const Domain& domain, std::span<const double> radii, const VolumeOptions& opt = {});

// V(r) by log-log interpolation of a table, extrapolated with the fitted slope.
class VolumeModel {
public:
    VolumeModel() = default;
    explicit VolumeModel(VolumeTable table);
    double operator()(double r) const;
    const VolumeTable& table() const noexcept { return table_; }

private:
    VolumeTable table_;
    std::vector<double> log_r_, log_v_;
};

// Log-spaced radii in [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

// Volume model suited to a domain: grid counting for Euclid/Torus, gauge lattice counting for Heisenberg.
VolumeModel default_volume_model(const Domain& domain);

}  // namespace besov
