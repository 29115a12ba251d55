#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace besov {

// Coordinates of a point; entries past the model dimension are ignored and kept at zero.
using Point = std::array<double, 3>;

enum class GroupKind { EuclidLine, EuclidPlane, Torus, Heisenberg };

// Sequence of generator indices, 1-based like the fields X_1..X_k they name.
using MultiIndex = std::vector<int>;

// Concrete unimodular group in exponential-type coordinates (Haar = Lebesgue).
class GroupModel {
public:
    static GroupModel euclid_line();
    static GroupModel euclid_plane();
    static GroupModel torus(int dim);
    static GroupModel heisenberg();

    GroupKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    int generators() const noexcept { return generators_; }
    bool periodic(int axis) const noexcept { return kind_ == GroupKind::Torus && axis < dim_; }
    std::string name() const;

    Point mul(const Point& a, const Point& b) const noexcept;
    Point inverse(const Point& a) const noexcept;
    Point identity() const noexcept { return {0.0, 0.0, 0.0}; }

    // Checked variants over coordinate tuples; throw std::invalid_argument on dimension mismatch.
    std::vector<double> mul(std::span<const double> a, std::span<const double> b) const;
    std::vector<double> inverse(std::span<const double> a) const;

    // Coefficients c_j(x) of the field X_i = sum_j c_j(x) d/dx_j, for 1 <= i <= generators().
    Point field_coefficients(int i, const Point& x) const;

    // Distance to the identity. Exact on Euclid/Torus; a homogeneous gauge on Heisenberg.
    double cc_norm(const Point& y) const noexcept;
    double cc_norm(std::span<const double> y) const;

    // Constant c in the Heisenberg gauge ((x^2+y^2)^2 + c z^2)^{1/4}.
    static constexpr double kGaugeZWeight = 64.0;

    bool operator==(const GroupModel&) const = default;

private:
    GroupModel(GroupKind kind, int dim, int generators) : kind_(kind), dim_(dim), generators_(generators) {}
    Point from_span(std::span<const double> a) const;

    GroupKind kind_;
    int dim_;
    int generators_;
};

// Wraps an angle into [-pi, pi).
double wrap_angle(double a) noexcept;

}  // namespace besov
