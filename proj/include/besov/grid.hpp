#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "besov/group.hpp"

namespace besov {

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int nodes = 4;
    bool periodic = false;

    double spacing() const noexcept { return (hi - lo) / nodes; }
    double coord(int i) const noexcept { return lo + i * spacing(); }
    bool operator==(const Axis&) const = default;
};

// Structured tensor grid. Nodes sit at lo + i*h, i in [0, N); on periodic axes hi is identified with lo.
class Grid {
public:
    static constexpr int kMinNodes = 4;
    static constexpr double kGuardFraction = 0.1;

    explicit Grid(std::vector<Axis> axes);

    int dim() const noexcept { return static_cast<int>(axes_.size()); }
    const Axis& axis(int a) const { return axes_.at(a); }
    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int a) const noexcept { return strides_[a]; }
    double cell_measure() const noexcept { return cell_; }

    std::array<int, 3> unravel(std::size_t idx) const noexcept;
    Point node(std::size_t idx) const noexcept;
    // Nodes outside the guard band on every non-periodic axis.
    const std::vector<char>& interior_mask() const noexcept { return interior_; }
    std::size_t interior_count() const noexcept { return interior_count_; }

    bool operator==(const Grid& o) const { return axes_ == o.axes_; }

private:
    std::vector<Axis> axes_;
    std::array<std::size_t, 3> strides_{};
    std::size_t size_ = 0;
    double cell_ = 0.0;
    std::vector<char> interior_;
    std::size_t interior_count_ = 0;
};

// A group together with the grid its functions live on.
struct Domain {
    GroupModel group;
    Grid grid;

    Domain(GroupModel g, Grid gr);
    bool operator==(const Domain& o) const { return group == o.group && grid == o.grid; }
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(GroupModel group, Grid grid);
// Default windows: line [-8,8], plane [-4,4]^2, torus [-pi,pi)^d, Heisenberg [-3,3]^2 x [-2,2].
DomainPtr default_domain(const GroupModel& group, std::array<int, 3> nodes);
// Same window and group with node counts scaled by `factor` on every axis.
DomainPtr refine(const DomainPtr& d, int factor);

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(DomainPtr domain);  // zero function
    GridFunction(DomainPtr domain, std::vector<double> values);

    static GridFunction sample(const DomainPtr& domain, const std::function<double(const Point&)>& fn);
    static GridFunction constant(const DomainPtr& domain, double c);

    const DomainPtr& domain() const noexcept { return domain_; }
    const Grid& grid() const noexcept { return domain_->grid; }
    const GroupModel& group() const noexcept { return domain_->group; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool all_finite() const noexcept;
    bool same_domain(const GridFunction& o) const noexcept;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c) noexcept;
    // y += c * x
    GridFunction& axpy(double c, const GridFunction& x);

    // Value at an arbitrary point by multilinear interpolation; zero outside a non-periodic window.
    double interpolate(const Point& x) const noexcept;

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);
// Pointwise product.
GridFunction operator*(const GridFunction& a, const GridFunction& b);

void require_same_domain(const GridFunction& a, const GridFunction& b);

// Sum of w*f over all nodes (no guard band).
double integrate(const GridFunction& f);

}  // namespace besov
