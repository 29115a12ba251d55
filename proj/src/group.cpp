#include "besov/group.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace besov {

double wrap_angle(double a) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a + std::numbers::pi, two_pi);
    if (r < 0.0) r += two_pi;
    return r - std::numbers::pi;
}

GroupModel GroupModel::euclid_line() { return {GroupKind::EuclidLine, 1, 1}; }
GroupModel GroupModel::euclid_plane() { return {GroupKind::EuclidPlane, 2, 2}; }
GroupModel GroupModel::heisenberg() { return {GroupKind::Heisenberg, 3, 2}; }

GroupModel GroupModel::torus(int dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("torus dimension must be 1, 2 or 3");
    return {GroupKind::Torus, dim, dim};
}

std::string GroupModel::name() const {
    switch (kind_) {
        case GroupKind::EuclidLine: return "EuclidLine";
        case GroupKind::EuclidPlane: return "EuclidPlane";
        case GroupKind::Torus: return "Torus(" + std::to_string(dim_) + ")";
        case GroupKind::Heisenberg: return "Heisenberg1";
    }
    return "?";
}

Point GroupModel::mul(const Point& a, const Point& b) const noexcept {
    switch (kind_) {
        case GroupKind::Heisenberg:
            return {a[0] + b[0], a[1] + b[1], a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0])};
        case GroupKind::Torus: {
            Point r{0.0, 0.0, 0.0};
            for (int i = 0; i < dim_; ++i) r[i] = wrap_angle(a[i] + b[i]);
            return r;
        }
        default: {
            Point r{0.0, 0.0, 0.0};
            for (int i = 0; i < dim_; ++i) r[i] = a[i] + b[i];
            return r;
        }
    }
}

Point GroupModel::inverse(const Point& a) const noexcept {
    Point r{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i) r[i] = kind_ == GroupKind::Torus ? wrap_angle(-a[i]) : -a[i];
    return r;
}

Point GroupModel::from_span(std::span<const double> a) const {
    if (static_cast<int>(a.size()) != dim_)
        throw std::invalid_argument(name() + ": expected " + std::to_string(dim_) + " coordinates, got " +
                                    std::to_string(a.size()));
    Point p{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i) p[i] = a[i];
    return p;
}

std::vector<double> GroupModel::mul(std::span<const double> a, std::span<const double> b) const {
    const Point r = mul(from_span(a), from_span(b));
    return {r.begin(), r.begin() + dim_};
}

std::vector<double> GroupModel::inverse(std::span<const double> a) const {
    const Point r = inverse(from_span(a));
    return {r.begin(), r.begin() + dim_};
}

Point GroupModel::field_coefficients(int i, const Point& x) const {
    if (i < 1 || i > generators_) throw std::invalid_argument("generator index out of range");
    if (kind_ == GroupKind::Heisenberg) {
        if (i == 1) return {1.0, 0.0, -0.5 * x[1]};
        return {0.0, 1.0, 0.5 * x[0]};
    }
    Point c{0.0, 0.0, 0.0};
    c[i - 1] = 1.0;
    return c;
}

double GroupModel::cc_norm(const Point& y) const noexcept {
    if (kind_ == GroupKind::Heisenberg) {
        const double r2 = y[0] * y[0] + y[1] * y[1];
        return std::pow(r2 * r2 + kGaugeZWeight * y[2] * y[2], 0.25);
    }
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const double c = kind_ == GroupKind::Torus ? wrap_angle(y[i]) : y[i];
        s += c * c;
    }
    return std::sqrt(s);
}

double GroupModel::cc_norm(std::span<const double> y) const { return cc_norm(from_span(y)); }

}  // namespace besov
