#include "besov/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace besov {

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 3) throw std::invalid_argument("grid must have 1 to 3 axes");
    size_ = 1;
    cell_ = 1.0;
    for (const Axis& a : axes_) {
        if (a.nodes < kMinNodes) throw std::invalid_argument("grid axis needs at least 4 nodes");
        if (!(a.hi > a.lo)) throw std::invalid_argument("grid axis extent must be positive");
        size_ *= static_cast<std::size_t>(a.nodes);
        cell_ *= a.spacing();
    }
    std::size_t s = 1;
    for (int a = dim() - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= static_cast<std::size_t>(axes_[a].nodes);
    }
    interior_.assign(size_, 1);
    for (std::size_t idx = 0; idx < size_; ++idx) {
        const auto ijk = unravel(idx);
        for (int a = 0; a < dim(); ++a) {
            const Axis& ax = axes_[a];
            if (ax.periodic) continue;
            const double guard = kGuardFraction * (ax.hi - ax.lo);
            const double x = ax.coord(ijk[a]);
            if (x < ax.lo + guard || x > ax.hi - guard) interior_[idx] = 0;
        }
        interior_count_ += interior_[idx];
    }
}

std::array<int, 3> Grid::unravel(std::size_t idx) const noexcept {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = 0; a < dim(); ++a) {
        ijk[a] = static_cast<int>(idx / strides_[a]);
        idx %= strides_[a];
    }
    return ijk;
}

Point Grid::node(std::size_t idx) const noexcept {
    const auto ijk = unravel(idx);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim(); ++a) p[a] = axes_[a].coord(ijk[a]);
    return p;
}

Domain::Domain(GroupModel g, Grid gr) : group(std::move(g)), grid(std::move(gr)) {
    if (grid.dim() != group.dim()) throw std::invalid_argument("grid dimension does not match group dimension");
    for (int a = 0; a < grid.dim(); ++a) {
        if (grid.axis(a).periodic != group.periodic(a))
            throw std::invalid_argument("grid periodicity does not match group on axis " + std::to_string(a));
        if (group.periodic(a) && std::abs(grid.axis(a).hi - grid.axis(a).lo - 2.0 * std::numbers::pi) > 1e-12)
            throw std::invalid_argument("periodic axes must span 2 pi");
    }
}

DomainPtr make_domain(GroupModel group, Grid grid) {
    return std::make_shared<const Domain>(std::move(group), std::move(grid));
}

DomainPtr default_domain(const GroupModel& group, std::array<int, 3> nodes) {
    std::vector<Axis> axes;
    const double pi = std::numbers::pi;
    for (int a = 0; a < group.dim(); ++a) {
        Axis ax;
        ax.nodes = nodes[a];
        switch (group.kind()) {
            case GroupKind::EuclidLine: ax.lo = -8.0; ax.hi = 8.0; break;
            case GroupKind::EuclidPlane: ax.lo = -4.0; ax.hi = 4.0; break;
            case GroupKind::Torus: ax.lo = -pi; ax.hi = pi; ax.periodic = true; break;
            case GroupKind::Heisenberg:
                ax.lo = a < 2 ? -3.0 : -2.0;
                ax.hi = -ax.lo;
                break;
        }
        axes.push_back(ax);
    }
    return make_domain(group, Grid(std::move(axes)));
}

DomainPtr refine(const DomainPtr& d, int factor) {
    std::vector<Axis> axes;
    for (int a = 0; a < d->grid.dim(); ++a) {
        Axis ax = d->grid.axis(a);
        ax.nodes *= factor;
        axes.push_back(ax);
    }
    return make_domain(d->group, Grid(std::move(axes)));
}

GridFunction::GridFunction(DomainPtr domain) : domain_(std::move(domain)) {
    if (!domain_) throw std::invalid_argument("grid function needs a domain");
    values_.assign(domain_->grid.size(), 0.0);
}

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) throw std::invalid_argument("grid function needs a domain");
    if (values_.size() != domain_->grid.size()) throw std::invalid_argument("value count does not match grid size");
}

GridFunction GridFunction::sample(const DomainPtr& domain, const std::function<double(const Point&)>& fn) {
    GridFunction f(domain);
    const Grid& g = domain->grid;
    for (std::size_t i = 0; i < g.size(); ++i) f.values_[i] = fn(g.node(i));
    if (!f.all_finite()) throw std::invalid_argument("sampled function has non-finite values");
    return f;
}

GridFunction GridFunction::constant(const DomainPtr& domain, double c) {
    GridFunction f(domain);
    std::fill(f.values_.begin(), f.values_.end(), c);
    return f;
}

bool GridFunction::all_finite() const noexcept {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool GridFunction::same_domain(const GridFunction& o) const noexcept {
    return domain_ == o.domain_ || (domain_ && o.domain_ && *domain_ == *o.domain_);
}

void require_same_domain(const GridFunction& a, const GridFunction& b) {
    if (!a.same_domain(b)) throw std::invalid_argument("grid functions live on different grids");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same_domain(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_same_domain(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) noexcept {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction& GridFunction::axpy(double c, const GridFunction& x) {
    require_same_domain(*this, x);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * x.values_[i];
    return *this;
}

double GridFunction::interpolate(const Point& x) const noexcept {
    const Grid& g = grid();
    const int d = g.dim();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        const Axis& ax = g.axis(a);
        double s = (x[a] - ax.lo) / ax.spacing();
        if (ax.periodic) {
            s = std::fmod(s, static_cast<double>(ax.nodes));
            if (s < 0.0) s += ax.nodes;
        } else if (s < 0.0 || s > ax.nodes - 1) {
            return 0.0;
        }
        int i = static_cast<int>(std::floor(s));
        if (i >= ax.nodes) i = ax.nodes - 1;
        base[a] = i;
        frac[a] = s - i;
    }
    double acc = 0.0;
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            const Axis& ax = g.axis(a);
            const int bit = (c >> a) & 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
            int i = base[a] + bit;
            if (i >= ax.nodes) i = ax.periodic ? 0 : ax.nodes - 1;
            idx += static_cast<std::size_t>(i) * g.stride(a);
        }
        if (w != 0.0) acc += w * values_[idx];
    }
    return acc;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    require_same_domain(a, b);
    GridFunction r(a.domain());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

double integrate(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_measure();
}

}  // namespace besov
