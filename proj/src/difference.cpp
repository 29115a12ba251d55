#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "besov/norms.hpp"

namespace besov {

namespace {

struct YNode {
    std::array<int, 3> offset{0, 0, 0};  // grid steps; the centre entry counts z_spacing steps on Heisenberg
    Point y{0.0, 0.0, 0.0};
    double norm = 0.0;
};

std::vector<YNode> y_lattice(const Domain& dom, double z_spacing) {
    const Grid& g = dom.grid;
    const GroupModel& G = dom.group;
    const int d = g.dim();
    std::array<double, 3> step{0.0, 0.0, 0.0};
    std::array<int, 3> reach{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        step[a] = g.axis(a).spacing();
        if (G.kind() == GroupKind::Heisenberg && a == 2) step[a] = z_spacing;
        // Gauge balls of radius 1 have centre extent 1/sqrt(64) on Heisenberg and extent 1 elsewhere.
        const double extent = (G.kind() == GroupKind::Heisenberg && a == 2) ? 1.0 / std::sqrt(GroupModel::kGaugeZWeight) : 1.0;
        reach[a] = static_cast<int>(std::floor(extent / step[a] + 1e-9));
        if (!g.axis(a).periodic && G.kind() != GroupKind::Heisenberg && 2.0 * extent > 0.5 * (g.axis(a).hi - g.axis(a).lo))
            throw std::out_of_range("difference functional needs a window wider than the unit ball");
    }
    std::vector<YNode> out;
    for (int i = -reach[0]; i <= reach[0]; ++i)
        for (int j = -reach[1]; j <= reach[1]; ++j)
            for (int k = -reach[2]; k <= reach[2]; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                YNode n;
                n.offset = {i, j, k};
                n.y = {i * step[0], j * step[1], k * step[2]};
                n.norm = G.cc_norm(n.y);
                if (n.norm <= 1.0) out.push_back(n);
            }
    return out;
}

// ||f(. y) - f||_p over interior nodes, y a lattice offset. Off-window values repeat the nearest edge
// value, so constants stay in the kernel of the difference even when x y leaves the window.
double shifted_difference(const GridFunction& f, const YNode& yn, double p, std::vector<double>& buf) {
    const Grid& g = f.grid();
    const int d = g.dim();
    const auto& mask = g.interior_mask();
    const auto& v = f.values();
    buf.clear();
    if (f.group().kind() != GroupKind::Heisenberg) {
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            if (!mask[idx]) continue;
            const auto c = g.unravel(idx);
            std::size_t target = 0;
            for (int a = 0; a < d; ++a) {
                const Axis& ax = g.axis(a);
                int i = c[a] + yn.offset[a];
                if (ax.periodic) {
                    i %= ax.nodes;
                    if (i < 0) i += ax.nodes;
                } else {
                    i = std::clamp(i, 0, ax.nodes - 1);
                }
                target += static_cast<std::size_t>(i) * g.stride(a);
            }
            buf.push_back(v[target] - v[idx]);
        }
        return lp_norm(buf, g.cell_measure(), p);
    }
    // x y = (x1 + y1, x2 + y2, x3 + y3 + (x1 y2 - x2 y1)/2): horizontal steps stay on the grid and the
    // centre coordinate is interpolated linearly. The centre shift is constant along each z row.
    const Axis &ax = g.axis(0), &ay = g.axis(1), &az = g.axis(2);
    const int nz = az.nodes;
    const double hz = az.spacing();
    for (int c0 = 0; c0 < ax.nodes; ++c0)
        for (int c1 = 0; c1 < ay.nodes; ++c1) {
            const std::size_t row = static_cast<std::size_t>(c0) * g.stride(0) + static_cast<std::size_t>(c1) * g.stride(1);
            const int i = std::clamp(c0 + yn.offset[0], 0, ax.nodes - 1);
            const int j = std::clamp(c1 + yn.offset[1], 0, ay.nodes - 1);
            const std::size_t src = static_cast<std::size_t>(i) * g.stride(0) + static_cast<std::size_t>(j) * g.stride(1);
            const double shift = yn.y[2] + 0.5 * (ax.coord(c0) * yn.y[1] - ay.coord(c1) * yn.y[0]);
            for (int c2 = 0; c2 < nz; ++c2) {
                if (!mask[row + c2]) continue;
                const double z = az.coord(c2) + shift;
                const double s = std::clamp((z - az.lo) / hz, 0.0, nz - 1.0);
                const int k = std::min(static_cast<int>(s), nz - 2);
                const double fr = s - k;
                const double shifted = (1.0 - fr) * v[src + k] + fr * v[src + k + 1];
                buf.push_back(shifted - v[row + c2]);
            }
        }
    return lp_norm(buf, g.cell_measure(), p);
}

}  // namespace

NormBreakdown difference_functional(const GridFunction& f, const BesovParams& params, const VolumeModel& V,
                                    const DifferenceOptions& opt) {
    params.validate();
    if (!(params.alpha > 0.0)) throw std::invalid_argument("difference functional needs alpha > 0");
    const Domain& dom = *f.domain();
    const Grid& g = dom.grid;
    const bool heis = dom.group.kind() == GroupKind::Heisenberg;
    double zs = 0.0;
    if (heis) {
        zs = opt.z_spacing > 0.0 ? opt.z_spacing : 0.5 * g.axis(0).spacing() * g.axis(1).spacing();
        if (2.0 / std::sqrt(GroupModel::kGaugeZWeight) + 1.0 > 0.5 * (g.axis(0).hi - g.axis(0).lo))
            throw std::out_of_range("difference functional needs a window wider than the unit ball");
    }
    const auto ys = y_lattice(dom, zs);
    double cell = 1.0;
    for (int a = 0; a < g.dim(); ++a) cell *= (heis && a == 2) ? zs : g.axis(a).spacing();

    std::vector<double> diff(ys.size());
#pragma omp parallel
    {
        std::vector<double> buf;
#pragma omp for schedule(dynamic, 4)
        for (std::size_t n = 0; n < ys.size(); ++n) diff[n] = shifted_difference(f, ys[n], params.p, buf);
    }

    // Dyadic shells in |y|; each shell's value is its own weighted l^q aggregate, so the shells
    // aggregate back to the full integral.
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> shells;
    for (std::size_t n = 0; n < ys.size(); ++n) {
        const double r = ys[n].norm;
        const int j = std::min(-1, static_cast<int>(std::floor(std::log2(r))));
        auto& [vals, wts] = shells[j];
        vals.push_back(diff[n] / std::pow(r, params.alpha));
        wts.push_back(cell / V(r));
    }
    NormBreakdown b;
    b.characterization = "difference";
    b.params = params;
    for (auto& [j, vw] : shells) b.terms.push_back({j, std::ldexp(1.0, j), 1.0, lq_aggregate(vw.first, vw.second, params.q)});
    b.total = b.recompute_total();
    return b;
}

}  // namespace besov
