#include "besov/fields.hpp"

#include <stdexcept>
#include <string>

namespace besov {

namespace {

void partial_raw(const Grid& g, const double* in, double* o, int axis, Boundary b) {
    const Axis& ax = g.axis(axis);
    const int n = ax.nodes;
    const std::size_t stride = g.stride(axis);
    const std::size_t outer = g.size() / (stride * n);
    const double inv2h = 0.5 / ax.spacing();

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(outer); ++blk) {
        const std::size_t base = static_cast<std::size_t>(blk) * n * stride;
        for (int i = 0; i < n; ++i) {
            const std::size_t row = base + static_cast<std::size_t>(i) * stride;
            if (i > 0 && i < n - 1) {
                for (std::size_t r = 0; r < stride; ++r)
                    o[row + r] = (in[row + stride + r] - in[row - stride + r]) * inv2h;
            } else if (ax.periodic) {
                const std::size_t next = base + static_cast<std::size_t>((i + 1) % n) * stride;
                const std::size_t prev = base + static_cast<std::size_t>((i + n - 1) % n) * stride;
                for (std::size_t r = 0; r < stride; ++r) o[row + r] = (in[next + r] - in[prev + r]) * inv2h;
            } else if (b == Boundary::ZeroGhost) {
                const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(stride);
                for (std::size_t r = 0; r < stride; ++r)
                    o[row + r] = (i == 0 ? in[row + stride + r] : -in[row - s + r]) * inv2h;
            } else if (i == 0) {
                for (std::size_t r = 0; r < stride; ++r)
                    o[row + r] = (-3.0 * in[row + r] + 4.0 * in[row + stride + r] - in[row + 2 * stride + r]) * inv2h;
            } else {
                for (std::size_t r = 0; r < stride; ++r)
                    o[row + r] = (3.0 * in[row + r] - 4.0 * in[row - stride + r] + in[row - 2 * stride + r]) * inv2h;
            }
        }
    }
}

}  // namespace

GridFunction partial(const GridFunction& f, int axis, Boundary b) {
    GridFunction out(f.domain());
    partial_raw(f.grid(), f.values().data(), out.values().data(), axis, b);
    return out;
}

void apply_field_into(const GridFunction& f, int i, Boundary b, GridFunction& out, GridFunction& scratch) {
    const GroupModel& G = f.group();
    if (i < 1 || i > G.generators()) throw std::invalid_argument("generator index " + std::to_string(i) + " out of range");
    const Grid& g = f.grid();
    if (!out.same_domain(f)) out = GridFunction(f.domain());
    partial_raw(g, f.values().data(), out.values().data(), i - 1, b);
    if (G.kind() != GroupKind::Heisenberg) return;

    // X = d_x - (y/2) d_z,  Y = d_y + (x/2) d_z
    if (!scratch.same_domain(f)) scratch = GridFunction(f.domain());
    partial_raw(g, f.values().data(), scratch.values().data(), 2, b);
    const int coef_axis = i == 1 ? 1 : 0;
    const double sign = i == 1 ? -0.5 : 0.5;
    const Axis& cax = g.axis(coef_axis);
    const std::size_t cstride = g.stride(coef_axis);
    const int cn = cax.nodes;
    const std::size_t outer = g.size() / (cstride * cn);
    double* o = out.values().data();
    const double* dz = scratch.values().data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(outer); ++blk)
        for (int c = 0; c < cn; ++c) {
            const double coef = sign * cax.coord(c);
            const std::size_t row = (static_cast<std::size_t>(blk) * cn + c) * cstride;
            for (std::size_t r = 0; r < cstride; ++r) o[row + r] += coef * dz[row + r];
        }
}

GridFunction apply_field(const GridFunction& f, int i, Boundary b) {
    GridFunction out, scratch;
    apply_field_into(f, i, b, out, scratch);
    return out;
}

GridFunction apply_multi_field(const GridFunction& f, const MultiIndex& I, Boundary b) {
    if (static_cast<int>(I.size()) > kMaxFieldOrder)
        throw std::invalid_argument("multi-index of length " + std::to_string(I.size()) + " exceeds the field budget of 4");
    for (int i : I)
        if (i < 1 || i > f.group().generators()) throw std::invalid_argument("multi-index entry out of range");
    GridFunction r = f;
    for (auto it = I.rbegin(); it != I.rend(); ++it) r = apply_field(r, *it, b);
    return r;
}

GridFunction sublaplacian(const GridFunction& f, Boundary b) {
    GridFunction out(f.domain());
    for (int i = 1; i <= f.group().generators(); ++i) out -= apply_field(apply_field(f, i, b), i, b);
    return out;
}

std::vector<MultiIndex> multi_indices(int generators, int order) {
    std::vector<MultiIndex> all{{}};
    std::size_t level_start = 0;
    for (int len = 1; len <= order; ++len) {
        const std::size_t level_end = all.size();
        for (std::size_t s = level_start; s < level_end; ++s)
            for (int i = 1; i <= generators; ++i) {
                MultiIndex m = all[s];
                m.push_back(i);
                all.push_back(std::move(m));
            }
        level_start = level_end;
    }
    return all;
}

}  // namespace besov
