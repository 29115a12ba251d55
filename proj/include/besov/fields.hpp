#pragma once

#include "besov/grid.hpp"

namespace besov {

// Non-periodic edges: one-sided second-order stencils, or centered stencils against zero ghost values.
// Zero ghosts keep the discrete fields skew-adjoint, which is what the explicit heat solver needs.
enum class Boundary { OneSided, ZeroGhost };

inline constexpr int kMaxFieldOrder = 4;

// Centered second-order difference along one axis.
GridFunction partial(const GridFunction& f, int axis, Boundary b = Boundary::OneSided);

// X_i f with 1 <= i <= k.
GridFunction apply_field(const GridFunction& f, int i, Boundary b = Boundary::OneSided);
// Same, written into `out`; `scratch` holds the z derivative on Heisenberg1. Both are resized to f's
// domain if needed, so repeated calls allocate nothing.
void apply_field_into(const GridFunction& f, int i, Boundary b, GridFunction& out, GridFunction& scratch);

// X_{i1} ... X_{in} f; the rightmost field acts first. Throws for |I| > 4.
GridFunction apply_multi_field(const GridFunction& f, const MultiIndex& I, Boundary b = Boundary::OneSided);

// Discrete sublaplacian -sum_i X_i X_i f.
GridFunction sublaplacian(const GridFunction& f, Boundary b = Boundary::OneSided);

// All multi-indices over 1..k with length <= order, shortest first, lexicographic within a length.
std::vector<MultiIndex> multi_indices(int generators, int order);

}  // namespace besov
