#pragma once

#include <limits>
#include <span>

#include "besov/grid.hpp"

namespace besov {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// (sum_i w |f_i|^p)^{1/p} over nodes outside the guard band; p = infinity gives the max.
double lp_norm(const GridFunction& f, double p);
// Same rule for a plain list of node values with common weight w.
double lp_norm(std::span<const double> values, double w, double p);

// Weighted l^q aggregate (sum w_i v_i^q)^{1/q}, or max v_i for q = infinity. Values must be >= 0.
// Computed as M (sum w_i (v_i/M)^q)^{1/q} with M = max v_i, so results are exactly monotone in q
// whenever the weights are all 1.
double lq_aggregate(std::span<const double> values, std::span<const double> weights, double q);
double lq_aggregate(std::span<const double> values, double q);

void check_exponent(double p, const char* name);

}  // namespace besov
