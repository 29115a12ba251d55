#include "besov/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace besov {

void check_exponent(double p, const char* name) {
    if (!(p >= 1.0)) throw std::invalid_argument(std::string("exponent ") + name + " must lie in [1, inf]");
}

namespace {
double scaled_power(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}
}  // namespace

double lp_norm(const GridFunction& f, double p) {
    check_exponent(p, "p");
    const auto& mask = f.grid().interior_mask();
    double M = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (mask[i]) M = std::max(M, std::abs(f[i]));
    if (std::isinf(p) || M == 0.0) return M;
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (mask[i]) s += scaled_power(std::abs(f[i]) / M, p);
    s *= f.grid().cell_measure();
    return M * (p == 1.0 ? s : p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

double lp_norm(std::span<const double> values, double w, double p) {
    check_exponent(p, "p");
    double M = 0.0;
    for (double v : values) M = std::max(M, std::abs(v));
    if (std::isinf(p) || M == 0.0) return M;
    double s = 0.0;
    for (double v : values) s += scaled_power(std::abs(v) / M, p);
    s *= w;
    return M * (p == 1.0 ? s : p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

double lq_aggregate(std::span<const double> values, std::span<const double> weights, double q) {
    check_exponent(q, "q");
    if (!weights.empty() && weights.size() != values.size())
        throw std::invalid_argument("weights and values differ in length");
    double M = 0.0;
    for (double v : values) {
        if (!(v >= 0.0)) throw std::invalid_argument("aggregated values must be finite and nonnegative");
        M = std::max(M, v);
    }
    if (std::isinf(q) || M == 0.0) return M;
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += (weights.empty() ? 1.0 : weights[i]) * scaled_power(values[i] / M, q);
    return M * (q == 1.0 ? s : q == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / q));
}

double lq_aggregate(std::span<const double> values, double q) { return lq_aggregate(values, {}, q); }

}  // namespace besov
