#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "besov/lemmas.hpp"
#include "besov/norms.hpp"
#include "doctest.h"

using namespace besov;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

double integrate(const std::function<double(double)>& g, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-13);
}

DomainPtr torus1(int n) { return default_domain(GroupModel::torus(1), {n, 0, 0}); }

GridFunction cosine(const DomainPtr& d) {
    return GridFunction::sample(d, [](const Point& x) { return std::cos(x[0]); });
}

EngineSpec engine(EngineKind k) {
    EngineSpec s;
    s.kind = k;
    return s;
}

BesovParams params(double alpha, double p, double q) { return BesovParams::make(alpha, p, q); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("t grid covers (2^j_min, 1] with log-trapezoid weights") {
    TGrid tg;
    CHECK(tg.size() == 16u * 8u + 1u);
    CHECK(tg.t_min() == std::ldexp(1.0, -16));
    CHECK(tg.nodes().back() == 1.0);
    CHECK(tg.nodes()[tg.dyadic_index(-3)] == 0.125);
    double wsum = 0.0;
    for (double w : tg.weights()) {
        CHECK(w > 0.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(16.0 * std::numbers::ln2).epsilon(1e-14));
    // int_{t_min}^1 t dt/t = 1 - t_min
    double s = 0.0;
    for (std::size_t n = 0; n < tg.size(); ++n) s += tg.weights()[n] * tg.nodes()[n];
    CHECK(rel(s, 1.0 - tg.t_min()) < 1e-3);
    CHECK(tg.octave_of(0) == -16);
    CHECK(tg.octave_of(tg.size() - 1) == -1);
    CHECK(tg.refined().size() == 16u * 16u + 1u);
    CHECK_THROWS_AS(TGrid(0, 8), std::invalid_argument);
    CHECK_THROWS_AS(TGrid(-4, 0), std::invalid_argument);
}

TEST_CASE("params defaults and validation") {
    auto b = params(1.0, 2.0, 2.0);
    CHECK(b.m == 1);
    CHECK(b.t0 == 0.0);
    CHECK(b.mbar == 2);
    auto z = params(0.0, 2.0, 2.0);
    CHECK(z.m == 1);
    CHECK(z.t0 == 0.5);
    CHECK(params(2.0, 2.0, 2.0).m == 2);
    CHECK(params(3.5, 1.0, kInfinity).m == 2);
    CHECK(params(1.5, 2.0, 2.0).mbar == 2);
    BesovParams bad = b;
    bad.m = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = z;
    bad.t0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = b;
    bad.p = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = b;
    bad.mbar = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(characterization_from_string("slice_l1") == Characterization::SliceL1);
    CHECK_THROWS_AS(characterization_from_string("sobolev"), std::invalid_argument);
}

TEST_CASE("lp norm examples") {
    auto d = torus1(64);
    CHECK(lp_norm(GridFunction::constant(d, 1.0), 2.0) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-14));
    CHECK(lp_norm(GridFunction(d), 2.0) == 0.0);
    CHECK(lp_norm(cosine(d), 2.0) == doctest::Approx(kSqrtPi).epsilon(1e-13));
    CHECK(lp_norm(cosine(d), kInfinity) == 1.0);
}

TEST_CASE("lambda functional of the torus eigenfunction") {
    // ||Delta H_t cos||_2 = e^{-t} sqrt(pi), so Lambda^2 = pi int_0^1 t e^{-2t} dt/t.
    const double oracle = std::sqrt(kPi * integrate([](double t) { return std::exp(-2.0 * t); }, 0.0, 1.0));
    const auto b = params(1.0, 2.0, 2.0);
    for (auto [kind, n] : {std::pair{EngineKind::Spectral, 64}, std::pair{EngineKind::FiniteDifference, 256}}) {
        auto d = torus1(n);
        auto H = make_heat_operator(d, engine(kind));
        const auto L = lambda_functional(*H, cosine(d), b);
        CAPTURE(to_string(kind));
        CHECK(rel(L.total, oracle) < 1e-2);
        CHECK(L.total == doctest::Approx(L.recompute_total()).epsilon(1e-14));
        CHECK(L.terms.size() == TGrid().size());
        CHECK(L.tail_estimate < 1e-2 * L.total);
        CHECK(lambda_functional(*H, GridFunction(d), b).total == 0.0);
    }
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    // Three-digit agreement at the default t grid on the spectral engine.
    CHECK(rel(lambda_functional(*H, cosine(d), b).total, oracle) < 1e-3);
}

TEST_CASE("lambda functional is homogeneous and subadditive") {
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    auto f = GridFunction::sample(d, [](const Point& x) { return std::exp(std::cos(x[0])) + std::sin(3 * x[0]); });
    auto g = GridFunction::sample(d, [](const Point& x) { return std::cos(2 * x[0] + 0.3); });
    for (auto b : {params(1.0, 2.0, 2.0), params(0.5, 1.0, kInfinity), params(2.5, 4.0, 1.5)}) {
        const double Lf = lambda_functional(*H, f, b).total;
        const double Lg = lambda_functional(*H, g, b).total;
        CHECK(lambda_functional(*H, -3.0 * f, b).total == doctest::Approx(3.0 * Lf).epsilon(1e-13));
        CHECK(lambda_functional(*H, f + g, b).total <= (Lf + Lg) * (1.0 + 1e-13));
    }
}

TEST_CASE("besov norm: constants and the eigenfunction") {
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    auto b = params(1.0, 2.0, 2.0);
    CHECK(besov_norm(*H, GridFunction::constant(d, 1.0), b) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-13));
    CHECK(besov_norm(*H, GridFunction(d), b) == 0.0);
    const double lam = std::sqrt(kPi * integrate([](double t) { return std::exp(-2.0 * t); }, 0.0, 1.0));
    CHECK(rel(besov_norm(*H, cosine(d), b), lam + kSqrtPi) < 1e-3);
    b.t0 = 0.5;
    CHECK(rel(besov_norm(*H, cosine(d), b), lam + std::exp(-0.5) * kSqrtPi) < 1e-3);
    BesovParams z = params(0.0, 2.0, 2.0);
    z.t0 = 0.0;
    CHECK_THROWS_AS(besov_norm(*H, cosine(d), z), std::invalid_argument);
}

TEST_CASE("dyadic norm of the eigenfunction is a scalar sum") {
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    for (double alpha : {0.5, 1.0, 2.5}) {
        const auto b = params(alpha, 2.0, 2.0);
        double s = 0.0;
        for (int j = -16; j <= -1; ++j) {
            const double t = std::ldexp(1.0, j);
            s += std::pow(std::pow(t, b.m - alpha / 2.0) * std::exp(-t) * kSqrtPi, 2.0);
        }
        const double oracle = std::exp(-b.t0) * kSqrtPi + std::sqrt(s);
        const auto D = dyadic_norm(*H, cosine(d), b);
        CAPTURE(alpha);
        CHECK(rel(D.total, oracle) < 1e-10);
        CHECK(D.terms.size() == 16u);
        CHECK(D.total == doctest::Approx(D.recompute_total()).epsilon(1e-14));
    }
    CHECK(dyadic_norm(*H, GridFunction(d), params(1.0, 2.0, 2.0)).total == 0.0);
}

TEST_CASE("dyadic norm is nonincreasing in q") {
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    auto f = GridFunction::sample(d, [](const Point& x) { return std::exp(std::sin(x[0])); });
    double prev = kInfinity;
    for (double q : {1.0, 1.5, 2.0, 4.0, kInfinity}) {
        const double v = dyadic_norm(*H, f, params(1.0, 2.0, q)).total;
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("slice norm of the eigenfunction") {
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    for (double alpha : {0.5, 1.0, 3.0}) {
        const auto b = params(alpha, 2.0, 2.0);
        double s = 0.0;
        for (int j = -16; j <= -1; ++j) {
            const double a = std::ldexp(1.0, j);
            const double oct = integrate([&](double t) { return std::pow(t, b.m - 1) * std::exp(-t); }, a, 2 * a);
            s += std::pow(std::pow(a, -alpha / 2.0) * oct * kSqrtPi, 2.0);
        }
        const double oracle = kSqrtPi + std::sqrt(s);
        const auto S = slice_l1_norm(*H, cosine(d), b);
        CAPTURE(alpha);
        CHECK(rel(S.total, oracle) < 1e-2);
        CHECK(S.debug.size() == 16u);
        CHECK(S.total == doctest::Approx(S.recompute_total()).epsilon(1e-14));
    }
    CHECK(slice_l1_norm(*H, GridFunction(d), params(1.0, 2.0, 2.0)).total == 0.0);
    CHECK_THROWS_AS(slice_l1_norm(*H, cosine(d), params(0.0, 2.0, 2.0)), std::invalid_argument);
}

TEST_CASE("xsup norm of the eigenfunction") {
    auto d = torus1(128);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    auto b = params(0.5, 2.0, 2.0);
    REQUIRE(b.mbar == 1);
    // max over the octave of e^{-t} sqrt(pi) sits at t = 2^j.
    double s = 0.0;
    for (int j = -16; j <= -1; ++j) {
        const double t = std::ldexp(1.0, j);
        s += std::pow(std::pow(t, (1 - 0.5) / 2.0) * std::exp(-t) * kSqrtPi, 2.0);
    }
    const double oracle = std::exp(-0.5) * kSqrtPi + std::sqrt(s);
    CHECK(rel(xsup_norm(*H, cosine(d), b).total, oracle) < 1e-10);
    CHECK(xsup_norm(*H, GridFunction(d), b).total == 0.0);
    b.mbar = 5;
    CHECK_THROWS_AS(xsup_norm(*H, cosine(d), b), std::invalid_argument);
}

TEST_CASE("xsup terms dominate dyadic terms when 2m <= mbar") {
    auto d = default_domain(GroupModel::torus(2), {32, 32, 0});
    auto H = make_heat_operator(d, engine(EngineKind::FiniteDifference));
    auto f = GridFunction::sample(d, [](const Point& x) { return std::exp(std::cos(x[0]) + 0.5 * std::sin(x[1])); });
    TGrid tg(-8, 4);
    auto b = params(0.5, 2.0, 2.0);
    b.mbar = 2;
    const auto D = dyadic_norm(*H, f, b, tg);
    const auto X = xsup_norm(*H, f, b, tg);
    REQUIRE(D.terms.size() == X.terms.size());
    // ||Delta g|| <= sum_i ||X_i X_i g|| <= k sup_{|I| = 2} ||X_I g||
    for (std::size_t n = 0; n < D.terms.size(); ++n) CHECK(D.terms[n].value <= 2.0 * X.terms[n].value * (1 + 1e-12));
}

TEST_CASE("difference functional of the eigenfunction") {
    // ||cos(. + y) - cos||_2 = 2 |sin(y/2)| sqrt(pi), V(r) = 2r.
    auto d = torus1(1024);
    const VolumeModel V = default_volume_model(*d);
    for (auto [alpha, q] : {std::pair{0.5, 2.0}, std::pair{0.25, 2.0}, std::pair{0.75, 3.0}}) {
        auto b = params(alpha, 2.0, q);
        const double I = integrate(
            [&](double y) { return std::pow(2.0 * std::sin(y / 2.0) * kSqrtPi / std::pow(y, alpha), q) / (2.0 * y); },
            0.0, 1.0);
        const double oracle = std::pow(2.0 * I, 1.0 / q);
        const auto L = difference_functional(cosine(d), b, V);
        CAPTURE(alpha);
        CHECK(rel(L.total, oracle) < 1e-2);
        CHECK(L.total == doctest::Approx(L.recompute_total()).epsilon(1e-13));
    }
    // q = 1, alpha = 1/4: the excluded identity cell carries a fraction ~h^{3/4} of the integral,
    // so the gap to the integral shrinks by about 2^{3/4} per doubling.
    {
        auto b = params(0.25, 2.0, 1.0);
        const double oracle = 2.0 * integrate([](double y) { return std::sin(y / 2.0) * kSqrtPi / std::pow(y, 1.25); }, 0.0, 1.0);
        double prev = kInfinity;
        for (int n : {256, 1024, 4096}) {
            auto dn = torus1(n);
            const double e = rel(difference_functional(cosine(dn), b, default_volume_model(*dn)).total, oracle);
            CHECK(e < prev / 2.0);
            prev = e;
        }
        CHECK(prev < 1e-2);
    }
    auto b = params(0.5, 2.0, 2.0);
    CHECK(difference_functional(GridFunction::constant(d, 2.0), b, V).total == 0.0);
    const double one = difference_functional(cosine(d), b, V).total;
    CHECK(difference_functional(-2.5 * cosine(d), b, V).total == doctest::Approx(2.5 * one).epsilon(1e-13));
    CHECK_THROWS_AS(difference_functional(cosine(d), params(0.0, 2.0, 2.0), V), std::invalid_argument);
}

TEST_CASE("difference functional on the plane and the Heisenberg group") {
    auto plane = default_domain(GroupModel::euclid_plane(), {64, 64, 0});
    auto g = GridFunction::sample(plane, [](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
    const auto b = params(0.5, 2.0, 2.0);
    const double Lp = difference_functional(g, b, default_volume_model(*plane)).total;
    CHECK(std::isfinite(Lp));
    CHECK(Lp > 0.0);

    auto heis = default_domain(GroupModel::heisenberg(), {24, 24, 16});
    const VolumeModel V = default_volume_model(*heis);
    CHECK(difference_functional(GridFunction::constant(heis, 1.0), b, V).total < 1e-12);
    // A function of the centre only: f(x y) - f(x) sees the commutator shift, the difference is nonzero.
    auto bump = GridFunction::sample(heis, [](const Point& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) - 4 * x[2] * x[2]);
    });
    const double Lh = difference_functional(bump, b, V).total;
    CHECK(std::isfinite(Lh));
    CHECK(Lh > 0.0);
    CHECK(difference_functional(3.0 * bump, b, V).total == doctest::Approx(3.0 * Lh).epsilon(1e-13));
}

TEST_CASE("recursive norm") {
    auto d = torus1(256);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    const auto b = params(1.0, 2.0, 2.0);
    CHECK(recursive_norm(*H, GridFunction::constant(d, 2.0), b) == doctest::Approx(2.0 * std::sqrt(2.0 * kPi)).epsilon(1e-12));
    // X cos = -sin, whose norm equals that of cos.
    const double lam = std::sqrt(kPi * integrate([](double t) { return std::exp(-2.0 * t); }, 0.0, 1.0));
    CHECK(rel(recursive_norm(*H, cosine(d), b), kSqrtPi + lam + kSqrtPi) < 1e-3);
}

TEST_CASE("lambda with m and m + 1 stay comparable") {
    auto d = torus1(64);
    auto H = make_heat_operator(d, engine(EngineKind::Spectral));
    auto f = GridFunction::sample(d, [](const Point& x) { return std::exp(std::cos(x[0])); });
    auto b = params(1.0, 2.0, 2.0);
    const double l1 = lambda_functional(*H, f, b).total;
    b.m = 2;
    const double l2 = lambda_functional(*H, f, b).total;
    CHECK(std::isfinite(l1 / l2));
    CHECK(l1 / l2 > 0.1);
    CHECK(l1 / l2 < 10.0);
}

TEST_CASE("Schur bound") {
    const std::size_t n = 16;
    TabulatedKernel K{n, n, std::vector<double>(n * n, 1.0), std::vector<double>(n, 1.0 / n), std::vector<double>(n, 1.0 / n)};
    std::vector<double> one(n, 1.0);
    auto r = schur_bound(K, 2.0, one);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        TabulatedKernel R;
        R.rows = size(rng);
        R.cols = size(rng);
        for (std::size_t i = 0; i < R.rows * R.cols; ++i) R.values.push_back(u(rng) < 0.3 ? 0.0 : u(rng));
        for (std::size_t i = 0; i < R.rows; ++i) R.row_weights.push_back(u(rng) + 0.01);
        for (std::size_t i = 0; i < R.cols; ++i) R.col_weights.push_back(u(rng) + 0.01);
        std::vector<double> f(R.cols);
        for (auto& v : f) v = 2.0 * u(rng) - 1.0;
        const double q = std::array{1.0, 1.5, 2.0, 3.0, kInfinity}[trial % 5];
        auto s = schur_bound(R, q, f);
        if (q == 1.0) {
            double f1 = 0.0;
            for (std::size_t b = 0; b < R.cols; ++b) f1 += std::abs(f[b]) * R.col_weights[b];
            CHECK(s.bound == doctest::Approx(s.C_A * f1).epsilon(1e-13));
        }
        if (s.lhs > s.bound * (1 + 1e-12)) ++violations;
    }
    CHECK(violations == 0);
    K.values[3] = -1.0;
    CHECK_THROWS_AS(schur_bound(K, 2.0, one), std::invalid_argument);
}

TEST_CASE("dyadic convolution lemma") {
    std::vector<double> zero(6, 0.0);
    auto z = dyadic_convolution_sums(-5, 0, 1.0, 2.0, 2.0, zero);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);

    // Spike at n0: lhs = sum_{j<=n0} 2^{(j alpha - n0 beta) q} + sum_{j>n0} 2^{j (alpha - beta) q}.
    const double alpha = 1.0, beta = 2.0, q = 2.0;
    for (int n0 = -5; n0 <= 0; ++n0) {
        std::vector<double> c(6, 0.0);
        c[n0 + 5] = 1.0;
        const double r1 = std::exp2(alpha * q), r2 = std::exp2((alpha - beta) * q);
        const int below = n0 + 5 + 1, above = -n0;
        const double lhs = std::exp2((-5 * alpha - n0 * beta) * q) * (std::pow(r1, below) - 1) / (r1 - 1) +
                           (above > 0 ? std::exp2((n0 + 1) * (alpha - beta) * q) * (1 - std::pow(r2, above)) / (1 - r2) : 0.0);
        auto s = dyadic_convolution_sums(-5, 0, alpha, beta, q, c);
        CAPTURE(n0);
        CHECK(s.lhs == doctest::Approx(lhs).epsilon(1e-13));
        CHECK(s.rhs == doctest::Approx(std::exp2((alpha - beta) * n0 * q)).epsilon(1e-14));
    }

    struct Triple {
        double alpha, beta, q;
    };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto [a, b, qq] : {Triple{1, 2, 2}, Triple{0.5, 1, 1}, Triple{1, 3, kInfinity}}) {
        const double C = frozen_dyadic_constant(a, b, qq);
        CHECK(C <= schur_dyadic_constant(a, b, qq) * (1 + 1e-4));
        CHECK(C >= fit_dyadic_constant(a, b, qq, 500, 11));
        int violations = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int lo = -1 - static_cast<int>(u(rng) * 30);
            std::vector<double> c(static_cast<std::size_t>(-lo + 1));
            for (auto& v : c) v = u(rng) < 0.5 ? u(rng) * std::exp2(10 * u(rng)) : 0.0;
            if (!dyadic_convolution_bound(lo, 0, a, b, qq, c).holds) ++violations;
        }
        CAPTURE(a);
        CHECK(violations == 0);
    }
    CHECK_THROWS_AS(dyadic_convolution_sums(-5, 0, 2.0, 1.0, 2.0, zero), std::invalid_argument);
    CHECK_THROWS_AS(dyadic_convolution_sums(0, -5, 1.0, 2.0, 2.0, zero), std::invalid_argument);
}
