#include <cmath>
#include <numbers>

#include "besov/paraproduct.hpp"
#include "besov/verify.hpp"
#include "doctest.h"

using namespace besov;

namespace {

constexpr double kPi = std::numbers::pi;

DomainPtr torus1(int n) { return default_domain(GroupModel::torus(1), {n, 0, 0}); }

GridFunction wave(const DomainPtr& d, int k) {
    return GridFunction::sample(d, [k](const Point& x) { return std::cos(k * x[0]); });
}

const std::vector<Characterization> kHeatFamily{Characterization::Heat, Characterization::Dyadic,
                                                Characterization::SliceL1, Characterization::XSup};

}  // namespace

TEST_CASE("function families are deterministic and well formed") {
    SplitMix a(7), b(7);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }

    const auto suite = standard_suite();
    REQUIRE(suite.size() == 3);
    for (const auto& fam : suite) CHECK(fam.size() == 10);

    auto d = torus1(64);
    const auto again = standard_suite();
    for (int s = 0; s < 2; ++s) {
        const auto x = suite[s].sample(d), y = again[s].sample(d);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].values() == y[i].values());
    }
    const auto other = FunctionFamily::torus_gaussians(10, 43).sample(d);
    CHECK(other[0].values() != suite[0].sample(d)[0].values());

    // Heisenberg bumps have decayed by the window boundary.
    auto hd = default_domain(GroupModel::heisenberg(), {16, 16, 12});
    for (const auto& f : suite[2].sample(hd)) {
        const Grid& g = f.grid();
        double peak = 0.0, edge = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto c = g.unravel(i);
            peak = std::max(peak, std::abs(f[i]));
            for (int a = 0; a < 3; ++a)
                if (c[a] == 0) edge = std::max(edge, std::abs(f[i]));
        }
        CHECK(edge < 2e-3 * peak);
    }
    CHECK_THROWS_AS(FunctionFamily::torus_trig(3, 0, 1), std::invalid_argument);
}

TEST_CASE("Fourier oracle") {
    auto d = torus1(64);
    for (double alpha : {0.5, 1.0, 1.5}) {
        const auto b = BesovParams::make(alpha, 2.0, 2.0);
        const auto one = GridFunction::constant(d, 1.0);
        CHECK(fourier_oracle_norm(one, b) == doctest::Approx(lp_norm(one, 2.0)).epsilon(1e-13));
        CHECK(fourier_oracle_norm(wave(d, 1), b) ==
              doctest::Approx(std::pow(2.0, alpha / 2.0) * std::sqrt(kPi)).epsilon(1e-13));
    }

    // Random degree-8 trigonometric polynomial: ||a cos kx + b sin kx||_2^2 = pi (a^2 + b^2), constant term 2 pi a_0^2.
    SplitMix rng(11);
    std::vector<double> ca(9), cb(9);
    for (int k = 0; k <= 8; ++k) {
        ca[k] = rng.uniform(-1.0, 1.0);
        cb[k] = k == 0 ? 0.0 : rng.uniform(-1.0, 1.0);
    }
    const auto f = GridFunction::sample(d, [&](const Point& x) {
        double v = ca[0];
        for (int k = 1; k <= 8; ++k) v += ca[k] * std::cos(k * x[0]) + cb[k] * std::sin(k * x[0]);
        return v;
    });
    for (double alpha : {0.0, 0.75, 2.0}) {
        double s = 2.0 * kPi * ca[0] * ca[0];
        for (int k = 1; k <= 8; ++k) s += std::pow(1.0 + k * k, alpha) * kPi * (ca[k] * ca[k] + cb[k] * cb[k]);
        BesovParams b = BesovParams::make(std::max(alpha, 0.5), 2.0, 2.0);
        b.alpha = alpha;
        CHECK(fourier_oracle_norm(f, b) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
    }

    // Torus(2) product of single modes.
    auto d2 = default_domain(GroupModel::torus(2), {32, 32, 0});
    const auto g2 = GridFunction::sample(d2, [](const Point& x) { return std::cos(x[0]) * std::cos(2.0 * x[1]); });
    CHECK(fourier_oracle_norm(g2, BesovParams::make(1.0, 2.0, 2.0)) == doctest::Approx(std::sqrt(6.0) * kPi).epsilon(1e-12));

    auto line = default_domain(GroupModel::euclid_line(), {64, 0, 0});
    CHECK_THROWS_AS(fourier_oracle_norm(GridFunction(line), BesovParams::make(1.0, 2.0, 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(fourier_oracle_norm(GridFunction::constant(d, 1.0), BesovParams::make(1.0, 3.0, 2.0)), std::invalid_argument);
}

TEST_CASE("torus eigenfunctions match their scalar oracles") {
    auto d = torus1(256);
    auto H = make_heat_operator(d, EngineSpec{});
    for (double alpha : {0.5, 1.0})
        for (int k : {0, 1, 2, 3}) {
            const auto b = BesovParams::make(alpha, 2.0, 2.0);
            const auto norms = evaluate_characterizations(*H, wave(d, k), b, kHeatFamily, TGrid(), nullptr);
            for (std::size_t c = 0; c < kHeatFamily.size(); ++c) {
                CAPTURE(alpha);
                CAPTURE(k);
                CAPTURE(to_string(kHeatFamily[c]));
                CHECK(norms[c].total == doctest::Approx(torus_eigen_oracle(kHeatFamily[c], k, b)).epsilon(1e-2));
            }
        }

    // Below the grid the heat integrand is ~ t^{(m - alpha/2) q - 1}; at alpha = 1.5 that part is visible
    // and the tail estimate accounts for it.
    const auto b = BesovParams::make(1.5, 2.0, 2.0);
    const auto heat = besov_breakdown(*H, wave(d, 3), b);
    const double lam = std::hypot(heat.scale_part(), heat.tail_estimate);
    const double oracle_lam = torus_eigen_oracle(Characterization::Heat, 3, b) - heat.base;
    CHECK(std::abs(lam / oracle_lam - 1.0) < 1e-2);
    CHECK(std::abs(heat.scale_part() / oracle_lam - 1.0) > 1e-3);

    // Difference: the y lattice needs a finer grid.
    auto fine = torus1(1024);
    const auto V = default_volume_model(*fine);
    const auto bd = BesovParams::make(0.5, 2.0, 2.0);
    const std::vector<Characterization> diff{Characterization::Difference};
    auto Hf = make_heat_operator(fine, EngineSpec{});
    for (int k : {0, 1, 2}) {
        const auto n = evaluate_characterizations(*Hf, wave(fine, k), bd, diff, TGrid(), &V);
        CHECK(n[0].total == doctest::Approx(torus_eigen_oracle(Characterization::Difference, k, bd)).epsilon(1e-2));
    }
}

TEST_CASE("equivalence report on the eigenfunction family") {
    const std::vector<int> ks{1, 2, 3};
    const auto fam = FunctionFamily::torus_eigen(ks);
    const auto b = BesovParams::make(0.5, 2.0, 2.0);
    EquivalenceOptions opt;
    opt.refine = false;
    const auto rep = equivalence_report(fam, torus1(256), b, kHeatFamily, opt);
    CHECK(!rep.degenerate);
    CHECK(!rep.refined);
    REQUIRE(rep.base.ratios.size() == 6);
    std::size_t pair = 0;
    for (std::size_t i = 0; i < kHeatFamily.size(); ++i)
        for (std::size_t j = i + 1; j < kHeatFamily.size(); ++j, ++pair) {
            const auto& r = rep.base.ratios[pair];
            CHECK(r.num == kHeatFamily[i]);
            CHECK(r.den == kHeatFamily[j]);
            CHECK(r.count == ks.size());
            CHECK(r.min <= r.geo_mean);
            CHECK(r.geo_mean <= r.max);
            for (std::size_t f = 0; f < ks.size(); ++f) {
                const double got = rep.base.norms[f][i].total / rep.base.norms[f][j].total;
                const double want = torus_eigen_oracle(kHeatFamily[i], ks[f], b) / torus_eigen_oracle(kHeatFamily[j], ks[f], b);
                CHECK(got == doctest::Approx(want).epsilon(1e-2));
            }
        }
}

TEST_CASE("equivalence report bookkeeping") {
    const auto b = BesovParams::make(0.5, 2.0, 2.0);
    auto d = torus1(64);

    const auto zero = equivalence_report(FunctionFamily::zero(), d, b, kHeatFamily);
    CHECK(zero.degenerate);
    CHECK(!zero.refined);
    for (const auto& r : zero.base.ratios) CHECK(r.count == 0);
    CHECK(zero.stable());

    const std::vector<Characterization> none;
    CHECK_THROWS_AS(equivalence_report(FunctionFamily::zero(), d, b, none), std::invalid_argument);
    const std::vector<Characterization> slice{Characterization::Heat, Characterization::SliceL1};
    CHECK_THROWS_AS(equivalence_report(FunctionFamily::zero(), d, BesovParams::make(0.0, 2.0, 2.0), slice),
                    std::invalid_argument);
    const std::vector<Characterization> diff{Characterization::Heat, Characterization::Difference};
    CHECK_THROWS_AS(equivalence_report(FunctionFamily::zero(), d, BesovParams::make(1.0, 2.0, 2.0), diff),
                    std::invalid_argument);
    const std::vector<Characterization> twice{Characterization::Heat, Characterization::Heat};
    CHECK_THROWS_AS(validate_characterizations(twice, b), std::invalid_argument);

    // Deterministic, refinement runs at doubled grid and nodes per octave, intervals are ordered.
    const auto fam = FunctionFamily::torus_gaussians(4, 5);
    const std::vector<Characterization> all{Characterization::Heat, Characterization::Dyadic, Characterization::SliceL1,
                                            Characterization::XSup, Characterization::Difference};
    const auto r1 = equivalence_report(fam, d, b, all);
    const auto r2 = equivalence_report(fam, d, b, all);
    REQUIRE(r1.refined);
    CHECK(r1.refined->domain->grid.axis(0).nodes == 128);
    CHECK(r1.refined->tgrid.per_octave() == 16);
    CHECK(r1.drift.size() == 10);
    CHECK(r1.stable());
    for (std::size_t f = 0; f < fam.size(); ++f)
        for (std::size_t c = 0; c < all.size(); ++c) CHECK(r1.base.norms[f][c].total == r2.base.norms[f][c].total);
    for (const auto& r : r1.base.ratios) {
        CHECK(r.count == fam.size());
        CHECK(r.min <= r.geo_mean);
        CHECK(r.geo_mean <= r.max);
        CHECK(std::isfinite(r.max));
    }

    // Non-finite input aborts.
    FunctionFamily bad{"bad", "nan", 0, {{"nan", [](const Point&) { return std::nan(""); }}}};
    CHECK_THROWS_WITH(equivalence_report(bad, d, b, kHeatFamily), doctest::Contains("non-finite"));
}

TEST_CASE("small Heisenberg equivalence run") {
    const auto fam = FunctionFamily::heisenberg_bumps(2, 42);
    auto hd = default_domain(GroupModel::heisenberg(), {16, 16, 12});
    EquivalenceOptions opt;
    opt.engine = EngineSpec{EngineKind::FiniteDifference};
    opt.refine = false;
    opt.tgrid = TGrid(-10, 4);
    const std::vector<Characterization> chars{Characterization::Heat, Characterization::XSup, Characterization::Difference};
    const auto rep = equivalence_report(fam, hd, BesovParams::make(0.5, 2.0, 2.0), chars, opt);
    for (const auto& r : rep.base.ratios) {
        CHECK(r.count == 2);
        CHECK(r.min > 0.0);
        CHECK(std::isfinite(r.max));
    }
}

TEST_CASE("embedding check") {
    auto d = torus1(64);
    const EngineSpec spectral{};
    const auto b = BesovParams::make(1.0, 2.0, 2.0);
    const std::vector<double> qs{1.0, 1.5, 2.0, 4.0, kInfinity};

    FunctionFamily constant{"one", "constant", 0, {{"one", [](const Point&) { return 1.0; }}}};
    const auto c = embedding_check(constant, d, spectral, b, qs);
    for (double v : c.values[0]) CHECK(v == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-14));

    const std::vector<double> q3{1.0, 2.0, kInfinity};
    const std::vector<int> one{1};
    const auto e = embedding_check(FunctionFamily::torus_eigen(one), d, spectral, b, q3);
    CHECK(e.violations == 0);
    CHECK(e.values[0][0] > e.values[0][1]);
    CHECK(e.values[0][1] > e.values[0][2]);
    // Scalar sums over the octaves with t^{1/2} e^{-t} sqrt(pi).
    std::vector<double> terms;
    for (int j = -16; j <= -1; ++j) {
        const double t = std::ldexp(1.0, j);
        terms.push_back(std::sqrt(t) * std::exp(-t) * std::sqrt(kPi));
    }
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
    for (double v : terms) {
        l1 += v;
        l2 += v * v;
        linf = std::max(linf, v);
    }
    CHECK(e.values[0][0] == doctest::Approx(std::sqrt(kPi) + l1).epsilon(1e-10));
    CHECK(e.values[0][1] == doctest::Approx(std::sqrt(kPi) + std::sqrt(l2)).epsilon(1e-10));
    CHECK(e.values[0][2] == doctest::Approx(std::sqrt(kPi) + linf).epsilon(1e-10));

    const auto fifty = embedding_check(FunctionFamily::torus_trig(50, 8, 42), d, spectral, b, qs);
    CHECK(fifty.functions.size() == 50);
    CHECK(fifty.violations == 0);

    const std::vector<double> unsorted{2.0, 1.0};
    CHECK_THROWS_AS(embedding_check(constant, d, spectral, b, unsorted), std::invalid_argument);
}

TEST_CASE("refinement stability") {
    RefinementExperiment oracle;
    oracle.name = "cos heat norm";
    oracle.tolerance = 1e-3;
    oracle.run = [](const Resolution& r) {
        auto d = torus1(64 * r.grid);
        auto H = make_heat_operator(d, EngineSpec{});
        const auto b = BesovParams::make(0.5, 2.0, 2.0);
        return std::vector<NamedScalar>{{"besov", besov_norm(*H, wave(d, 1), b, TGrid(-16, 8 * r.tgrid))},
                                        {"oracle", torus_eigen_oracle(Characterization::Heat, 1, b)}};
    };
    const auto rep = refinement_stability(oracle);
    CHECK(rep.pass());
    for (const auto& e : rep.entries) CHECK(e.change <= 1e-3);

    RefinementExperiment zero;
    zero.name = "zero";
    zero.run = [](const Resolution& r) {
        auto d = torus1(32 * r.grid);
        auto H = make_heat_operator(d, EngineSpec{});
        return std::vector<NamedScalar>{{"besov", besov_norm(*H, GridFunction(d), BesovParams::make(1.0, 2.0, 2.0))}};
    };
    const auto z = refinement_stability(zero);
    CHECK(z.pass());
    CHECK(z.entries[0].base == 0.0);
    CHECK(z.entries[0].change == 0.0);

    // Second-order rule in log t: the Calderon residual at least halves when only the t grid doubles.
    RefinementExperiment calderon;
    calderon.name = "calderon";
    calderon.refine_grid = false;
    calderon.tolerance = 1.0;
    calderon.run = [](const Resolution& r) {
        auto line = default_domain(GroupModel::euclid_line(), {256, 0, 0});
        auto H = make_heat_operator(line, EngineSpec{});
        const auto g = GridFunction::sample(line, [](const Point& x) { return std::exp(-x[0] * x[0] / 2.0); });
        return std::vector<NamedScalar>{{"residual", calderon_decompose(*H, g, 1, TGrid(-16, 8 * r.tgrid)).residual}};
    };
    const auto cr = refinement_stability(calderon);
    CHECK(cr.entries[0].refined <= 0.5 * cr.entries[0].base);

    RefinementExperiment big = oracle;
    big.node_count = [](const Resolution& r) { return static_cast<std::size_t>(64 * r.grid); };
    big.node_limit = 100;
    const auto partial = refinement_stability(big);
    CHECK(!partial.complete);
    CHECK(!partial.pass());
    CHECK(!partial.note.empty());
    CHECK(partial.entries.size() == 2);
}
