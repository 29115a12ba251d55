#include "besov/verify.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace besov {

namespace {

constexpr double kPi = std::numbers::pi;

std::string indexed(const std::string& stem, int i) {
    std::string s = std::to_string(i);
    return stem + "-" + std::string(s.size() < 2 ? 1 : 0, '0') + s;
}

double quad(const std::function<double(double)>& g, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-13);
}

}  // namespace

std::uint64_t SplitMix::next() noexcept {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<GridFunction> FunctionFamily::sample(const DomainPtr& domain) const {
    std::vector<GridFunction> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(GridFunction::sample(domain, m.fn));
    return out;
}

FunctionFamily FunctionFamily::torus_gaussians(int count, std::uint64_t seed) {
    FunctionFamily fam{"torus_gaussians", "periodised gaussian", seed, {}};
    SplitMix rng(seed);
    for (int i = 0; i < count; ++i) {
        const double c = rng.uniform(-kPi, kPi);
        const double s = rng.uniform(0.3, 0.9);
        const double a = rng.uniform(0.5, 1.5);
        fam.members.push_back({indexed("tg", i), [=](const Point& x) {
                                   double v = 0.0;
                                   for (int k = -3; k <= 3; ++k) {
                                       const double d = x[0] - c + 2.0 * kPi * k;
                                       v += std::exp(-d * d / (2.0 * s * s));
                                   }
                                   return a * v;
                               }});
    }
    return fam;
}

FunctionFamily FunctionFamily::torus_trig(int count, int max_degree, std::uint64_t seed) {
    if (max_degree < 1) throw std::invalid_argument("trigonometric degree must be >= 1");
    FunctionFamily fam{"torus_trig", "trigonometric polynomial", seed, {}};
    SplitMix rng(seed ^ 0x7472696eULL);
    for (int i = 0; i < count; ++i) {
        const int deg = 1 + static_cast<int>(rng.uniform() * max_degree);
        std::vector<double> a(static_cast<std::size_t>(deg) + 1), b(static_cast<std::size_t>(deg) + 1);
        a[0] = rng.uniform(-1.0, 1.0);
        for (int k = 1; k <= deg; ++k) {
            a[k] = rng.uniform(-1.0, 1.0) / k;
            b[k] = rng.uniform(-1.0, 1.0) / k;
        }
        fam.members.push_back({indexed("tp", i), [a, b](const Point& x) {
                                   double v = a[0];
                                   for (std::size_t k = 1; k < a.size(); ++k)
                                       v += a[k] * std::cos(k * x[0]) + b[k] * std::sin(k * x[0]);
                                   return v;
                               }});
    }
    return fam;
}

FunctionFamily FunctionFamily::heisenberg_bumps(int count, std::uint64_t seed) {
    FunctionFamily fam{"heisenberg_bumps", "gaussian product", seed, {}};
    SplitMix rng(seed ^ 0x68656973ULL);
    for (int i = 0; i < count; ++i) {
        const Point c{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)};
        // Widths keep every member below 2e-3 of its peak on the window boundary.
        const Point s{rng.uniform(0.5, 0.75), rng.uniform(0.5, 0.75), rng.uniform(0.3, 0.5)};
        const double a = rng.uniform(0.5, 1.5);
        fam.members.push_back({indexed("hb", i), [=](const Point& x) {
                                   double e = 0.0;
                                   for (int k = 0; k < 3; ++k) e += (x[k] - c[k]) * (x[k] - c[k]) / (2.0 * s[k] * s[k]);
                                   return a * std::exp(-e);
                               }});
    }
    return fam;
}

FunctionFamily FunctionFamily::torus_eigen(std::span<const int> ks) {
    FunctionFamily fam{"torus_eigen", "cosine", 0, {}};
    for (int k : ks) fam.members.push_back({"cos" + std::to_string(k), [k](const Point& x) { return std::cos(k * x[0]); }});
    return fam;
}

FunctionFamily FunctionFamily::zero() {
    return {"zero", "zero", 0, {{"zero", [](const Point&) { return 0.0; }}}};
}

std::vector<FunctionFamily> standard_suite(std::uint64_t seed) {
    return {FunctionFamily::torus_gaussians(10, seed), FunctionFamily::torus_trig(10, 8, seed),
            FunctionFamily::heisenberg_bumps(10, seed)};
}

double fourier_oracle_norm(const GridFunction& f, const BesovParams& params) {
    if (f.group().kind() != GroupKind::Torus) throw std::invalid_argument("Fourier oracle needs a torus");
    if (params.p != 2.0 || params.q != 2.0) throw std::invalid_argument("Fourier oracle needs p = q = 2");
    const Grid& g = f.grid();
    detail::RealFft fft(g);
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    fft.forward(f.values().data(), spec.data());
    const auto k2 = fft.wavenumber_squared(g);
    const int nl = g.axis(g.dim() - 1).nodes;
    const std::size_t last = static_cast<std::size_t>(nl / 2 + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const std::size_t kl = i % last;
        const double half = (kl == 0 || (nl % 2 == 0 && kl == static_cast<std::size_t>(nl / 2))) ? 1.0 : 2.0;
        s += half * std::pow(1.0 + k2[i], params.alpha) * std::norm(spec[i]);
    }
    return std::sqrt(s * g.cell_measure() / static_cast<double>(g.size()));
}

double torus_eigen_oracle(Characterization c, int k, const BesovParams& P, const TGrid& tg) {
    P.validate();
    if (k < 0) throw std::invalid_argument("frequency must be >= 0");
    const double p = P.p, q = P.q;
    const double lam = static_cast<double>(k) * k;
    // ||cos||_p = ||sin||_p over one period
    const double cp = std::isinf(p) ? 1.0
                                    : std::pow(quad([p](double x) { return std::pow(std::abs(std::cos(x)), p); }, 0.0, 2.0 * kPi), 1.0 / p);
    const double base_norm = k == 0 ? (std::isinf(p) ? 1.0 : std::pow(2.0 * kPi, 1.0 / p)) : cp;
    auto agg = [q](const std::vector<double>& v) { return lq_aggregate(v, q); };
    auto low = [&](double t) { return std::exp(-lam * t) * base_norm; };
    const double mdiff = P.m - P.alpha / 2.0;
    switch (c) {
        case Characterization::Heat: {
            if (k == 0) return low(P.t0);
            auto g = [&](double t) { return std::pow(t, mdiff) * std::pow(lam, P.m) * std::exp(-lam * t) * cp; };
            double lam_part;
            if (std::isinf(q)) {
                // t^s e^{-lam t} peaks at s/lam
                const double ts = std::min(1.0, mdiff / lam);
                lam_part = g(ts);
            } else {
                lam_part = std::pow(quad([&](double t) { return std::pow(g(t), q) / t; }, 0.0, 1.0), 1.0 / q);
            }
            return low(P.t0) + lam_part;
        }
        case Characterization::Dyadic: {
            std::vector<double> v;
            for (int j = tg.j_min(); j <= -1; ++j) {
                const double t = std::ldexp(1.0, j);
                v.push_back(std::pow(t, mdiff) * std::pow(lam, P.m) * std::exp(-lam * t) * cp);
            }
            return low(P.t0) + (k == 0 ? 0.0 : agg(v));
        }
        case Characterization::SliceL1: {
            std::vector<double> v;
            for (int j = tg.j_min(); j <= -1; ++j) {
                const double a = std::ldexp(1.0, j);
                // t = a s keeps the interval at unit length; the error floor is absolute.
                const double oct = quad([&](double s) { return std::pow(a * s * lam, P.m) * std::exp(-lam * a * s) / s; }, 1.0, 2.0);
                v.push_back(std::pow(a, -P.alpha / 2.0) * oct * cp);
            }
            return low(P.t0) + (k == 0 ? 0.0 : agg(v));
        }
        case Characterization::XSup: {
            // sup over |I| <= mbar of k^{|I|} e^{-lam t}, largest at the left end of each octave.
            const double kk = std::max(1.0, std::pow(static_cast<double>(k), P.mbar));
            std::vector<double> v;
            for (int j = tg.j_min(); j <= -1; ++j) {
                const double t = std::ldexp(1.0, j);
                v.push_back(std::pow(t, (P.mbar - P.alpha) / 2.0) * (k == 0 ? base_norm : kk * std::exp(-lam * t) * cp));
            }
            return low(0.5) + agg(v);
        }
        case Characterization::Difference: {
            if (k == 0) return base_norm;
            // ||cos(k(. + y)) - cos(k .)||_p = 2 |sin(k y / 2)| ||sin||_p, V(r) = 2r.
            auto g = [&](double y) { return 2.0 * std::abs(std::sin(k * y / 2.0)) * cp / std::pow(y, P.alpha); };
            double L;
            if (std::isinf(q)) {
                L = 0.0;
                for (int i = 1; i <= 4000; ++i) L = std::max(L, g(i / 4000.0));
            } else {
                L = std::pow(2.0 * quad([&](double y) { return std::pow(g(y), q) / (2.0 * y); }, 0.0, 1.0), 1.0 / q);
            }
            return base_norm + L;
        }
    }
    throw std::invalid_argument("unknown characterization");
}

std::vector<NormBreakdown> evaluate_characterizations(const HeatOperator& H, const GridFunction& f,
                                                      const BesovParams& params,
                                                      std::span<const Characterization> chars, const TGrid& tgrid,
                                                      const VolumeModel* V, const DifferenceOptions& diff) {
    ProfileRequest req{false, false, false};
    for (auto c : chars) {
        if (c == Characterization::Heat || c == Characterization::Dyadic) req.delta = true;
        if (c == Characterization::SliceL1) req.slices = true;
        if (c == Characterization::XSup) req.fields = true;
    }
    const bool any_heat = req.delta || req.slices || req.fields;
    std::optional<ScaleProfile> prof;
    if (any_heat) prof = scale_profile(H, f, params, tgrid, req);
    std::vector<NormBreakdown> out;
    for (auto c : chars) {
        if (c == Characterization::Difference) {
            if (!V) throw std::invalid_argument("difference characterization needs a volume model");
            NormBreakdown b = difference_functional(f, params, *V, diff);
            b.base = lp_norm(f, params.p);
            b.total = b.recompute_total();
            out.push_back(std::move(b));
        } else {
            out.push_back(assemble(c, *prof));
        }
    }
    return out;
}

void validate_characterizations(std::span<const Characterization> chars, const BesovParams& params) {
    params.validate();
    if (chars.empty()) throw std::invalid_argument("characterization set is empty");
    for (std::size_t i = 0; i < chars.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (chars[i] == chars[j]) throw std::invalid_argument("characterization listed twice: " + to_string(chars[i]));
    for (auto c : chars) {
        if (c == Characterization::SliceL1 && !(params.alpha > 0.0))
            throw std::invalid_argument("slice_l1 needs alpha > 0");
        if (c == Characterization::Difference && !(params.alpha > 0.0 && params.alpha < 1.0))
            throw std::invalid_argument("difference characterization needs alpha in (0, 1)");
        if (c == Characterization::XSup && params.mbar > kMaxFieldOrder)
            throw std::invalid_argument("xsup needs mbar <= 4");
    }
}

namespace {

EquivalenceRun run_equivalence(const FunctionFamily& fam, const DomainPtr& domain, const TGrid& tgrid,
                               const BesovParams& params, std::span<const Characterization> chars,
                               const EquivalenceOptions& opt) {
    EquivalenceRun run{domain, tgrid, {}, {}};
    auto H = make_heat_operator(domain, opt.engine);
    std::optional<VolumeModel> V;
    if (std::find(chars.begin(), chars.end(), Characterization::Difference) != chars.end())
        V = default_volume_model(*domain);
    run.norms.resize(fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const auto f = GridFunction::sample(domain, fam.members[i].fn);
        run.norms[i] = evaluate_characterizations(*H, f, params, chars, tgrid, V ? &*V : nullptr, opt.difference);
        for (std::size_t c = 0; c < chars.size(); ++c)
            if (!std::isfinite(run.norms[i][c].total))
                throw std::runtime_error("non-finite " + to_string(chars[c]) + " norm for " + fam.members[i].id);
    }
    for (std::size_t a = 0; a < chars.size(); ++a)
        for (std::size_t b = a + 1; b < chars.size(); ++b) {
            RatioInterval r{chars[a], chars[b], kInfinity, 0.0, 0.0, 0};
            double logsum = 0.0;
            for (const auto& row : run.norms) {
                const double x = row[a].total, y = row[b].total;
                if (!(x > 0.0 && y > 0.0)) continue;
                const double ratio = x / y;
                r.min = std::min(r.min, ratio);
                r.max = std::max(r.max, ratio);
                logsum += std::log(ratio);
                ++r.count;
            }
            if (r.count == 0) {
                r.min = 0.0;
            } else {
                // Clamp guards the last-ulp rounding of exp(mean log) against the interval.
                r.geo_mean = std::clamp(std::exp(logsum / static_cast<double>(r.count)), r.min, r.max);
            }
            run.ratios.push_back(r);
        }
    return run;
}

}  // namespace

bool EquivalenceReport::stable() const {
    return std::none_of(flagged.begin(), flagged.end(), [](char c) { return c != 0; });
}

EquivalenceReport equivalence_report(const FunctionFamily& family, const DomainPtr& domain, const BesovParams& params,
                                     std::span<const Characterization> chars, const EquivalenceOptions& opt) {
    validate_characterizations(chars, params);
    EquivalenceReport rep;
    rep.family = family.id;
    rep.params = params;
    rep.characterizations.assign(chars.begin(), chars.end());
    for (const auto& m : family.members) rep.functions.push_back(m.id);
    rep.base = run_equivalence(family, domain, opt.tgrid, params, chars, opt);
    rep.degenerate = std::all_of(rep.base.ratios.begin(), rep.base.ratios.end(),
                                 [](const RatioInterval& r) { return r.count == 0; });
    if (opt.refine && !rep.degenerate) {
        rep.refined = run_equivalence(family, refine(domain, 2), opt.tgrid.refined(), params, chars, opt);
        for (std::size_t i = 0; i < rep.base.ratios.size(); ++i) {
            const auto &b = rep.base.ratios[i], &r = rep.refined->ratios[i];
            double d = 0.0;
            if (b.count > 0 && r.count > 0)
                d = std::max(std::abs(r.min / b.min - 1.0), std::abs(r.max / b.max - 1.0));
            else if (b.count != r.count)
                d = kInfinity;
            rep.drift.push_back(d);
            rep.flagged.push_back(d > opt.drift_tolerance ? 1 : 0);
        }
    }
    return rep;
}

EmbeddingReport embedding_check(const FunctionFamily& family, const DomainPtr& domain, const EngineSpec& engine,
                                const BesovParams& params, std::span<const double> qs, const TGrid& tgrid) {
    if (!std::is_sorted(qs.begin(), qs.end())) throw std::invalid_argument("q list must be ascending");
    for (double q : qs) check_exponent(q, "q");
    EmbeddingReport rep;
    rep.qs.assign(qs.begin(), qs.end());
    auto H = make_heat_operator(domain, engine);
    for (const auto& m : family.members) {
        rep.functions.push_back(m.id);
        const auto f = GridFunction::sample(domain, m.fn);
        ScaleProfile prof = scale_profile(*H, f, params, tgrid, {});
        std::vector<double> row;
        for (double q : qs) {
            prof.params.q = q;
            row.push_back(assemble(Characterization::Dyadic, prof).total);
        }
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] > row[i - 1]) ++rep.violations;
        rep.values.push_back(std::move(row));
    }
    return rep;
}

bool StabilityReport::pass() const {
    return complete && std::all_of(entries.begin(), entries.end(), [](const StabilityEntry& e) { return e.pass; });
}

StabilityReport refinement_stability(const RefinementExperiment& exp) {
    StabilityReport rep;
    rep.experiment = exp.name;
    rep.tolerance = exp.tolerance;
    const Resolution base{1, 1};
    const Resolution fine{exp.refine_grid ? 2 : 1, exp.refine_tgrid ? 2 : 1};
    const auto b = exp.run(base);
    if (exp.node_limit > 0 && exp.node_count && exp.node_count(fine) > exp.node_limit) {
        rep.complete = false;
        rep.note = "refined run needs " + std::to_string(exp.node_count(fine)) + " nodes, limit " +
                   std::to_string(exp.node_limit);
        for (const auto& s : b) rep.entries.push_back({s.name, s.value, 0.0, 0.0, false});
        return rep;
    }
    const auto r = exp.run(fine);
    if (r.size() != b.size()) throw std::runtime_error("experiment reported different scalars at the two resolutions");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i].name != r[i].name) throw std::runtime_error("experiment scalar names differ between resolutions");
        StabilityEntry e{b[i].name, b[i].value, r[i].value, 0.0, false};
        if (b[i].value == 0.0)
            e.change = r[i].value == 0.0 ? 0.0 : kInfinity;
        else
            e.change = std::abs(r[i].value - b[i].value) / std::abs(b[i].value);
        e.pass = std::isfinite(e.change) && e.change <= exp.tolerance;
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace besov
