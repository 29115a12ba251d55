#include "besov/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace besov {

int BesovParams::default_m(double alpha) { return static_cast<int>(std::floor(alpha / 2.0)) + 1; }
int BesovParams::default_mbar(double alpha) { return static_cast<int>(std::floor(alpha)) + 1; }
double BesovParams::default_t0(double alpha) { return alpha > 0.0 ? 0.0 : 0.5; }

BesovParams BesovParams::make(double alpha, double p, double q) {
    BesovParams b;
    b.alpha = alpha;
    b.p = p;
    b.q = q;
    b.m = default_m(alpha);
    b.t0 = default_t0(alpha);
    b.mbar = default_mbar(alpha);
    b.validate();
    return b;
}

void BesovParams::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite and >= 0");
    check_exponent(p, "p");
    check_exponent(q, "q");
    if (m < 1 || !(2.0 * m > alpha)) throw std::invalid_argument("m must be a positive integer with m > alpha/2");
    if (!(t0 >= 0.0 && t0 < 1.0)) throw std::invalid_argument("t0 must lie in [0, 1)");
    if (t0 == 0.0 && alpha == 0.0) throw std::invalid_argument("t0 = 0 requires alpha > 0");
    if (mbar < 1 || !(mbar > alpha)) throw std::invalid_argument("mbar must be an integer > alpha");
}

std::string to_string(Characterization c) {
    switch (c) {
        case Characterization::Heat: return "heat";
        case Characterization::Dyadic: return "dyadic";
        case Characterization::SliceL1: return "slice_l1";
        case Characterization::XSup: return "xsup";
        case Characterization::Difference: return "difference";
    }
    return "?";
}

Characterization characterization_from_string(const std::string& s) {
    for (auto c : {Characterization::Heat, Characterization::Dyadic, Characterization::SliceL1, Characterization::XSup,
                   Characterization::Difference})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown characterization '" + s + "'");
}

double NormBreakdown::scale_part() const {
    std::vector<double> v, w;
    v.reserve(terms.size());
    w.reserve(terms.size());
    for (const auto& t : terms) {
        v.push_back(t.value);
        w.push_back(t.weight);
    }
    return lq_aggregate(v, w, params.q);
}

double NormBreakdown::recompute_total() const { return base + scale_part(); }

double field_sup(const GridFunction& g, int order, double p) {
    if (order < 0 || order > kMaxFieldOrder) throw std::invalid_argument("field order exceeds the budget of 4");
    double best = lp_norm(g, p);
    std::vector<GridFunction> level{g};
    const int k = g.group().generators();
    for (int l = 1; l <= order; ++l) {
        std::vector<GridFunction> next;
        next.reserve(level.size() * static_cast<std::size_t>(k));
        for (const auto& h : level)
            for (int i = 1; i <= k; ++i) {
                next.push_back(apply_field(h, i));
                best = std::max(best, lp_norm(next.back(), p));
            }
        level = std::move(next);
    }
    return best;
}

ScaleProfile scale_profile(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                           const TGrid& tgrid, const ProfileRequest& request) {
    params.validate();
    if (request.slices && !(params.alpha > 0.0)) throw std::invalid_argument("slice_l1 characterization needs alpha > 0");
    if (request.fields && params.mbar > kMaxFieldOrder)
        throw std::invalid_argument("mbar exceeds the field budget of 4");
    ScaleProfile prof{params, tgrid, {}, {}, {}, 0.0, 0.0};
    const auto& nodes = tgrid.nodes();
    const std::size_t N = nodes.size();
    const std::size_t L = static_cast<std::size_t>(tgrid.per_octave());

    std::vector<double> ts = nodes;
    std::size_t t0_index = std::find(nodes.begin(), nodes.end(), params.t0) - nodes.begin();
    if (t0_index == N) ts.push_back(params.t0);
    const std::size_t half_index = tgrid.dyadic_index(-1);

    if (request.delta) prof.delta_norms.assign(N, 0.0);
    if (request.fields) prof.field_sups.assign(N, 0.0);
    if (request.slices) prof.slice_norms.assign(static_cast<std::size_t>(tgrid.octaves()), 0.0);
    const int power = (request.delta || request.slices) ? params.m : 0;
    const int m = params.m;
    const double p = params.p;

    GridFunction acc(f.domain());
    const double full = std::numbers::ln2 / static_cast<double>(L);
    H.sweep(f, ts, power, [&](std::size_t idx, double t, std::span<const GridFunction> pw) {
        if (idx == t0_index) prof.norm_t0 = lp_norm(pw[0], p);
        if (idx == half_index) prof.norm_half = lp_norm(pw[0], p);
        if (idx >= N) return;
        if (request.delta) prof.delta_norms[idx] = lp_norm(pw[power], p);
        if (request.fields) prof.field_sups[idx] = field_sup(pw[0], params.mbar, p);
        if (request.slices) {
            // Trapezoid in log t per octave; octave boundaries are shared by two octaves.
            const double tm = std::pow(t, m);
            const auto& dm = pw[power].values();
            auto add = [&](double w) {
                auto& a = acc.values();
                for (std::size_t s = 0; s < a.size(); ++s) a[s] += w * tm * std::abs(dm[s]);
            };
            if (idx % L == 0) {
                if (idx > 0) {
                    add(0.5 * full);
                    prof.slice_norms[idx / L - 1] = lp_norm(acc, p);
                }
                if (idx + 1 < N) {
                    std::fill(acc.values().begin(), acc.values().end(), 0.0);
                    add(0.5 * full);
                }
            } else {
                add(full);
            }
        }
    });
    return prof;
}

namespace {

NormBreakdown start(const char* id, const ScaleProfile& prof) {
    NormBreakdown b;
    b.characterization = id;
    b.params = prof.params;
    return b;
}

void finish(NormBreakdown& b) { b.total = b.recompute_total(); }

void need(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("scale profile lacks ") + what);
}

}  // namespace

NormBreakdown assemble_lambda(const ScaleProfile& prof) {
    need(!prof.delta_norms.empty(), "sublaplacian norms");
    const auto& P = prof.params;
    const auto& tg = prof.tgrid;
    const double s = P.m - P.alpha / 2.0;
    NormBreakdown b = start("lambda", prof);
    for (std::size_t n = 0; n < tg.size(); ++n) {
        const double t = tg.nodes()[n];
        b.terms.push_back({tg.octave_of(n), t, tg.weights()[n], std::pow(t, s) * prof.delta_norms[n]});
    }
    // Below t_min the integrand is taken at its t_min size: int_0^{t_min} t^{sq} dt/t = t_min^{sq}/(sq).
    const double edge = std::pow(tg.t_min(), s) * prof.delta_norms.front();
    b.tail_estimate = std::isinf(P.q) ? edge : edge * std::pow(1.0 / (s * P.q), 1.0 / P.q);
    finish(b);
    return b;
}

NormBreakdown assemble(Characterization c, const ScaleProfile& prof) {
    const auto& P = prof.params;
    const auto& tg = prof.tgrid;
    switch (c) {
        case Characterization::Heat: {
            NormBreakdown b = assemble_lambda(prof);
            b.characterization = "heat";
            b.base = prof.norm_t0;
            finish(b);
            return b;
        }
        case Characterization::Dyadic: {
            need(!prof.delta_norms.empty(), "sublaplacian norms");
            NormBreakdown b = start("dyadic", prof);
            b.base = prof.norm_t0;
            for (int j = tg.j_min(); j <= -1; ++j) {
                const double t = std::ldexp(1.0, j);
                b.terms.push_back({j, t, 1.0, std::pow(t, P.m - P.alpha / 2.0) * prof.delta_norms[tg.dyadic_index(j)]});
            }
            finish(b);
            return b;
        }
        case Characterization::SliceL1: {
            need(!prof.slice_norms.empty(), "octave slices");
            NormBreakdown b = start("slice_l1", prof);
            b.base = prof.norm_t0;
            b.debug = prof.slice_norms;
            for (int j = tg.j_min(); j <= -1; ++j) {
                const double t = std::ldexp(1.0, j);
                b.terms.push_back({j, t, 1.0, std::pow(t, -P.alpha / 2.0) * prof.slice_norms[j - tg.j_min()]});
            }
            finish(b);
            return b;
        }
        case Characterization::XSup: {
            need(!prof.field_sups.empty(), "field suprema");
            NormBreakdown b = start("xsup", prof);
            b.base = prof.norm_half;
            for (int j = tg.j_min(); j <= -1; ++j) {
                const double t = std::ldexp(1.0, j);
                const std::size_t lo = tg.dyadic_index(j), hi = tg.dyadic_index(j + 1);
                const double mx = *std::max_element(prof.field_sups.begin() + lo, prof.field_sups.begin() + hi + 1);
                b.terms.push_back({j, t, 1.0, std::pow(t, (P.mbar - P.alpha) / 2.0) * mx});
            }
            finish(b);
            return b;
        }
        case Characterization::Difference:
            throw std::invalid_argument("difference characterization is not built from a heat profile");
    }
    throw std::invalid_argument("unknown characterization");
}

NormBreakdown lambda_functional(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                                const TGrid& tgrid) {
    return assemble_lambda(scale_profile(H, f, params, tgrid, {}));
}

NormBreakdown besov_breakdown(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                              const TGrid& tgrid) {
    return assemble(Characterization::Heat, scale_profile(H, f, params, tgrid, {}));
}

double besov_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params, const TGrid& tgrid) {
    return besov_breakdown(H, f, params, tgrid).total;
}

NormBreakdown dyadic_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                          const TGrid& tgrid) {
    return assemble(Characterization::Dyadic, scale_profile(H, f, params, tgrid, {}));
}

NormBreakdown slice_l1_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                            const TGrid& tgrid) {
    return assemble(Characterization::SliceL1, scale_profile(H, f, params, tgrid, {false, true, false}));
}

NormBreakdown xsup_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                        const TGrid& tgrid) {
    return assemble(Characterization::XSup, scale_profile(H, f, params, tgrid, {false, false, true}));
}

double recursive_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                      const TGrid& tgrid) {
    double total = lp_norm(f, params.p);
    for (int i = 1; i <= f.group().generators(); ++i) total += besov_norm(H, apply_field(f, i), params, tgrid);
    return total;
}

}  // namespace besov
