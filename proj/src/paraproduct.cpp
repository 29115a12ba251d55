#include "besov/paraproduct.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

namespace besov {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

void check_order(const HeatOperator& H, int m) {
    if (m < 1) throw std::invalid_argument("operator order m must be >= 1");
    if (m > H.max_delta_power())
        throw std::invalid_argument("operator order exceeds the sublaplacian budget of the engine");
}

// phi_t X and psi_t X from Delta^k H_t X, k = 0..m.
void phi_psi(std::span<const GridFunction> powers, double t, int m, GridFunction* phi, GridFunction* psi) {
    if (phi) {
        *phi = GridFunction(powers[0].domain());
        double c = 1.0;
        for (int k = 0; k < m; ++k) {
            phi->axpy(-c, powers[k]);
            c *= t / (k + 1);
        }
    }
    if (psi) {
        *psi = powers[m];
        *psi *= std::pow(t, m) / factorial(m - 1);
    }
}

struct PhiPsi {
    GridFunction phi, psi;
};

PhiPsi at(const HeatOperator& H, const GridFunction& x, double t, int m, bool want_phi, bool want_psi) {
    PhiPsi r;
    const double one[1] = {t};
    H.sweep(x, one, m, [&](std::size_t, double, std::span<const GridFunction> pw) {
        phi_psi(pw, t, m, want_phi ? &r.phi : nullptr, want_psi ? &r.psi : nullptr);
    });
    return r;
}

double relative_l2(const GridFunction& err, const GridFunction& ref) {
    const double n = lp_norm(ref, 2.0);
    const double e = lp_norm(err, 2.0);
    if (n == 0.0) return e == 0.0 ? 0.0 : kInfinity;
    return e / n;
}

}  // namespace

GridFunction phi_apply(const HeatOperator& H, const GridFunction& f, double t, int m) {
    check_order(H, m);
    if (!(t > 0.0 && t <= 1.0)) throw std::out_of_range("t must lie in (0, 1]");
    return at(H, f, t, m, true, false).phi;
}

GridFunction psi_apply(const HeatOperator& H, const GridFunction& f, double t, int m) {
    check_order(H, m);
    if (!(t > 0.0 && t <= 1.0)) throw std::out_of_range("t must lie in (0, 1]");
    return at(H, f, t, m, false, true).psi;
}

CalderonResult calderon_decompose(const HeatOperator& H, const GridFunction& f, int m, const TGrid& tgrid,
                                  const QuadratureOptions& opt) {
    check_order(H, m);
    CalderonResult r{GridFunction(f.domain()), GridFunction(f.domain()), 0.0};
    std::vector<double> w = tgrid.weights();
    if (opt.tail_correction) w.front() += 1.0 / m;
    const std::size_t last = tgrid.size() - 1;
    H.sweep(f, tgrid.nodes(), m, [&](std::size_t n, double t, std::span<const GridFunction> pw) {
        GridFunction psi;
        phi_psi(pw, t, m, nullptr, &psi);
        r.integral.axpy(w[n], psi);
        if (n == last) {
            GridFunction phi;
            phi_psi(pw, t, m, &phi, nullptr);
            r.boundary = -1.0 * phi;
        }
    });
    r.residual = relative_l2(r.integral + r.boundary - f, f);
    return r;
}

double calderon_scalar(double u, int m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(u > 0.0) || !std::isfinite(u)) throw std::invalid_argument("u must be positive");
    auto integrand = [&](double t) { return t > 0.0 ? std::pow(t * u, m) * std::exp(-t * u) / t : 0.0; };
    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 15, 1e-14, &err);
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += factorial(m - 1) / factorial(k) * std::pow(u, k) * std::exp(-u);
    return I + s;
}

std::string to_string(ParaproductVariant v) { return v == ParaproductVariant::Statement ? "statement" : "proof"; }

std::array<ParaproductResult, 2> paraproduct_decompose(const HeatOperator& H, const GridFunction& f,
                                                       const GridFunction& g, int m, const TGrid& tgrid,
                                                       const QuadratureOptions& opt) {
    require_same_domain(f, g);
    check_order(H, m);
    const auto dom = f.domain();
    std::array<ParaproductResult, 2> out;
    out[0].variant = ParaproductVariant::Statement;
    out[1].variant = ParaproductVariant::Proof;
    for (auto& r : out) r.pi_f_g = r.pi_g_f = r.pi_fg = r.corner = GridFunction(dom);

    const auto f1 = at(H, f, 1.0, m, true, false).phi;
    const auto g1 = at(H, g, 1.0, m, true, false).phi;
    const auto& nodes = tgrid.nodes();
    std::vector<double> w = tgrid.weights();
    if (opt.tail_correction) w.front() += 1.0 / m;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const double t = nodes[n];
        const auto F = at(H, f, t, m, true, true);
        const auto G = at(H, g, t, m, true, true);
        for (auto& r : out) {
            const bool proof = r.variant == ParaproductVariant::Proof;
            const GridFunction Bf = proof ? f1 - F.phi : F.phi;
            const GridFunction Bg = proof ? g1 - G.phi : G.phi;
            // A_t[X] for A_t = phi_t or phi_1 - phi_t.
            auto A = [&](const GridFunction& X) {
                GridFunction a = at(H, X, t, m, true, false).phi;
                return proof ? at(H, X, 1.0, m, true, false).phi - a : a;
            };
            r.pi_f_g.axpy(w[n], A(F.psi * Bg));
            r.pi_g_f.axpy(w[n], A(G.psi * Bf));
            r.pi_fg.axpy(w[n], at(H, Bf * Bg, t, m, false, true).psi);
        }
    }
    const GridFunction fg = f * g;
    const GridFunction corner = at(H, f1 * g1, 1.0, m, true, false).phi;
    const double scale = std::max(lp_norm(f, kInfinity) * lp_norm(g, 2.0), lp_norm(f, 2.0) * lp_norm(g, kInfinity));
    for (auto& r : out) {
        r.corner = corner;
        const GridFunction err = fg - r.pi_f_g - r.pi_g_f - r.pi_fg + r.corner;
        r.residual = relative_l2(err, fg);
        const double e = lp_norm(err, 2.0);
        r.scaled_residual = scale == 0.0 ? (e == 0.0 ? 0.0 : kInfinity) : e / scale;
    }
    return out;
}

double leibniz_ratio(const HeatOperator& H, const GridFunction& f, const GridFunction& g, const BesovParams& params,
                     const LeibnizExponents& ex, const TGrid& tgrid) {
    require_same_domain(f, g);
    params.validate();
    for (double e : {ex.p1, ex.p2, ex.p3, ex.p4}) check_exponent(e, "p_i");
    const double ip = 1.0 / params.p;
    if (std::abs(1.0 / ex.p1 + 1.0 / ex.p2 - ip) > 1e-12 || std::abs(1.0 / ex.p3 + 1.0 / ex.p4 - ip) > 1e-12)
        throw std::invalid_argument("exponents must satisfy 1/p1 + 1/p2 = 1/p3 + 1/p4 = 1/p");
    const double num = besov_norm(H, f * g, params, tgrid);
    if (num == 0.0) return 0.0;
    BesovParams b1 = params, b4 = params;
    b1.p = ex.p1;
    b4.p = ex.p4;
    const double den = besov_norm(H, f, b1, tgrid) * lp_norm(g, ex.p2) + lp_norm(f, ex.p3) * besov_norm(H, g, b4, tgrid);
    return num / den;
}

}  // namespace besov
