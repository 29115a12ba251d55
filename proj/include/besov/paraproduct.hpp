#pragma once

#include <array>
#include <string>

#include "besov/norms.hpp"

namespace besov {

// phi_t = -sum_{k<m} (t Delta)^k H_t / k!
GridFunction phi_apply(const HeatOperator& H, const GridFunction& f, double t, int m);
// psi_t = (t Delta)^m H_t / (m-1)!, so that t d/dt phi_t = psi_t.
GridFunction psi_apply(const HeatOperator& H, const GridFunction& f, double t, int m);

struct QuadratureOptions {
    // Every integrand here behaves like c t^m as t -> 0, so the part of int_0^1 . dt/t below the grid
    // is taken as (1/m) times the integrand at t_min.
    bool tail_correction = true;
};

struct CalderonResult {
    GridFunction integral;  // (1/(m-1)!) int_0^1 (t Delta)^m H_t f dt/t
    GridFunction boundary;  // sum_{k<m} Delta^k H_1 f / k!  (= -phi_1 f)
    double residual = 0.0;  // ||integral + boundary - f||_2 / ||f||_2, 0 for f = 0
};

CalderonResult calderon_decompose(const HeatOperator& H, const GridFunction& f, int m, const TGrid& tgrid = TGrid(),
                                  const QuadratureOptions& opt = {});

// int_0^1 (t u)^m e^{-t u} dt/t + sum_{k<m} ((m-1)!/k!) u^k e^{-u} by adaptive Gauss-Kronrod; equals (m-1)!.
double calderon_scalar(double u, int m);

enum class ParaproductVariant {
    Statement,  // A_t = B_t = phi_t
    Proof,      // A_t = B_t = phi_1 - phi_t
};

std::string to_string(ParaproductVariant v);

struct ParaproductResult {
    ParaproductVariant variant = ParaproductVariant::Statement;
    GridFunction pi_f_g;  // int A_t[psi_t f . B_t g] dt/t
    GridFunction pi_g_f;  // int A_t[psi_t g . B_t f] dt/t
    GridFunction pi_fg;   // int psi_t[B_t f . B_t g] dt/t
    GridFunction corner;  // phi_1[phi_1 f . phi_1 g]
    // ||fg - pi_f_g - pi_g_f - pi_fg + corner||_2 / ||fg||_2, 0 for fg = 0
    double residual = 0.0;
    // Same error over max(||f||_inf ||g||_2, ||f||_2 ||g||_inf). The quadrature error scales with the
    // factors, so this stays meaningful when f and g barely overlap and fg is tiny.
    double scaled_residual = 0.0;
};

// Both variants from one pass over the t grid.
std::array<ParaproductResult, 2> paraproduct_decompose(const HeatOperator& H, const GridFunction& f,
                                                       const GridFunction& g, int m, const TGrid& tgrid = TGrid(),
                                                       const QuadratureOptions& opt = {});

// Exponents with 1/p1 + 1/p2 = 1/p3 + 1/p4 = 1/p, p taken from the Besov params.
struct LeibnizExponents {
    double p1 = 2.0, p2 = kInfinity, p3 = kInfinity, p4 = 2.0;
};

// ||fg||_B / (||f||_{B,p1} ||g||_{p2} + ||f||_{p3} ||g||_{B,p4}); 0 when f g = 0.
double leibniz_ratio(const HeatOperator& H, const GridFunction& f, const GridFunction& g, const BesovParams& params,
                     const LeibnizExponents& ex = {}, const TGrid& tgrid = TGrid());

}  // namespace besov
