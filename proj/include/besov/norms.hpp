#pragma once

#include <string>
#include <vector>

#include "besov/heat.hpp"
#include "besov/lp.hpp"
#include "besov/metric.hpp"
#include "besov/tgrid.hpp"

namespace besov {

struct BesovParams {
    double alpha = 1.0;
    double p = 2.0;
    double q = 2.0;
    int m = 1;         // power of the sublaplacian, alpha/2 < m
    double t0 = 0.0;   // low-frequency term ||H_{t0} f||_p
    int mbar = 2;      // field order in the xsup characterization, integer > alpha

    // alpha/2 < m <= alpha/2 + 1, mbar = floor(alpha) + 1, t0 = 0 for alpha > 0 and 1/2 otherwise.
    static BesovParams make(double alpha, double p, double q);
    static int default_m(double alpha);
    static int default_mbar(double alpha);
    static double default_t0(double alpha);

    // Throws std::invalid_argument on any violated constraint.
    void validate() const;
};

enum class Characterization { Heat, Dyadic, SliceL1, XSup, Difference };

std::string to_string(Characterization c);
Characterization characterization_from_string(const std::string& s);

struct ScaleTerm {
    int j = 0;            // octave, floor(log2 t) or floor(log2 |y|)
    double t = 0.0;       // t node, or the octave's left end 2^j
    double weight = 1.0;  // q-aggregation weight
    double value = 0.0;   // contribution before the q-th power
};

struct NormBreakdown {
    std::string characterization;
    BesovParams params;
    double base = 0.0;           // low-frequency term, 0 for pure functionals
    std::vector<ScaleTerm> terms;
    double total = 0.0;
    double tail_estimate = 0.0;  // size of the part of the t-integral below the grid
    // slice_l1: the per-octave norms c_n = ||int_{2^n}^{2^{n+1}} |(t Delta)^m H_t f| dt/t||_p.
    std::vector<double> debug;

    double scale_part() const;
    // base + (sum weight * value^q)^{1/q}
    double recompute_total() const;
};

// Everything the heat-based characterizations need from one pass of the semigroup over a t grid.
struct ProfileRequest {
    bool delta = true;    // ||Delta^m H_t f||_p per node
    bool slices = false;  // per-octave L^p norms of the integrated |(t Delta)^m H_t f|
    bool fields = false;  // per-node max over |I| <= mbar of ||X_I H_t f||_p
};

struct ScaleProfile {
    BesovParams params;
    TGrid tgrid;
    std::vector<double> delta_norms;
    std::vector<double> slice_norms;  // index n = j - j_min
    std::vector<double> field_sups;
    double norm_t0 = 0.0;    // ||H_{t0} f||_p
    double norm_half = 0.0;  // ||H_{1/2} f||_p
};

ScaleProfile scale_profile(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                           const TGrid& tgrid, const ProfileRequest& request);

NormBreakdown assemble_lambda(const ScaleProfile& prof);
// Heat, Dyadic, SliceL1 or XSup from a profile that carries the needed parts.
NormBreakdown assemble(Characterization c, const ScaleProfile& prof);

// (sum_nodes weight (t^{m-alpha/2} ||Delta^m H_t f||_p)^q)^{1/q}
NormBreakdown lambda_functional(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                                const TGrid& tgrid = TGrid());
// Lambda + ||H_{t0} f||_p
NormBreakdown besov_breakdown(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                              const TGrid& tgrid = TGrid());
double besov_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                  const TGrid& tgrid = TGrid());
NormBreakdown dyadic_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                          const TGrid& tgrid = TGrid());
NormBreakdown slice_l1_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                            const TGrid& tgrid = TGrid());
NormBreakdown xsup_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                        const TGrid& tgrid = TGrid());

struct DifferenceOptions {
    // Heisenberg only: spacing of the y lattice along the centre. Horizontal spacing is the grid's;
    // 0 picks h_x h_y / 2, the spacing of the lattice generated by horizontal grid steps.
    double z_spacing = 0.0;
};

// (int_{|y|<=1} (||f(.y) - f||_p / |y|^alpha)^q dy / V(|y|))^{1/q} over a y lattice without the cell
// of the identity; terms are the dyadic shells in |y|. Non-periodic axes extend f by its edge values.
NormBreakdown difference_functional(const GridFunction& f, const BesovParams& params, const VolumeModel& V,
                                    const DifferenceOptions& opt = {});

// ||f||_p + sum_i besov_norm(X_i f) with the given params.
double recursive_norm(const HeatOperator& H, const GridFunction& f, const BesovParams& params,
                      const TGrid& tgrid = TGrid());

// max over |I| <= order of ||X_I g||_p.
double field_sup(const GridFunction& g, int order, double p);

}  // namespace besov
