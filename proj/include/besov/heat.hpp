#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "besov/fields.hpp"
#include "besov/grid.hpp"
#include "besov/metric.hpp"

namespace besov {

enum class EngineKind { ClosedForm, Spectral, FiniteDifference, MonteCarlo };

std::string to_string(EngineKind k);
EngineKind engine_from_string(const std::string& s);

struct EngineSpec {
    EngineKind kind = EngineKind::Spectral;
    // Spectral: keep modes with max |k| <= cutoff; 0 keeps every mode.
    int fourier_cutoff = 0;
    // FiniteDifference: fraction of the RK4 stability limit used as the time step.
    double cfl = 0.9;
    // MonteCarlo
    int walkers = 100000;
    int steps = 256;
    std::uint64_t seed = 1;
    std::array<double, 3> histogram_bin{0.2, 0.2, 0.2};
    // Kernel tables, multipliers or walker clouds kept per t.
    std::size_t cache_capacity = 64;
};

struct KernelValue {
    double value = 0.0;
    double std_error = 0.0;  // nonzero only for Monte Carlo estimates
};

// Heat semigroup e^{-t Delta} bound to a group and grid.
class HeatOperator {
public:
    // Receives, for each requested t in increasing order, the original position of t in the
    // request and Delta^k H_t f for k = 0..max_power.
    using Visitor = std::function<void(std::size_t index, double t, std::span<const GridFunction> powers)>;

    virtual ~HeatOperator() = default;

    EngineKind kind() const noexcept { return spec_.kind; }
    const EngineSpec& spec() const noexcept { return spec_; }
    const DomainPtr& domain() const noexcept { return domain_; }
    // Largest m accepted by delta_power.
    virtual int max_delta_power() const noexcept { return kMaxFieldOrder; }

    virtual KernelValue kernel(double t, const Point& x) const;
    GridFunction apply(const GridFunction& f, double t) const;
    GridFunction delta_power(const GridFunction& f, double t, int m) const;
    GridFunction field_heat(const GridFunction& f, double t, const MultiIndex& I) const;
    virtual void sweep(const GridFunction& f, std::span<const double> ts, int max_power, const Visitor& visit) const;

protected:
    HeatOperator(DomainPtr domain, EngineSpec spec) : domain_(std::move(domain)), spec_(spec) {}
    virtual GridFunction heat(const GridFunction& f, double t) const = 0;
    void check_input(const GridFunction& f) const;
    void check_power(int m) const;

    DomainPtr domain_;
    EngineSpec spec_;
};

std::unique_ptr<HeatOperator> make_heat_operator(DomainPtr domain, const EngineSpec& spec);

// Free-function spellings of the operator methods.
KernelValue kernel_eval(const HeatOperator& H, double t, const Point& x);
GridFunction heat_apply(const HeatOperator& H, const GridFunction& f, double t);
GridFunction delta_power_heat(const HeatOperator& H, const GridFunction& f, double t, int m);
GridFunction field_heat(const HeatOperator& H, const GridFunction& f, double t, const MultiIndex& I);

// Heisenberg heat kernel of e^{t(X^2+Y^2)} from its Fourier representation in the centre variable:
// h_t(x,y,z) = (1/4 pi^2) int_0^inf cos(lambda z) lambda/sinh(lambda t) exp(-lambda r^2 coth(lambda t)/4) dlambda.
double heisenberg_kernel(double t, const Point& p);

// Euler scheme for the horizontal diffusion started at the identity (increments of variance 2 dt).
std::vector<Point> diffuse_walkers(const GroupModel& G, double t, int walkers, int steps, std::uint64_t seed);

struct GaussianBoundReport {
    double C_fit = 0.0;
    double c_fit = 0.0;
    double max_violation = 0.0;            // max of h/bound - 1 over the sample, clipped at 0
    std::vector<double> ts;
    std::vector<double> origin_ratio;      // h_t(e) V(sqrt t)
};

// Fits h_t(x) <= C V(sqrt t)^{-1} exp(-c |x|^2 / t): C is the largest value of h_t V(sqrt t) over the
// sample, c the largest exponent compatible with that C. Needs kernel access (ClosedForm or Spectral).
GaussianBoundReport gaussian_bound_check(const HeatOperator& H, std::span<const double> ts,
                                         std::span<const Point> xs, const VolumeModel& V);

struct AnalyticityEntry {
    MultiIndex I;
    double sup = 0.0;      // max over t and family of t^{|I|/2} ||X_I H_t f||_p / ||f||_p
    double argmax_t = 0.0;
};

std::vector<AnalyticityEntry> analyticity_check(const HeatOperator& H, std::span<const GridFunction> family,
                                                std::span<const MultiIndex> indices, std::span<const double> ts,
                                                double p);

}  // namespace besov
