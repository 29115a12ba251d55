#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "besov/norms.hpp"

namespace besov {

struct FamilyMember {
    std::string id;
    std::function<double(const Point&)> fn;
};

// Analytic generators, so the same family can be sampled at any resolution.
struct FunctionFamily {
    std::string id;
    std::string generator;
    std::uint64_t seed = 0;
    std::vector<FamilyMember> members;

    std::size_t size() const noexcept { return members.size(); }
    std::vector<GridFunction> sample(const DomainPtr& domain) const;

    // Periodised Gaussians on Torus(1), centre uniform, width in [0.3, 0.9].
    static FunctionFamily torus_gaussians(int count, std::uint64_t seed);
    // a_0 + sum_{k<=deg} a_k cos kx + b_k sin kx with deg uniform in [1, max_degree], coefficients in [-1,1]/k.
    static FunctionFamily torus_trig(int count, int max_degree, std::uint64_t seed);
    // Products of Gaussians in x, y, z near the identity of Heisenberg1.
    static FunctionFamily heisenberg_bumps(int count, std::uint64_t seed);
    // cos(k x) on Torus(1).
    static FunctionFamily torus_eigen(std::span<const int> ks);
    static FunctionFamily zero();
};

// Frozen suite: 10 torus Gaussians, 10 trigonometric polynomials of degree <= 8, 10 Heisenberg bumps.
std::vector<FunctionFamily> standard_suite(std::uint64_t seed = 42);

// Deterministic uniform in [0, 1) from a 64-bit generator state; independent of the standard library.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() noexcept;
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t s_;
};

// (sum_xi (1 + |xi|^2)^alpha |f^(xi)|^2)^{1/2} with Parseval normalisation, so alpha = 0 gives ||f||_2.
double fourier_oracle_norm(const GridFunction& f, const BesovParams& params);

// Closed-form value of a characterization for cos(k x) on Torus(1); the heat t-integral runs over (0, 1],
// the dyadic sums over the grid's octaves.
double torus_eigen_oracle(Characterization c, int k, const BesovParams& params, const TGrid& tgrid = TGrid());

// Characterizations of one function; Difference is ||f||_p + L with L from difference_functional.
std::vector<NormBreakdown> evaluate_characterizations(const HeatOperator& H, const GridFunction& f,
                                                      const BesovParams& params,
                                                      std::span<const Characterization> chars, const TGrid& tgrid,
                                                      const VolumeModel* V, const DifferenceOptions& diff = {});

struct RatioInterval {
    Characterization num = Characterization::Heat;
    Characterization den = Characterization::Heat;
    double min = 0.0;
    double max = 0.0;
    double geo_mean = 0.0;
    std::size_t count = 0;  // functions with both norms positive
};

struct EquivalenceRun {
    DomainPtr domain;
    TGrid tgrid = TGrid();
    std::vector<std::vector<NormBreakdown>> norms;  // [function][characterization]
    std::vector<RatioInterval> ratios;              // pairs (i, j), i < j, in characterization order
};

struct EquivalenceOptions {
    EngineSpec engine;
    TGrid tgrid = TGrid();
    DifferenceOptions difference;
    bool refine = true;  // rerun with doubled grid and doubled nodes per octave
    double drift_tolerance = 0.2;
};

struct EquivalenceReport {
    std::string family;
    BesovParams params;
    std::vector<Characterization> characterizations;
    std::vector<std::string> functions;
    EquivalenceRun base;
    std::optional<EquivalenceRun> refined;
    // Per ratio pair: largest relative move of an interval endpoint under refinement.
    std::vector<double> drift;
    std::vector<char> flagged;
    bool degenerate = false;  // no function had all norms positive

    bool stable() const;
};

// Throws std::invalid_argument for an empty set or a characterization not valid at this alpha
// (slice_l1 needs alpha > 0, difference needs alpha in (0, 1)), std::runtime_error on non-finite norms.
EquivalenceReport equivalence_report(const FunctionFamily& family, const DomainPtr& domain, const BesovParams& params,
                                     std::span<const Characterization> chars, const EquivalenceOptions& opt = {});

void validate_characterizations(std::span<const Characterization> chars, const BesovParams& params);

struct EmbeddingReport {
    std::vector<double> qs;
    std::vector<std::string> functions;
    std::vector<std::vector<double>> values;  // [function][q]
    std::size_t violations = 0;
};

// Dyadic norms along an ascending q list from one set of per-scale terms per function.
EmbeddingReport embedding_check(const FunctionFamily& family, const DomainPtr& domain, const EngineSpec& engine,
                                const BesovParams& params, std::span<const double> qs, const TGrid& tgrid = TGrid());

struct NamedScalar {
    std::string name;
    double value = 0.0;
};

struct Resolution {
    int grid = 1;   // node-count factor
    int tgrid = 1;  // nodes-per-octave factor
};

struct RefinementExperiment {
    std::string name;
    std::function<std::vector<NamedScalar>(const Resolution&)> run;
    // Grid nodes an evaluation at this resolution touches; compared against node_limit.
    std::function<std::size_t(const Resolution&)> node_count;
    std::size_t node_limit = 0;  // 0: unlimited
    bool refine_grid = true;
    bool refine_tgrid = true;
    double tolerance = 0.2;
};

struct StabilityEntry {
    std::string name;
    double base = 0.0;
    double refined = 0.0;
    double change = 0.0;  // |refined - base| / |base|, 0 when both vanish
    bool pass = false;
};

struct StabilityReport {
    std::string experiment;
    double tolerance = 0.0;
    std::vector<StabilityEntry> entries;
    bool complete = true;
    std::string note;
    bool pass() const;
};

StabilityReport refinement_stability(const RefinementExperiment& exp);

}  // namespace besov
