#include "besov/heat.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "besov/lp.hpp"
#include "besov/lru_cache.hpp"
#include "fft.hpp"

namespace besov {

namespace {

constexpr double kPi = std::numbers::pi;
// Stability interval of classical RK4 on the negative real axis.
constexpr double kRk4RealStability = 2.785;

void check_time(double t) {
    if (!(t > 0.0 && t <= 1.0)) throw std::out_of_range("kernel time must lie in (0, 1]");
}

void check_apply_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::out_of_range("heat time must be finite and nonnegative");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<std::size_t> ascending_order(std::span<const double> ts) {
    std::vector<std::size_t> order(ts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });
    return order;
}

// Fills powers[1..P] by repeated discrete sublaplacian of powers[0].
void fill_discrete_powers(std::vector<GridFunction>& powers) {
    for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = sublaplacian(powers[k - 1]);
}

// ---------------------------------------------------------------- spectral

class SpectralHeat final : public HeatOperator {
public:
    SpectralHeat(DomainPtr d, const EngineSpec& s) : HeatOperator(std::move(d), s), cache_(s.cache_capacity) {
        if (domain_->group.kind() == GroupKind::Heisenberg)
            throw std::invalid_argument("spectral engine supports Euclid and Torus models only");
        detail::RealFft fft(domain_->grid);
        k2_ = fft.wavenumber_squared(domain_->grid);
        keep_.assign(k2_.size(), 1.0);
        if (s.fourier_cutoff > 0) {
            const auto ord = fft.mode_order(domain_->grid);
            for (std::size_t i = 0; i < ord.size(); ++i) keep_[i] = ord[i] <= s.fourier_cutoff ? 1.0 : 0.0;
        }
        build_wavevectors();
    }

    int max_delta_power() const noexcept override { return 16; }

    KernelValue kernel(double t, const Point& x) const override {
        check_time(t);
        const auto mp = multiplier(t);
        const auto& m = *mp;
        const Grid& g = domain_->grid;
        double vol = 1.0;
        for (int a = 0; a < g.dim(); ++a) vol *= g.axis(a).hi - g.axis(a).lo;
        double acc = 0.0;
        for (std::size_t s = 0; s < m.size(); ++s) {
            if (m[s] == 0.0) continue;
            double phase = 0.0;
            for (int a = 0; a < g.dim(); ++a) phase += xi_[s][a] * x[a];
            acc += half_weight_[s] * m[s] * std::cos(phase);
        }
        return {acc / vol, 0.0};
    }

    void sweep(const GridFunction& f, std::span<const double> ts, int max_power, const Visitor& visit) const override {
        check_input(f);
        check_power(max_power);
        for (double t : ts) check_apply_time(t);
        detail::RealFft fft(domain_->grid);
        std::vector<std::complex<double>> spec(fft.spectrum_size()), work(fft.spectrum_size());
        fft.forward(f.values().data(), spec.data());
        std::vector<GridFunction> powers(static_cast<std::size_t>(max_power) + 1, GridFunction(domain_));
        for (std::size_t idx : ascending_order(ts)) {
            const auto mp = multiplier(ts[idx]);
            const auto& m = *mp;
            for (int k = 0; k <= max_power; ++k) {
                for (std::size_t s = 0; s < spec.size(); ++s) {
                    double w = m[s];
                    for (int j = 0; j < k; ++j) w *= k2_[s];
                    work[s] = spec[s] * w;
                }
                fft.backward(work.data(), powers[k].values().data());
            }
            visit(idx, ts[idx], powers);
        }
    }

protected:
    GridFunction heat(const GridFunction& f, double t) const override {
        GridFunction out(domain_);
        const double one[1] = {t};
        sweep(f, one, 0, [&](std::size_t, double, std::span<const GridFunction> p) { out = p[0]; });
        return out;
    }

private:
    std::shared_ptr<const std::vector<double>> multiplier(double t) const {
        return cache_.get_or_compute(t, [&] {
            std::vector<double> v(k2_.size());
            for (std::size_t s = 0; s < v.size(); ++s) v[s] = keep_[s] * std::exp(-t * k2_[s]);
            return v;
        });
    }

    void build_wavevectors() {
        const Grid& g = domain_->grid;
        const int d = g.dim();
        const int nl = g.axis(d - 1).nodes;
        const int last = nl / 2 + 1;
        xi_.resize(k2_.size());
        half_weight_.resize(k2_.size());
        for (std::size_t s = 0; s < k2_.size(); ++s) {
            std::size_t rem = s;
            for (int a = d - 1; a >= 0; --a) {
                const int len = a == d - 1 ? last : g.axis(a).nodes;
                const int i = static_cast<int>(rem % len);
                rem /= len;
                const int n = g.axis(a).nodes;
                const int k = a == d - 1 ? i : (i <= n / 2 ? i : i - n);
                xi_[s][a] = 2.0 * kPi * k / (g.axis(a).hi - g.axis(a).lo);
                if (a == d - 1) half_weight_[s] = (i == 0 || (nl % 2 == 0 && i == nl / 2)) ? 1.0 : 2.0;
            }
        }
    }

    std::vector<double> k2_, keep_, half_weight_;
    std::vector<std::array<double, 3>> xi_;
    LruCache<double, std::vector<double>> cache_;
};

// ---------------------------------------------------------------- finite difference

class FiniteDifferenceHeat final : public HeatOperator {
public:
    FiniteDifferenceHeat(DomainPtr d, const EngineSpec& s) : HeatOperator(std::move(d), s) {
        if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
        // Gershgorin-type bound on the spectral radius of sum_i X_i^2: each centred X_i has norm at
        // most sum_j max|c_ij| / h_j.
        const Grid& g = domain_->grid;
        const GroupModel& G = domain_->group;
        double rho = 0.0;
        for (int i = 1; i <= G.generators(); ++i) {
            double norm = 0.0;
            for (int j = 0; j < g.dim(); ++j) {
                double cmax = 0.0;
                for (double corner_x : {g.axis(0).lo, g.axis(0).hi})
                    for (double corner_y : {g.dim() > 1 ? g.axis(1).lo : 0.0, g.dim() > 1 ? g.axis(1).hi : 0.0}) {
                        const Point c = G.field_coefficients(i, Point{corner_x, corner_y, 0.0});
                        cmax = std::max(cmax, std::abs(c[j]));
                    }
                norm += cmax / g.axis(j).spacing();
            }
            rho += norm * norm;
        }
        dt_max_ = s.cfl * kRk4RealStability / rho;
    }

    double time_step() const noexcept { return dt_max_; }

    void sweep(const GridFunction& f, std::span<const double> ts, int max_power, const Visitor& visit) const override {
        check_input(f);
        check_power(max_power);
        for (double t : ts) check_apply_time(t);
        std::vector<GridFunction> powers(static_cast<std::size_t>(max_power) + 1);
        GridFunction u = f;
        double now = 0.0;
        for (std::size_t idx : ascending_order(ts)) {
            advance(u, ts[idx] - now);
            now = ts[idx];
            powers[0] = u;
            fill_discrete_powers(powers);
            visit(idx, ts[idx], powers);
        }
    }

protected:
    GridFunction heat(const GridFunction& f, double t) const override {
        GridFunction u = f;
        advance(u, t);
        return u;
    }

private:
    struct Workspace {
        GridFunction k1, k2, k3, k4, tmp, field, field2, scratch;
    };

    // out = sum_i X_i X_i u with zero ghosts, without allocating.
    static void rhs(const GridFunction& u, GridFunction& out, Workspace& w) {
        if (!out.same_domain(u)) out = GridFunction(u.domain());
        std::fill(out.values().begin(), out.values().end(), 0.0);
        for (int i = 1; i <= u.group().generators(); ++i) {
            apply_field_into(u, i, Boundary::ZeroGhost, w.field, w.scratch);
            apply_field_into(w.field, i, Boundary::ZeroGhost, w.field2, w.scratch);
            out += w.field2;
        }
    }

    void advance(GridFunction& u, double span) const {
        if (span <= 0.0) return;
        const long n = static_cast<long>(std::ceil(span / dt_max_ - 1e-9));
        const double h = span / static_cast<double>(n);
        Workspace w;
        w.tmp = u;
        auto& v = u.values();
        auto& tv = w.tmp.values();
        for (long s = 0; s < n; ++s) {
            rhs(u, w.k1, w);
            for (std::size_t i = 0; i < v.size(); ++i) tv[i] = v[i] + 0.5 * h * w.k1[i];
            rhs(w.tmp, w.k2, w);
            for (std::size_t i = 0; i < v.size(); ++i) tv[i] = v[i] + 0.5 * h * w.k2[i];
            rhs(w.tmp, w.k3, w);
            for (std::size_t i = 0; i < v.size(); ++i) tv[i] = v[i] + h * w.k3[i];
            rhs(w.tmp, w.k4, w);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
        }
    }

    double dt_max_ = 0.0;
};

// ---------------------------------------------------------------- closed form

double euclid_kernel(double t, const Point& x, int dim) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
    return std::pow(4.0 * kPi * t, -0.5 * dim) * std::exp(-r2 / (4.0 * t));
}

double wrapped_kernel_1d(double t, double x) {
    x = wrap_angle(x);
    double acc = 0.0;
    for (int k = -4; k <= 4; ++k) {
        const double y = x + 2.0 * kPi * k;
        acc += std::exp(-y * y / (4.0 * t));
    }
    return acc / std::sqrt(4.0 * kPi * t);
}

struct ConvolutionTable {
    std::vector<std::array<int, 3>> offsets;  // grid-index offsets (Euclid/Torus)
    std::vector<Point> shifts;                // group elements (Heisenberg)
    std::vector<double> weights;              // w h_t(y), normalised to unit sum
};

class ClosedFormHeat final : public HeatOperator {
public:
    ClosedFormHeat(DomainPtr d, const EngineSpec& s) : HeatOperator(std::move(d), s), cache_(s.cache_capacity) {}

    KernelValue kernel(double t, const Point& x) const override {
        check_time(t);
        const GroupModel& G = domain_->group;
        switch (G.kind()) {
            case GroupKind::Heisenberg: return {heisenberg_kernel(t, x), 0.0};
            case GroupKind::Torus: {
                double v = 1.0;
                for (int a = 0; a < G.dim(); ++a) v *= wrapped_kernel_1d(t, x[a]);
                return {v, 0.0};
            }
            default: return {euclid_kernel(t, x, G.dim()), 0.0};
        }
    }

protected:
    GridFunction heat(const GridFunction& f, double t) const override {
        if (t == 0.0) return f;
        if (t > 1.0) throw std::out_of_range("closed-form engine evaluates kernels for t <= 1 only");
        const auto table = cache_.get_or_compute(t, [&] { return build(t); });
        const Grid& g = domain_->grid;
        GridFunction out(domain_);
        if (domain_->group.kind() == GroupKind::Heisenberg) {
            const GroupModel& G = domain_->group;
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) {
                const Point x = g.node(static_cast<std::size_t>(i));
                double acc = 0.0;
                for (std::size_t k = 0; k < table->weights.size(); ++k)
                    acc += table->weights[k] * f.interpolate(G.mul(x, table->shifts[k]));
                out[i] = acc;
            }
            return out;
        }
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) {
            const auto ijk = g.unravel(static_cast<std::size_t>(i));
            double acc = 0.0;
            for (std::size_t k = 0; k < table->weights.size(); ++k) {
                std::size_t idx = 0;
                bool inside = true;
                for (int a = 0; a < g.dim(); ++a) {
                    const Axis& ax = g.axis(a);
                    int j = ijk[a] + table->offsets[k][a];
                    if (ax.periodic) {
                        j %= ax.nodes;
                        if (j < 0) j += ax.nodes;
                    } else if (j < 0 || j >= ax.nodes) {
                        inside = false;
                        break;
                    }
                    idx += static_cast<std::size_t>(j) * g.stride(a);
                }
                if (inside) acc += table->weights[k] * f[idx];
            }
            out[i] = acc;
        }
        return out;
    }

private:
    ConvolutionTable build(double t) const {
        const Grid& g = domain_->grid;
        const GroupModel& G = domain_->group;
        ConvolutionTable tab;
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        for (int a = 0; a < g.dim(); ++a) {
            const Axis& ax = g.axis(a);
            // the Gaussian factor exp(-r^2/4t) drops below 1e-16 past 12 sqrt(t)
            const double reach = (G.kind() == GroupKind::Heisenberg && a == 2) ? 0.5 * (ax.hi - ax.lo) : 12.0 * std::sqrt(t);
            int m = static_cast<int>(std::ceil(reach / ax.spacing()));
            if (ax.periodic) m = std::min(m, ax.nodes / 2);
            else m = std::min(m, ax.nodes - 1);
            lo[a] = -m;
            hi[a] = ax.periodic ? std::min(m, ax.nodes - 1 - ax.nodes / 2) : m;
        }
        for (int i = lo[0]; i <= hi[0]; ++i)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int k = lo[2]; k <= hi[2]; ++k) {
                    const std::array<int, 3> o{i, j, k};
                    Point y{0.0, 0.0, 0.0};
                    for (int a = 0; a < g.dim(); ++a) y[a] = o[a] * g.axis(a).spacing();
                    const double v = kernel(t, y).value;
                    if (v <= 0.0) continue;
                    tab.offsets.push_back(o);
                    tab.shifts.push_back(y);
                    tab.weights.push_back(v * g.cell_measure());
                }
        // renormalise the sampled kernel to unit discrete mass so constants stay fixed when
        // the kernel is narrower than the grid
        const double mass = std::accumulate(tab.weights.begin(), tab.weights.end(), 0.0);
        for (double& w : tab.weights) w /= mass;
        return tab;
    }

    LruCache<double, ConvolutionTable> cache_;
};

// ---------------------------------------------------------------- Monte Carlo

class MonteCarloHeat final : public HeatOperator {
public:
    MonteCarloHeat(DomainPtr d, const EngineSpec& s) : HeatOperator(std::move(d), s), cache_(s.cache_capacity) {
        if (s.walkers < 1 || s.steps < 1) throw std::invalid_argument("walker and step counts must be positive");
    }

    KernelValue kernel(double t, const Point& x) const override {
        check_time(t);
        const auto cloud = walkers(t);
        const GroupModel& G = domain_->group;
        double vol = 1.0;
        for (int a = 0; a < G.dim(); ++a) vol *= spec_.histogram_bin[a];
        std::size_t count = 0;
        for (const Point& y : *cloud) {
            bool in = true;
            for (int a = 0; a < G.dim() && in; ++a) {
                double d = y[a] - x[a];
                if (G.kind() == GroupKind::Torus) d = wrap_angle(d);
                in = std::abs(d) <= 0.5 * spec_.histogram_bin[a];
            }
            count += in;
        }
        const double n = static_cast<double>(cloud->size());
        const double p = count / n;
        return {p / vol, std::sqrt(p * (1.0 - p) / n) / vol};
    }

protected:
    GridFunction heat(const GridFunction& f, double t) const override {
        if (t == 0.0) return f;
        const auto cloud = walkers(t);
        const Grid& g = domain_->grid;
        const GroupModel& G = domain_->group;
        GridFunction out(domain_);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i) {
            const Point x = g.node(static_cast<std::size_t>(i));
            double acc = 0.0;
            for (const Point& y : *cloud) acc += f.interpolate(G.mul(x, y));
            out[i] = acc / static_cast<double>(cloud->size());
        }
        return out;
    }

private:
    std::shared_ptr<const std::vector<Point>> walkers(double t) const {
        return cache_.get_or_compute(t, [&] {
            const std::uint64_t seed = splitmix64(spec_.seed ^ std::bit_cast<std::uint64_t>(t));
            return diffuse_walkers(domain_->group, t, spec_.walkers, spec_.steps, seed);
        });
    }

    LruCache<double, std::vector<Point>> cache_;
};

}  // namespace

// ---------------------------------------------------------------- public

std::string to_string(EngineKind k) {
    switch (k) {
        case EngineKind::ClosedForm: return "closed_form";
        case EngineKind::Spectral: return "spectral";
        case EngineKind::FiniteDifference: return "finite_difference";
        case EngineKind::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

EngineKind engine_from_string(const std::string& s) {
    for (EngineKind k : {EngineKind::ClosedForm, EngineKind::Spectral, EngineKind::FiniteDifference, EngineKind::MonteCarlo})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown engine '" + s + "'");
}

KernelValue HeatOperator::kernel(double, const Point&) const {
    throw std::logic_error(to_string(kind()) + " engine has no kernel access");
}

void HeatOperator::check_input(const GridFunction& f) const {
    if (!f.domain() || !(*f.domain() == *domain_)) throw std::invalid_argument("function grid differs from the engine grid");
}

void HeatOperator::check_power(int m) const {
    if (m < 0) throw std::invalid_argument("negative power of the sublaplacian");
    if (m > max_delta_power())
        throw std::invalid_argument("power " + std::to_string(m) + " exceeds the sublaplacian budget of " +
                                    std::to_string(max_delta_power()));
}

GridFunction HeatOperator::apply(const GridFunction& f, double t) const {
    check_input(f);
    check_apply_time(t);
    if (t == 0.0) return f;
    return heat(f, t);
}

GridFunction HeatOperator::delta_power(const GridFunction& f, double t, int m) const {
    check_time(t);
    if (m < 1) throw std::invalid_argument("sublaplacian power must be at least 1");
    check_power(m);
    GridFunction out;
    const double one[1] = {t};
    sweep(f, one, m, [&](std::size_t, double, std::span<const GridFunction> p) { out = p[m]; });
    return out;
}

GridFunction HeatOperator::field_heat(const GridFunction& f, double t, const MultiIndex& I) const {
    check_time(t);
    if (static_cast<int>(I.size()) > kMaxFieldOrder) throw std::invalid_argument("multi-index exceeds the field budget of 4");
    return apply_multi_field(apply(f, t), I);
}

void HeatOperator::sweep(const GridFunction& f, std::span<const double> ts, int max_power, const Visitor& visit) const {
    check_input(f);
    check_power(max_power);
    std::vector<GridFunction> powers(static_cast<std::size_t>(max_power) + 1);
    for (std::size_t idx : ascending_order(ts)) {
        powers[0] = apply(f, ts[idx]);
        fill_discrete_powers(powers);
        visit(idx, ts[idx], powers);
    }
}

std::unique_ptr<HeatOperator> make_heat_operator(DomainPtr domain, const EngineSpec& spec) {
    if (!domain) throw std::invalid_argument("heat operator needs a domain");
    switch (spec.kind) {
        case EngineKind::Spectral: return std::make_unique<SpectralHeat>(std::move(domain), spec);
        case EngineKind::FiniteDifference: return std::make_unique<FiniteDifferenceHeat>(std::move(domain), spec);
        case EngineKind::ClosedForm: return std::make_unique<ClosedFormHeat>(std::move(domain), spec);
        case EngineKind::MonteCarlo: return std::make_unique<MonteCarloHeat>(std::move(domain), spec);
    }
    throw std::invalid_argument("unknown engine");
}

KernelValue kernel_eval(const HeatOperator& H, double t, const Point& x) { return H.kernel(t, x); }
GridFunction heat_apply(const HeatOperator& H, const GridFunction& f, double t) { return H.apply(f, t); }
GridFunction delta_power_heat(const HeatOperator& H, const GridFunction& f, double t, int m) {
    return H.delta_power(f, t, m);
}
GridFunction field_heat(const HeatOperator& H, const GridFunction& f, double t, const MultiIndex& I) {
    return H.field_heat(f, t, I);
}

double heisenberg_kernel(double t, const Point& p) {
    check_time(t);
    // reduce to t = 1 by the dilation (x, y, z) -> (x/sqrt t, y/sqrt t, z/t)
    const double r2 = (p[0] * p[0] + p[1] * p[1]) / t;
    const double z = std::abs(p[2]) / t;
    auto g = [&](double lam) {
        if (lam < 1e-8) return std::cos(lam * z) * std::exp(-0.25 * r2);
        const double damp = lam / std::sinh(lam);
        return std::cos(lam * z) * damp * std::exp(-0.25 * r2 * lam / std::tanh(lam));
    };
    // integrand is bounded by 2 lam exp(-lam (1 + r^2/4))
    const double upper = 45.0 / (1.0 + 0.25 * r2);
    const double width = std::min(1.0, 0.5 * kPi / std::max(z, 1e-300));
    const int panels = static_cast<int>(std::ceil(upper / width));
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = k * upper / panels, b = (k + 1) * upper / panels;
        acc += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, a, b, 3, 1e-13);
    }
    return acc / (4.0 * kPi * kPi * t * t);
}

std::vector<Point> diffuse_walkers(const GroupModel& G, double t, int walkers, int steps, std::uint64_t seed) {
    std::vector<Point> out(static_cast<std::size_t>(walkers), G.identity());
    if (t == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 * t / steps));
    const int k = G.generators();
    for (Point& p : out) {
        for (int s = 0; s < steps; ++s) {
            Point inc{0.0, 0.0, 0.0};
            for (int i = 0; i < k; ++i) inc[i] = normal(rng);
            p = G.mul(p, inc);
        }
    }
    return out;
}

GaussianBoundReport gaussian_bound_check(const HeatOperator& H, std::span<const double> ts, std::span<const Point> xs,
                                         const VolumeModel& V) {
    const GroupModel& G = H.domain()->group;
    GaussianBoundReport rep;
    struct Sample {
        double a, s;
    };
    std::vector<Sample> samples;
    for (double t : ts) {
        const double vol = V(std::sqrt(t));
        for (const Point& x : xs) {
            const double r = G.cc_norm(x);
            samples.push_back({H.kernel(t, x).value * vol, r * r / t});
        }
        rep.ts.push_back(t);
        rep.origin_ratio.push_back(H.kernel(t, G.identity()).value * vol);
    }
    for (const Sample& s : samples) rep.C_fit = std::max(rep.C_fit, s.a);
    rep.c_fit = kInfinity;
    for (const Sample& s : samples)
        if (s.s > 0.0 && s.a > 0.0) rep.c_fit = std::min(rep.c_fit, std::log(rep.C_fit / s.a) / s.s);
    if (!std::isfinite(rep.c_fit)) rep.c_fit = 0.0;
    for (const Sample& s : samples) {
        const double bound = rep.C_fit * std::exp(-rep.c_fit * s.s);
        rep.max_violation = std::max(rep.max_violation, s.a / bound - 1.0);
    }
    // a fitted bound is tight at its extremal samples; anything at the rounding level is not a violation
    if (rep.max_violation < 1e-12) rep.max_violation = 0.0;
    return rep;
}

std::vector<AnalyticityEntry> analyticity_check(const HeatOperator& H, std::span<const GridFunction> family,
                                                std::span<const MultiIndex> indices, std::span<const double> ts,
                                                double p) {
    std::vector<AnalyticityEntry> out;
    for (const MultiIndex& I : indices) out.push_back({I, 0.0, 0.0});
    for (const GridFunction& f : family) {
        const double base = lp_norm(f, p);
        if (base == 0.0) continue;
        H.sweep(f, ts, 0, [&](std::size_t, double t, std::span<const GridFunction> pw) {
            for (AnalyticityEntry& e : out) {
                const double v = std::pow(t, 0.5 * static_cast<double>(e.I.size())) *
                                 lp_norm(apply_multi_field(pw[0], e.I), p) / base;
                if (v > e.sup) {
                    e.sup = v;
                    e.argmax_t = t;
                }
            }
        });
    }
    return out;
}

}  // namespace besov
