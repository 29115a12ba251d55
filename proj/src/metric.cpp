#include "besov/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace besov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Step {
    int a, b;
    double len;
};

std::vector<Step> horizontal_steps() {
    std::vector<Step> s;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            if ((a != 0 || b != 0) && std::gcd(std::abs(a), std::abs(b)) == 1)
                s.push_back({a, b, std::hypot(a, b)});
    return s;
}

// Largest |z| reachable by a horizontal path of length r: half-disc area over its diameter.
double max_fiber(double r) { return r * r / (2.0 * std::numbers::pi); }

}  // namespace

HeisenbergLattice::HeisenbergLattice(double h, double r_max) : h_(h), r_max_(r_max) {
    if (!(h > 0.0) || !(r_max > 0.0)) throw std::invalid_argument("lattice spacing and radius must be positive");
    R_ = static_cast<int>(std::ceil(r_max / h)) + 2;
    K_ = static_cast<int>(std::ceil(max_fiber(r_max) / (0.5 * h * h))) + 2;
    const std::size_t n = static_cast<std::size_t>(2 * R_ + 1) * (2 * R_ + 1) * (2 * K_ + 1);
    dist_.assign(n, std::numeric_limits<float>::infinity());
    std::vector<double> d(n, kInf);

    const auto steps = horizontal_steps();
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const std::size_t origin = index(0, 0, 0);
    d[origin] = 0.0;
    pq.push({0.0, origin});
    const std::size_t nk = 2 * K_ + 1;
    const std::size_t nj = 2 * R_ + 1;
    while (!pq.empty()) {
        const auto [du, u] = pq.top();
        pq.pop();
        if (du > d[u]) continue;
        const int i = static_cast<int>(u / (nj * nk)) - R_;
        const int j = static_cast<int>((u / nk) % nj) - R_;
        const int k = static_cast<int>(u % nk) - K_;
        for (const Step& s : steps) {
            const int i2 = i + s.a, j2 = j + s.b, k2 = k + (i * s.b - j * s.a);
            if (std::abs(i2) > R_ || std::abs(j2) > R_ || std::abs(k2) > K_) continue;
            const double dv = du + s.len * h_;
            if (dv > r_max_) continue;
            const std::size_t v = index(i2, j2, k2);
            if (dv < d[v]) {
                d[v] = dv;
                pq.push({dv, v});
            }
        }
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (d[q] < kInf) {
            dist_[q] = static_cast<float>(d[q]);
            sorted_.push_back(d[q]);
        }
    }
    std::sort(sorted_.begin(), sorted_.end());
}

std::size_t HeisenbergLattice::index(int i, int j, int k) const noexcept {
    const std::size_t nj = 2 * R_ + 1, nk = 2 * K_ + 1;
    return (static_cast<std::size_t>(i + R_) * nj + static_cast<std::size_t>(j + R_)) * nk + static_cast<std::size_t>(k + K_);
}

double HeisenbergLattice::distance(int i, int j, int k) const noexcept {
    if (std::abs(i) > R_ || std::abs(j) > R_ || std::abs(k) > K_) return kInf;
    const float v = dist_[index(i, j, k)];
    return std::isinf(v) ? kInf : static_cast<double>(v);
}

double HeisenbergLattice::distance(const Point& p) const noexcept {
    return distance(static_cast<int>(std::lround(p[0] / h_)), static_cast<int>(std::lround(p[1] / h_)),
                    static_cast<int>(std::lround(p[2] / (0.5 * h_ * h_))));
}

Point HeisenbergLattice::point(int i, int j, int k) const noexcept { return {i * h_, j * h_, k * 0.5 * h_ * h_}; }

double HeisenbergLattice::ball_volume(double r) const {
    if (r > r_max_) throw std::out_of_range("radius beyond the explored lattice ball");
    const auto cnt = std::upper_bound(sorted_.begin(), sorted_.end(), r) - sorted_.begin();
    return static_cast<double>(cnt) * 0.5 * h_ * h_ * h_ * h_;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> r(count);
    for (int i = 0; i < count; ++i)
        r[i] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return r;
}

namespace {

void check_window(const Domain& d, double r_max) {
    const Grid& g = d.grid;
    if (d.group.kind() == GroupKind::Torus) return;
    for (int a = 0; a < g.dim(); ++a) {
        const Axis& ax = g.axis(a);
        const double half = std::min(-ax.lo, ax.hi);
        const double need = (d.group.kind() == GroupKind::Heisenberg && a == 2) ? max_fiber(r_max) : r_max;
        if (need > half)
            throw std::out_of_range("ball of radius " + std::to_string(r_max) + " exceeds the grid window on axis " +
                                    std::to_string(a));
    }
}

// Sorted norms of sub-cell centres (m + 1/2) delta inside the ball of radius r_max.
std::vector<double> subcell_norms(const Domain& d, double r_max, int supersample) {
    const Grid& g = d.grid;
    const int dim = g.dim();
    std::array<double, 3> delta{};
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < dim; ++a) {
        const Axis& ax = g.axis(a);
        delta[a] = ax.spacing() / supersample;
        int m = static_cast<int>(std::ceil(r_max / delta[a])) + 1;
        if (ax.periodic) m = std::min(m, ax.nodes * supersample / 2);
        lo[a] = -m;
        hi[a] = m - 1;
    }
    std::vector<double> out;
    Point p{0.0, 0.0, 0.0};
    for (int i = lo[0]; i <= hi[0]; ++i) {
        p[0] = (i + 0.5) * delta[0];
        for (int j = dim > 1 ? lo[1] : 0; j <= (dim > 1 ? hi[1] : 0); ++j) {
            if (dim > 1) p[1] = (j + 0.5) * delta[1];
            for (int k = dim > 2 ? lo[2] : 0; k <= (dim > 2 ? hi[2] : 0); ++k) {
                if (dim > 2) p[2] = (k + 0.5) * delta[2];
                const double r = d.group.cc_norm(p);
                if (r <= r_max) out.push_back(r);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> gauge_lattice_norms(double h, double r_max) {
    const int R = static_cast<int>(std::ceil(r_max / h));
    const double hz = 0.5 * h * h;
    const int K = static_cast<int>(std::ceil(max_fiber(r_max) / hz)) + 1;
    const GroupModel G = GroupModel::heisenberg();
    std::vector<double> out;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j)
            for (int k = -K; k <= K; ++k) {
                const double r = G.cc_norm(Point{i * h, j * h, k * hz});
                if (r <= r_max) out.push_back(r);
            }
    std::sort(out.begin(), out.end());
    return out;
}

void fit_power_law(VolumeTable& t) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.radii.size(); ++i)
        if (t.radii[i] <= 1.0 + 1e-12 && t.volumes[i] > 0.0) {
            x.push_back(std::log(t.radii[i]));
            y.push_back(std::log(t.volumes[i]));
        }
    const std::size_t n = x.size();
    if (n < 2) return;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    t.d_fit = sxx > 0.0 ? sxy / sxx : 0.0;
    t.log_c_fit = my - t.d_fit * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (t.log_c_fit + t.d_fit * x[i]);
        ss += e * e;
    }
    t.rms_residual = std::sqrt(ss / n);
}

}  // namespace

VolumeTable ball_volume_fit(const Domain& domain, std::span<const double> radii, const VolumeOptions& opt) {
    VolumeTable t;
    if (radii.empty()) return t;
    for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("radii must be positive");
        if (r > 1.0 && domain.group.kind() != GroupKind::Torus)
            throw std::out_of_range("radii above 1 are only meaningful on the torus");
    }
    const double r_max = *std::max_element(radii.begin(), radii.end());
    check_window(domain, r_max);

    std::vector<double> norms;
    double cell = 0.0;
    std::unique_ptr<HeisenbergLattice> lattice;
    if (domain.group.kind() == GroupKind::Heisenberg) {
        const double h = opt.lattice_spacing;
        if (opt.metric == BallMetric::Dijkstra) {
            lattice = std::make_unique<HeisenbergLattice>(h, r_max);
        } else {
            norms = gauge_lattice_norms(h, r_max);
        }
        cell = 0.5 * h * h * h * h;
    } else {
        int s = opt.supersample;
        if (s <= 0) s = domain.grid.dim() == 1 ? 256 : domain.grid.dim() == 2 ? 16 : 4;
        norms = subcell_norms(domain, r_max, s);
        cell = domain.grid.cell_measure() / std::pow(static_cast<double>(s), domain.grid.dim());
    }
    for (double r : radii) {
        t.radii.push_back(r);
        if (lattice) {
            t.volumes.push_back(lattice->ball_volume(r));
        } else {
            const auto cnt = std::upper_bound(norms.begin(), norms.end(), r) - norms.begin();
            t.volumes.push_back(static_cast<double>(cnt) * cell);
        }
    }
    fit_power_law(t);
    return t;
}

VolumeModel::VolumeModel(VolumeTable table) : table_(std::move(table)) {
    for (std::size_t i = 0; i < table_.radii.size(); ++i) {
        if (table_.volumes[i] <= 0.0) continue;
        log_r_.push_back(std::log(table_.radii[i]));
        log_v_.push_back(std::log(table_.volumes[i]));
    }
    if (log_r_.size() < 2) throw std::invalid_argument("volume table needs two positive entries");
}

double VolumeModel::operator()(double r) const {
    const double lr = std::log(r);
    const double d = table_.d_fit;
    if (lr <= log_r_.front()) return std::exp(log_v_.front() + d * (lr - log_r_.front()));
    if (lr >= log_r_.back()) return std::exp(log_v_.back() + d * (lr - log_r_.back()));
    const auto it = std::upper_bound(log_r_.begin(), log_r_.end(), lr);
    const std::size_t i = static_cast<std::size_t>(it - log_r_.begin());
    const double s = (lr - log_r_[i - 1]) / (log_r_[i] - log_r_[i - 1]);
    return std::exp(log_v_[i - 1] + s * (log_v_[i] - log_v_[i - 1]));
}

VolumeModel default_volume_model(const Domain& domain) {
    double lo = 1.0;
    for (int a = 0; a < domain.grid.dim(); ++a) lo = std::min(lo, domain.grid.axis(a).spacing());
    VolumeOptions opt;
    if (domain.group.kind() == GroupKind::Heisenberg) lo = 4.0 * opt.lattice_spacing;
    const auto radii = log_spaced(std::min(lo, 0.5), 1.0, 48);
    return VolumeModel(ball_volume_fit(domain, radii, opt));
}

}  // namespace besov
