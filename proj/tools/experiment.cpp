#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "besov/lemmas.hpp"
#include "besov/paraproduct.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace besov::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- config parsing

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double number(const json& obj, const std::string& key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

long integer(const json& obj, const std::string& key, const std::string& where, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return v.get<long>();
}

std::string text(const json& obj, const std::string& key, const std::string& where, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

// A number or the string "inf".
double exponent(const json& v, const std::string& where) {
    if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
    if (!v.is_number()) throw ConfigError(where + ": expected a number or \"inf\"");
    return v.get<double>();
}

json exponent_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

GroupModel parse_group(const json& g) {
    check_keys(g, {"model", "dim"}, "group");
    const std::string model = text(g, "model", "group", "torus");
    if (model != "torus" && g.contains("dim")) throw ConfigError("group.dim: only the torus model takes a dimension");
    if (model == "torus") {
        const long dim = integer(g, "dim", "group", 1);
        if (dim < 1 || dim > 3) throw ConfigError("group.dim: must be 1, 2 or 3");
        return GroupModel::torus(static_cast<int>(dim));
    }
    if (model == "euclid_line") return GroupModel::euclid_line();
    if (model == "euclid_plane") return GroupModel::euclid_plane();
    if (model == "heisenberg") return GroupModel::heisenberg();
    throw ConfigError("group.model: unknown model '" + model + "'");
}

EngineSpec parse_engine(const json& e) {
    check_keys(e, {"kind", "cfl", "fourier_cutoff", "walkers", "steps", "seed"}, "engine");
    EngineSpec s;
    try {
        s.kind = engine_from_string(text(e, "kind", "engine", "spectral"));
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("engine.kind: ") + err.what());
    }
    s.cfl = number(e, "cfl", "engine", s.cfl);
    s.fourier_cutoff = static_cast<int>(integer(e, "fourier_cutoff", "engine", s.fourier_cutoff));
    s.walkers = static_cast<int>(integer(e, "walkers", "engine", s.walkers));
    s.steps = static_cast<int>(integer(e, "steps", "engine", s.steps));
    s.seed = static_cast<std::uint64_t>(integer(e, "seed", "engine", static_cast<long>(s.seed)));
    return s;
}

BesovParams parse_params(const json& p, const std::string& where) {
    check_keys(p, {"alpha", "p", "q", "m", "t0", "mbar"}, where);
    if (!p.contains("alpha")) throw ConfigError(where + ": alpha is required");
    const double alpha = number(p, "alpha", where, 0.0);
    const double pe = p.contains("p") ? exponent(p.at("p"), where + ".p") : 2.0;
    const double qe = p.contains("q") ? exponent(p.at("q"), where + ".q") : 2.0;
    BesovParams b;
    try {
        b = BesovParams::make(alpha, pe, qe);
        b.m = static_cast<int>(integer(p, "m", where, b.m));
        b.t0 = number(p, "t0", where, b.t0);
        b.mbar = static_cast<int>(integer(p, "mbar", where, b.mbar));
        b.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(where + ": " + err.what());
    }
    return b;
}

json params_json(const BesovParams& b) {
    return {{"alpha", b.alpha}, {"p", exponent_json(b.p)}, {"q", exponent_json(b.q)},
            {"m", b.m},         {"t0", b.t0},               {"mbar", b.mbar}};
}

std::size_t node_count(const ExperimentConfig& cfg, int factor) {
    std::size_t n = 1;
    for (int a = 0; a < cfg.group.dim(); ++a) n *= static_cast<std::size_t>(cfg.nodes[a]) * factor;
    return n;
}

void check_limits(const ExperimentConfig& cfg, int factor) {
    if (cfg.max_nodes == 0) return;
    const std::size_t n = node_count(cfg, factor);
    if (n > cfg.max_nodes)
        throw ResourceLimitError("grid needs " + std::to_string(n) + " nodes, limits.max_nodes is " +
                                 std::to_string(cfg.max_nodes));
}

DomainPtr base_domain(const ExperimentConfig& cfg) { return default_domain(cfg.group, cfg.nodes); }

double semigroup_tolerance(const ExperimentConfig& cfg) {
    if (cfg.tolerances.semigroup > 0.0) return cfg.tolerances.semigroup;
    const auto k = cfg.engine.kind;
    return (k == EngineKind::Spectral || k == EngineKind::ClosedForm) ? 1e-6 : 1e-3;
}

double mass_tolerance(const ExperimentConfig& cfg) {
    if (cfg.tolerances.mass > 0.0) return cfg.tolerances.mass;
    return cfg.engine.kind == EngineKind::Spectral ? 1e-10 : 5e-3;
}

double contraction_tolerance(const ExperimentConfig& cfg) {
    if (cfg.tolerances.contraction > 0.0) return cfg.tolerances.contraction;
    const auto k = cfg.engine.kind;
    return (k == EngineKind::Spectral || k == EngineKind::ClosedForm) ? 1e-9 : 1e-3;
}

// ---------------------------------------------------------------- formatting

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fixed(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void merge(Report& into, Report&& from) {
    for (auto& r : from.norms) into.norms.push_back(std::move(r));
    for (auto& e : from.equivalence) into.equivalence.push_back(std::move(e));
    for (auto& e : from.embedding) into.embedding.push_back(std::move(e));
    for (auto& a : from.algebra) into.algebra.push_back(std::move(a));
    for (auto& h : from.heat) into.heat.push_back(std::move(h));
    for (auto& f : from.failures) into.failures.push_back(std::move(f));
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig parse_config(const json& doc) {
    check_keys(doc, {"schema_version", "group", "grid", "engine", "params", "tgrid", "family", "characterizations",
                     "output_dir", "seed", "tolerances", "algebra", "embedding", "refine", "limits"},
               "config");
    if (!doc.contains("schema_version")) throw ConfigError("config: schema_version is required");
    if (integer(doc, "schema_version", "config", 0) != kSchemaVersion)
        throw ConfigError("config.schema_version: expected " + std::to_string(kSchemaVersion));

    ExperimentConfig cfg;
    cfg.source = doc;
    if (doc.contains("group")) cfg.group = parse_group(doc.at("group"));

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        check_keys(g, {"nodes"}, "grid");
        if (g.contains("nodes")) {
            const json& n = g.at("nodes");
            if (!n.is_array() || static_cast<int>(n.size()) != cfg.group.dim())
                throw ConfigError("grid.nodes: expected " + std::to_string(cfg.group.dim()) + " node counts");
            cfg.nodes = {0, 0, 0};
            for (std::size_t a = 0; a < n.size(); ++a) {
                if (!n[a].is_number_integer()) throw ConfigError("grid.nodes: expected integers");
                cfg.nodes[a] = n[a].get<int>();
            }
        }
    } else {
        cfg.nodes = {0, 0, 0};
        for (int a = 0; a < cfg.group.dim(); ++a) cfg.nodes[a] = cfg.group.kind() == GroupKind::Heisenberg ? 32 : 128;
        if (cfg.group.kind() == GroupKind::Heisenberg) cfg.nodes[2] = 24;
    }
    try {
        base_domain(cfg);
    } catch (const std::exception& err) {
        throw ConfigError(std::string("grid: ") + err.what());
    }

    if (doc.contains("engine")) cfg.engine = parse_engine(doc.at("engine"));
    if (cfg.group.kind() == GroupKind::Heisenberg && !doc.contains("engine"))
        cfg.engine.kind = EngineKind::FiniteDifference;
    try {
        make_heat_operator(base_domain(cfg), cfg.engine);
    } catch (const std::exception& err) {
        throw ConfigError(std::string("engine: ") + err.what());
    }

    if (!doc.contains("params")) throw ConfigError("config: params is required");
    const json& ps = doc.at("params");
    if (!ps.is_array() || ps.empty()) throw ConfigError("params: expected a non-empty list");
    for (std::size_t i = 0; i < ps.size(); ++i) cfg.params.push_back(parse_params(ps[i], "params[" + std::to_string(i) + "]"));

    if (doc.contains("tgrid")) {
        const json& t = doc.at("tgrid");
        check_keys(t, {"j_min", "per_octave"}, "tgrid");
        try {
            cfg.tgrid = TGrid(static_cast<int>(integer(t, "j_min", "tgrid", -16)), static_cast<int>(integer(t, "per_octave", "tgrid", 8)));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("tgrid: ") + err.what());
        }
    }

    if (doc.contains("family")) {
        const json& f = doc.at("family");
        check_keys(f, {"kind", "count", "max_degree", "ks"}, "family");
        cfg.family.kind = text(f, "kind", "family", cfg.family.kind);
        cfg.family.count = static_cast<int>(integer(f, "count", "family", cfg.family.count));
        cfg.family.max_degree = static_cast<int>(integer(f, "max_degree", "family", cfg.family.max_degree));
        if (f.contains("ks")) {
            const json& ks = f.at("ks");
            if (!ks.is_array()) throw ConfigError("family.ks: expected a list of integers");
            cfg.family.ks.clear();
            for (const auto& k : ks) {
                if (!k.is_number_integer() || k.get<int>() < 0) throw ConfigError("family.ks: expected non-negative integers");
                cfg.family.ks.push_back(k.get<int>());
            }
        }
        if (cfg.family.count < 0) throw ConfigError("family.count: must be >= 0");
        if (cfg.family.max_degree < 1) throw ConfigError("family.max_degree: must be >= 1");
    }
    const std::string& fk = cfg.family.kind;
    const bool torus = cfg.group.kind() == GroupKind::Torus;
    const bool heis = cfg.group.kind() == GroupKind::Heisenberg;
    if (fk == "torus_gaussians" || fk == "torus_trig" || fk == "torus_eigen") {
        if (!torus) throw ConfigError("family.kind: " + fk + " needs the torus model");
    } else if (fk == "heisenberg_bumps") {
        if (!heis) throw ConfigError("family.kind: heisenberg_bumps needs the heisenberg model");
    } else if (fk == "standard") {
        if (!torus && !heis) throw ConfigError("family.kind: the standard suite lives on the torus and heisenberg models");
    } else if (fk != "zero") {
        throw ConfigError("family.kind: unknown family '" + fk + "'");
    }

    if (!doc.contains("characterizations")) throw ConfigError("config: characterizations is required");
    const json& cs = doc.at("characterizations");
    if (!cs.is_array()) throw ConfigError("characterizations: expected a list");
    for (const auto& c : cs) {
        if (!c.is_string()) throw ConfigError("characterizations: expected names");
        try {
            cfg.characterizations.push_back(characterization_from_string(c.get<std::string>()));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("characterizations: ") + err.what());
        }
    }
    for (std::size_t i = 0; i < cfg.params.size(); ++i) {
        try {
            validate_characterizations(cfg.characterizations, cfg.params[i]);
        } catch (const std::invalid_argument& err) {
            throw ConfigError("characterizations (params[" + std::to_string(i) + "]): " + err.what());
        }
    }

    cfg.output_dir = text(doc, "output_dir", "config", cfg.output_dir.string());
    const long seed = integer(doc, "seed", "config", 42);
    if (seed < 0) throw ConfigError("config.seed: must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);

    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        check_keys(t, {"drift", "calderon", "paraproduct", "semigroup", "mass", "contraction"}, "tolerances");
        auto& tol = cfg.tolerances;
        tol.drift = number(t, "drift", "tolerances", tol.drift);
        tol.calderon = number(t, "calderon", "tolerances", tol.calderon);
        tol.paraproduct = number(t, "paraproduct", "tolerances", tol.paraproduct);
        tol.semigroup = number(t, "semigroup", "tolerances", tol.semigroup);
        tol.mass = number(t, "mass", "tolerances", tol.mass);
        tol.contraction = number(t, "contraction", "tolerances", tol.contraction);
        for (double v : {tol.drift, tol.calderon, tol.paraproduct, tol.semigroup, tol.mass, tol.contraction})
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("tolerances: values must be finite and >= 0");
    }

    if (doc.contains("algebra")) {
        const json& a = doc.at("algebra");
        check_keys(a, {"m", "lemma_trials"}, "algebra");
        if (a.contains("m")) {
            const json& ms = a.at("m");
            if (!ms.is_array() || ms.empty()) throw ConfigError("algebra.m: expected a non-empty list");
            cfg.algebra.m.clear();
            for (const auto& m : ms) {
                if (!m.is_number_integer() || m.get<int>() < 1) throw ConfigError("algebra.m: expected integers >= 1");
                cfg.algebra.m.push_back(m.get<int>());
            }
        }
        cfg.algebra.lemma_trials = static_cast<int>(integer(a, "lemma_trials", "algebra", cfg.algebra.lemma_trials));
        if (cfg.algebra.lemma_trials < 0) throw ConfigError("algebra.lemma_trials: must be >= 0");
    }

    if (doc.contains("embedding")) {
        const json& e = doc.at("embedding");
        check_keys(e, {"qs"}, "embedding");
        if (e.contains("qs")) {
            const json& qs = e.at("qs");
            if (!qs.is_array() || qs.empty()) throw ConfigError("embedding.qs: expected a non-empty list");
            cfg.embedding_qs.clear();
            for (const auto& q : qs) cfg.embedding_qs.push_back(exponent(q, "embedding.qs"));
            if (!std::is_sorted(cfg.embedding_qs.begin(), cfg.embedding_qs.end()))
                throw ConfigError("embedding.qs: must be ascending");
            for (double q : cfg.embedding_qs)
                if (!(q >= 1.0)) throw ConfigError("embedding.qs: exponents must be >= 1");
        }
    }

    if (doc.contains("refine")) {
        if (!doc.at("refine").is_boolean()) throw ConfigError("config.refine: expected true or false");
        cfg.refine = doc.at("refine").get<bool>();
    }

    if (doc.contains("limits")) {
        const json& l = doc.at("limits");
        check_keys(l, {"max_nodes"}, "limits");
        const long n = integer(l, "max_nodes", "limits", 0);
        if (n < 0) throw ConfigError("limits.max_nodes: must be >= 0");
        cfg.max_nodes = static_cast<std::size_t>(n);
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
    return parse_config(doc);
}

FunctionFamily make_family(const ExperimentConfig& cfg) {
    const auto& f = cfg.family;
    if (f.kind == "torus_gaussians") return FunctionFamily::torus_gaussians(f.count, cfg.seed);
    if (f.kind == "torus_trig") return FunctionFamily::torus_trig(f.count, f.max_degree, cfg.seed);
    if (f.kind == "heisenberg_bumps") return FunctionFamily::heisenberg_bumps(f.count, cfg.seed);
    if (f.kind == "torus_eigen") return FunctionFamily::torus_eigen(f.ks);
    if (f.kind == "zero") return FunctionFamily::zero();
    // standard: the members of the frozen suite that live on the configured group
    const auto suite = standard_suite(cfg.seed);
    FunctionFamily out{"standard", "standard suite", cfg.seed, {}};
    for (const auto& fam : suite) {
        const bool heis = fam.id == "heisenberg_bumps";
        if (heis != (cfg.group.kind() == GroupKind::Heisenberg)) continue;
        for (const auto& m : fam.members) out.members.push_back(m);
    }
    return out;
}

// ---------------------------------------------------------------- runners

Report run_norms(const ExperimentConfig& cfg) {
    check_limits(cfg, 1);
    Report rep;
    const auto domain = base_domain(cfg);
    const auto H = make_heat_operator(domain, cfg.engine);
    const auto fam = make_family(cfg);
    std::optional<VolumeModel> V;
    if (std::find(cfg.characterizations.begin(), cfg.characterizations.end(), Characterization::Difference) !=
        cfg.characterizations.end())
        V = default_volume_model(*domain);
    for (const auto& params : cfg.params)
        for (const auto& member : fam.members) {
            const auto f = GridFunction::sample(domain, member.fn);
            auto norms = evaluate_characterizations(*H, f, params, cfg.characterizations, cfg.tgrid, V ? &*V : nullptr);
            for (std::size_t c = 0; c < norms.size(); ++c) {
                if (!std::isfinite(norms[c].total))
                    throw std::runtime_error("non-finite " + to_string(cfg.characterizations[c]) + " norm for " + member.id);
                rep.norms.push_back({member.id, cfg.characterizations[c], params, std::move(norms[c])});
            }
        }
    return rep;
}

Report run_equivalence(const ExperimentConfig& cfg) {
    check_limits(cfg, cfg.refine ? 2 : 1);
    Report rep;
    const auto domain = base_domain(cfg);
    const auto fam = make_family(cfg);
    EquivalenceOptions opt;
    opt.engine = cfg.engine;
    opt.tgrid = cfg.tgrid;
    opt.refine = cfg.refine;
    opt.drift_tolerance = cfg.tolerances.drift;
    for (const auto& params : cfg.params) {
        auto eq = equivalence_report(fam, domain, params, cfg.characterizations, opt);
        for (std::size_t f = 0; f < eq.functions.size(); ++f)
            for (std::size_t c = 0; c < eq.characterizations.size(); ++c)
                rep.norms.push_back({eq.functions[f], eq.characterizations[c], params, eq.base.norms[f][c]});
        rep.equivalence.emplace_back(params, std::move(eq));

        auto emb = embedding_check(fam, domain, cfg.engine, params, cfg.embedding_qs, cfg.tgrid);
        if (emb.violations > 0)
            rep.failures.push_back({"embedding_monotonicity", std::to_string(emb.violations) +
                                                                  " increases of the dyadic norm along ascending q at alpha = " +
                                                                  fmt(params.alpha)});
        rep.embedding.push_back(std::move(emb));
    }
    return rep;
}

Report run_algebra(const ExperimentConfig& cfg) {
    check_limits(cfg, 1);
    Report rep;
    const auto domain = base_domain(cfg);
    const auto H = make_heat_operator(domain, cfg.engine);
    const auto fam = make_family(cfg);
    const auto fs_ = fam.sample(domain);
    const double tol_c = cfg.tolerances.calderon, tol_p = cfg.tolerances.paraproduct;

    for (int m : cfg.algebra.m) {
        if (m > H->max_delta_power())
            throw std::invalid_argument("algebra.m: " + std::to_string(m) + " exceeds the engine's power budget");
        for (std::size_t i = 0; i < fs_.size(); ++i) {
            const double r = calderon_decompose(*H, fs_[i], m, cfg.tgrid).residual;
            rep.algebra.push_back({{"experiment", "calderon"}, {"function", fam.members[i].id}, {"variant", ""}, {"m", m}, {"value", r}});
            if (!(r <= tol_c))
                rep.failures.push_back({"calderon_residual", fam.members[i].id + " m = " + std::to_string(m) + ": " + fmt(r) +
                                                                 " > " + fmt(tol_c)});
        }
        for (std::size_t i = 0; i < fs_.size(); ++i) {
            const std::size_t j = (i + 1) % fs_.size();
            const std::string pair = fam.members[i].id + "*" + fam.members[j].id;
            const auto res = paraproduct_decompose(*H, fs_[i], fs_[j], m, cfg.tgrid);
            for (const auto& r : res) {
                rep.algebra.push_back({{"experiment", "paraproduct"}, {"function", pair}, {"variant", to_string(r.variant)},
                                       {"m", m}, {"value", r.scaled_residual}});
                rep.algebra.push_back({{"experiment", "paraproduct_relative_to_fg"}, {"function", pair},
                                       {"variant", to_string(r.variant)}, {"m", m}, {"value", r.residual}});
                if (r.variant == ParaproductVariant::Statement && !(r.scaled_residual <= tol_p))
                    rep.failures.push_back({"paraproduct_residual", pair + " m = " + std::to_string(m) + ": " +
                                                                        fmt(r.scaled_residual) + " > " + fmt(tol_p)});
            }
        }
    }

    const BesovParams& lp = cfg.params.front();
    for (std::size_t i = 0; i < fs_.size(); ++i) {
        const std::size_t j = (i + 1) % fs_.size();
        const std::string pair = fam.members[i].id + "*" + fam.members[j].id;
        const double r = leibniz_ratio(*H, fs_[i], fs_[j], lp, {}, cfg.tgrid);
        rep.algebra.push_back({{"experiment", "leibniz"}, {"function", pair}, {"variant", ""}, {"m", lp.m}, {"value", r}});
        if (!std::isfinite(r)) rep.failures.push_back({"leibniz_finite", pair + ": ratio is not finite"});
    }

    // Random instances of the two discrete inequalities.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::size_t schur_bad = 0, dyadic_bad = 0;
    double schur_worst = 0.0, dyadic_worst = 0.0;
    const std::array<std::array<double, 3>, 3> triples{{{1.0, 2.0, 2.0}, {0.5, 1.0, 1.0}, {1.0, 3.0, kInfinity}}};
    for (int trial = 0; trial < cfg.algebra.lemma_trials; ++trial) {
        TabulatedKernel K;
        K.rows = 2 + static_cast<std::size_t>(U(rng) * 12);
        K.cols = 2 + static_cast<std::size_t>(U(rng) * 12);
        for (std::size_t k = 0; k < K.rows * K.cols; ++k) K.values.push_back(U(rng));
        for (std::size_t r = 0; r < K.rows; ++r) K.row_weights.push_back(0.1 + U(rng));
        for (std::size_t c = 0; c < K.cols; ++c) K.col_weights.push_back(0.1 + U(rng));
        std::vector<double> f(K.cols);
        for (auto& v : f) v = U(rng);
        const double q = 1.0 + 3.0 * U(rng);
        const auto s = schur_bound(K, q, f);
        schur_worst = std::max(schur_worst, s.lhs / s.bound);
        if (s.lhs > s.bound * (1.0 + 1e-12)) ++schur_bad;

        const auto& t = triples[static_cast<std::size_t>(trial) % triples.size()];
        const int a = -20 + static_cast<int>(U(rng) * 10), b = a + 1 + static_cast<int>(U(rng) * 15);
        std::vector<double> c(static_cast<std::size_t>(b - a + 1));
        for (auto& v : c) v = U(rng) < 0.3 ? 0.0 : U(rng);
        const auto d = dyadic_convolution_bound(a, b, t[0], t[1], t[2], c);
        if (d.sums.rhs > 0.0) dyadic_worst = std::max(dyadic_worst, d.sums.lhs / (d.constant * d.sums.rhs));
        if (!d.holds) ++dyadic_bad;
    }
    if (cfg.algebra.lemma_trials > 0) {
        rep.algebra.push_back({{"experiment", "schur"}, {"function", ""}, {"variant", ""}, {"m", 0}, {"value", schur_worst}});
        rep.algebra.push_back({{"experiment", "dyadic_convolution"}, {"function", ""}, {"variant", ""}, {"m", 0}, {"value", dyadic_worst}});
    }
    if (schur_bad) rep.failures.push_back({"schur_inequality", std::to_string(schur_bad) + " violating instances"});
    if (dyadic_bad) rep.failures.push_back({"dyadic_convolution_inequality", std::to_string(dyadic_bad) + " violating instances"});
    return rep;
}

Report run_heat_check(const ExperimentConfig& cfg) {
    check_limits(cfg, 1);
    Report rep;
    const auto domain = base_domain(cfg);
    const auto H = make_heat_operator(domain, cfg.engine);
    const auto fam = make_family(cfg);
    const double s = 0.05, t = 0.1;
    const double tol_sg = semigroup_tolerance(cfg), tol_m = mass_tolerance(cfg), tol_c = contraction_tolerance(cfg);
    auto record = [&](const std::string& check, const std::string& fn, double value, double tol) {
        const bool pass = value <= tol;
        rep.heat.push_back({{"check", check}, {"function", fn}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
        if (!pass) rep.failures.push_back({check, fn + ": " + fmt(value) + " > " + fmt(tol)});
    };
    for (const auto& member : fam.members) {
        const auto f = GridFunction::sample(domain, member.fn);
        const double n2 = lp_norm(f, 2.0);
        const auto hst = H->apply(H->apply(f, t), s);
        const auto hsum = H->apply(f, s + t);
        record("semigroup_law", member.id, n2 > 0.0 ? lp_norm(hst - hsum, 2.0) / n2 : lp_norm(hst - hsum, 2.0), tol_sg);
        // Mass drift relative to the full-grid L^1 norm, so sign-changing members are measured too.
        GridFunction absf = f;
        for (auto& v : absf.values()) v = std::abs(v);
        const double l1 = integrate(absf), drift = std::abs(integrate(hsum) - integrate(f));
        record("mass_conservation", member.id, l1 > 0.0 ? drift / l1 : drift, tol_m);
        for (double p : {1.0, 2.0, kInfinity}) {
            const double before = lp_norm(f, p), after = lp_norm(hsum, p);
            const double excess = before > 0.0 ? std::max(0.0, after / before - 1.0) : after;
            record(std::string("contraction_p") + (std::isinf(p) ? "inf" : fmt(p)), member.id, excess, tol_c);
        }
    }
    return rep;
}

Report run_full(const ExperimentConfig& cfg) {
    Report rep = run_equivalence(cfg);
    merge(rep, run_algebra(cfg));
    merge(rep, run_heat_check(cfg));
    return rep;
}

// ---------------------------------------------------------------- outputs

void write_norm_csv(const fs::path& path, const std::vector<NormRow>& rows) {
    std::ostringstream out;
    out << "function,characterization,alpha,p,q,m,value\n";
    for (const auto& r : rows)
        out << r.function << ',' << to_string(r.characterization) << ',' << fmt(r.params.alpha) << ',' << fmt(r.params.p)
            << ',' << fmt(r.params.q) << ',' << r.params.m << ',' << fmt(r.breakdown.total) << '\n';
    write_file(path, out.str());
}

void write_breakdown_csv(const fs::path& path, const std::vector<NormRow>& rows) {
    std::ostringstream out;
    out << "function,characterization,alpha,p,q,m,j,t,weight,contribution,total\n";
    for (const auto& r : rows) {
        const std::string head = r.function + ',' + to_string(r.characterization) + ',' + fmt(r.params.alpha) + ',' +
                                 fmt(r.params.p) + ',' + fmt(r.params.q) + ',' + std::to_string(r.params.m) + ',';
        out << head << "base,," << fmt(1.0) << ',' << fmt(r.breakdown.base) << ',' << fmt(r.breakdown.total) << '\n';
        for (const auto& term : r.breakdown.terms)
            out << head << term.j << ',' << fmt(term.t) << ',' << fmt(term.weight) << ',' << fmt(term.value) << ','
                << fmt(r.breakdown.total) << '\n';
    }
    write_file(path, out.str());
}

std::string ratio_svg(const EquivalenceRun& run, std::size_t pair, const std::vector<Characterization>& chars) {
    const auto& ratio = run.ratios.at(pair);
    const auto idx = [&](Characterization c) {
        return static_cast<std::size_t>(std::find(chars.begin(), chars.end(), c) - chars.begin());
    };
    const std::size_t a = idx(ratio.num), b = idx(ratio.den);
    std::vector<std::pair<double, double>> pts;  // (log10 den, log10 num)
    for (const auto& row : run.norms) {
        const double x = row[b].total, y = row[a].total;
        if (x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y)) pts.emplace_back(std::log10(x), std::log10(y));
    }
    const double W = 480, Hh = 360, L = 64, R = 16, T = 32, B = 48;
    double lo = 0.0, hi = 1.0;
    if (!pts.empty()) {
        lo = hi = pts[0].first;
        for (auto [x, y] : pts) {
            lo = std::min({lo, x, y});
            hi = std::max({hi, x, y});
        }
    }
    lo -= 0.25;
    hi += 0.25;
    const auto sx = [&](double v) { return L + (v - lo) / (hi - lo) * (W - L - R); };
    const auto sy = [&](double v) { return Hh - B - (v - lo) / (hi - lo) * (Hh - T - B); };
    const std::string num = to_string(ratio.num), den = to_string(ratio.den);

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\" viewBox=\"0 0 " << W
      << ' ' << Hh << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << Hh << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << num << " vs " << den
      << " (log-log)</text>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << Hh - B << "\" x2=\"" << W - R << "\" y2=\"" << Hh - B << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << Hh - B << "\" stroke=\"black\"/>\n";
    for (int k = static_cast<int>(std::ceil(lo * 2)); k <= static_cast<int>(std::floor(hi * 2)); ++k) {
        const double v = k / 2.0;
        s << "<text x=\"" << fixed(sx(v)) << "\" y=\"" << Hh - B + 16 << "\" text-anchor=\"middle\" font-size=\"10\">1e"
          << fixed(v) << "</text>\n";
        s << "<text x=\"" << L - 4 << "\" y=\"" << fixed(sy(v) + 3) << "\" text-anchor=\"end\" font-size=\"10\">1e"
          << fixed(v) << "</text>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << Hh - 8 << "\" text-anchor=\"middle\" font-size=\"12\">" << den
      << " norm</text>\n";
    s << "<text x=\"14\" y=\"" << (T + Hh - B) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << (T + Hh - B) / 2 << ")\">" << num << " norm</text>\n";
    if (ratio.count > 0) {
        for (double r : {ratio.min, ratio.max}) {
            const double off = std::log10(r);
            s << "<line x1=\"" << fixed(sx(lo)) << "\" y1=\"" << fixed(sy(lo + off)) << "\" x2=\"" << fixed(sx(hi))
              << "\" y2=\"" << fixed(sy(hi + off)) << "\" stroke=\"steelblue\" stroke-dasharray=\"4 3\"/>\n";
        }
    }
    for (auto [x, y] : pts)
        s << "<circle cx=\"" << fixed(sx(x)) << "\" cy=\"" << fixed(sy(y)) << "\" r=\"3\" fill=\"firebrick\"/>\n";
    if (pts.empty())
        s << "<text x=\"" << W / 2 << "\" y=\"" << Hh / 2 << "\" text-anchor=\"middle\" font-size=\"12\">no positive norms</text>\n";
    s << "</svg>\n";
    return s.str();
}

json summary_json(const std::string& command, const ExperimentConfig& cfg, const Report& report) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = command;
    out["config"] = cfg.source;
    out["norm_rows"] = report.norms.size();

    json eq = json::array();
    for (const auto& [params, rep] : report.equivalence) {
        json e;
        e["params"] = params_json(params);
        e["family"] = rep.family;
        e["functions"] = rep.functions;
        e["degenerate"] = rep.degenerate;
        e["stable"] = rep.stable();
        e["refined"] = rep.refined.has_value();
        json rs = json::array();
        for (std::size_t i = 0; i < rep.base.ratios.size(); ++i) {
            const auto& r = rep.base.ratios[i];
            json j{{"numerator", to_string(r.num)}, {"denominator", to_string(r.den)}, {"count", r.count}};
            if (r.count > 0) {
                j["min"] = r.min;
                j["max"] = r.max;
                j["geo_mean"] = r.geo_mean;
            }
            if (rep.refined) {
                const auto& f = rep.refined->ratios[i];
                if (f.count > 0) {
                    j["refined_min"] = f.min;
                    j["refined_max"] = f.max;
                }
                j["drift"] = std::isfinite(rep.drift[i]) ? json(rep.drift[i]) : json("inf");
                j["flagged"] = rep.flagged[i] != 0;
            }
            rs.push_back(j);
        }
        e["ratios"] = rs;
        eq.push_back(e);
    }
    out["equivalence"] = eq;

    json emb = json::array();
    for (const auto& e : report.embedding) {
        json qs = json::array();
        for (double q : e.qs) qs.push_back(exponent_json(q));
        emb.push_back({{"qs", qs}, {"functions", e.functions.size()}, {"violations", e.violations}});
    }
    out["embedding"] = emb;

    out["algebra"] = report.algebra;
    // The variant whose largest residual is smaller is the one the product identity holds for.
    double worst[2] = {0.0, 0.0};
    bool any = false;
    for (const auto& row : report.algebra)
        if (row["experiment"] == "paraproduct") {
            any = true;
            const int v = row["variant"] == "statement" ? 0 : 1;
            worst[v] = std::max(worst[v], row["value"].get<double>());
        }
    if (any) out["validating_paraproduct_variant"] = worst[0] <= worst[1] ? "statement" : "proof";
    out["heat_check"] = report.heat;

    json fails = json::array();
    for (const auto& f : report.failures) fails.push_back({{"invariant", f.invariant}, {"detail", f.detail}});
    out["failures"] = fails;
    out["passed"] = report.failures.empty();
    return out;
}

void emit_outputs(const std::string& command, const ExperimentConfig& cfg, const Report& report) {
    fs::create_directories(cfg.output_dir);
    write_norm_csv(cfg.output_dir / "report.csv", report.norms);
    write_breakdown_csv(cfg.output_dir / "breakdown.csv", report.norms);
    write_file(cfg.output_dir / "summary.json", summary_json(command, cfg, report).dump(2) + "\n");
    for (std::size_t k = 0; k < report.equivalence.size(); ++k) {
        const auto& rep = report.equivalence[k].second;
        for (std::size_t i = 0; i < rep.base.ratios.size(); ++i) {
            const auto& r = rep.base.ratios[i];
            const std::string name = "ratio_" + to_string(r.num) + "_" + to_string(r.den) + "_params" + std::to_string(k) + ".svg";
            write_file(cfg.output_dir / name, ratio_svg(rep.base, i, rep.characterizations));
        }
    }
    if (!report.algebra.empty()) {
        std::ostringstream out;
        out << "experiment,function,variant,m,value\n";
        for (const auto& row : report.algebra)
            out << row["experiment"].get<std::string>() << ',' << row["function"].get<std::string>() << ','
                << row["variant"].get<std::string>() << ',' << row["m"].get<int>() << ',' << fmt(row["value"].get<double>()) << '\n';
        write_file(cfg.output_dir / "algebra.csv", out.str());
    }
    if (!report.heat.empty()) {
        std::ostringstream out;
        out << "check,function,value,tolerance,pass\n";
        for (const auto& row : report.heat)
            out << row["check"].get<std::string>() << ',' << row["function"].get<std::string>() << ','
                << fmt(row["value"].get<double>()) << ',' << fmt(row["tolerance"].get<double>()) << ','
                << (row["pass"].get<bool>() ? "true" : "false") << '\n';
        write_file(cfg.output_dir / "heat_check.csv", out.str());
    }
}

void apply_thread_env() {
    const char* v = std::getenv("BESOV_THREADS");
    if (!v || !*v) return;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError(std::string("BESOV_THREADS must be a positive integer, got '") + v + "'");
#ifdef _OPENMP
    omp_set_num_threads(static_cast<int>(n));
#endif
}

int run_command(const std::string& command, const fs::path& config_path, const std::optional<fs::path>& out_override) {
    ExperimentConfig cfg;
    try {
        apply_thread_env();
        cfg = load_config(config_path);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kInvalidConfig;
    }
    if (out_override) cfg.output_dir = *out_override;

    Report report;
    try {
        if (command == "norm")
            report = run_norms(cfg);
        else if (command == "equivalence")
            report = run_equivalence(cfg);
        else if (command == "algebra")
            report = run_algebra(cfg);
        else if (command == "heat-check")
            report = run_heat_check(cfg);
        else if (command == "report")
            report = run_full(cfg);
        else {
            std::cerr << "unknown command " << command << '\n';
            return kInvalidConfig;
        }
    } catch (const ResourceLimitError& err) {
        std::cerr << "resource limit: " << err.what() << '\n';
        return kResourceLimit;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource limit: out of memory\n";
        return kResourceLimit;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kInvalidConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kAssertionFailed;
    }

    try {
        emit_outputs(command, cfg, report);
    } catch (const std::exception& err) {
        std::cerr << err.what() << '\n';
        return kAssertionFailed;
    }
    for (const auto& f : report.failures) std::cerr << "FAILED " << f.invariant << ": " << f.detail << '\n';
    return report.failures.empty() ? kOk : kAssertionFailed;
}

}  // namespace besov::cli
