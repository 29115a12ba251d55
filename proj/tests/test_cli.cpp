#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "experiment.hpp"

using namespace besov;
using namespace besov::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSmoke = fs::path(BESOV_CONFIG_DIR) / "torus_smoke.json";

json smoke() {
    std::ifstream in(kSmoke);
    return json::parse(in);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("besov_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t lines(const fs::path& p) {
    const std::string s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

int shell(const std::string& args) {
    const std::string cmd = std::string(BESOV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config validation") {
    const json base = smoke();
    CHECK_NOTHROW(parse_config(base));
    const auto cfg = parse_config(base);
    CHECK(cfg.characterizations.size() == 5);
    CHECK(cfg.params.size() == 2);
    CHECK(cfg.embedding_qs.back() == kInfinity);

    auto rejects = [&](const std::function<void(json&)>& edit) {
        json doc = base;
        edit(doc);
        CHECK_THROWS_AS(parse_config(doc), ConfigError);
    };
    rejects([](json& d) { d["colour"] = "blue"; });
    rejects([](json& d) { d["engine"]["flavour"] = 1; });
    rejects([](json& d) { d["params"][0]["beta"] = 1; });
    rejects([](json& d) { d.erase("schema_version"); });
    rejects([](json& d) { d["schema_version"] = 2; });
    rejects([](json& d) { d["characterizations"] = json::array(); });
    rejects([](json& d) { d["characterizations"] = {"heat", "wavelet"}; });
    rejects([](json& d) { d["params"] = json::array(); });
    rejects([](json& d) { d["params"][0]["alpha"] = 1.0; });  // difference needs alpha < 1
    rejects([](json& d) { d["params"][0]["m"] = 0; });
    rejects([](json& d) { d["grid"]["nodes"] = {64, 64}; });
    rejects([](json& d) { d["family"]["kind"] = "heisenberg_bumps"; });
    rejects([](json& d) { d["embedding"]["qs"] = {2, 1}; });
    rejects([](json& d) { d["engine"]["kind"] = "quantum"; });
    rejects([](json& d) { d["tolerances"]["drift"] = -1; });
    rejects([](json& d) { d["group"] = {{"model", "heisenberg"}, {"dim", 3}}; });

    json heis = base;
    heis["group"] = {{"model", "heisenberg"}};
    heis["grid"]["nodes"] = {16, 16, 12};
    heis["family"] = {{"kind", "standard"}};
    heis.erase("engine");
    const auto h = parse_config(heis);
    CHECK(h.engine.kind == EngineKind::FiniteDifference);
    CHECK(make_family(h).size() == 10);
    json torus_std = base;
    torus_std["family"] = {{"kind", "standard"}};
    CHECK(make_family(parse_config(torus_std)).size() == 20);
}

TEST_CASE("smoke run, determinism and row counts") {
    const fs::path a = scratch("smoke_a"), b = scratch("smoke_b");
    REQUIRE(run_command("report", kSmoke, a) == kOk);
    REQUIRE(run_command("report", kSmoke, b) == kOk);
    for (const char* f : {"report.csv", "breakdown.csv", "summary.json", "algebra.csv", "heat_check.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    // 4 functions x 5 characterizations x 2 parameter sets, plus the header.
    CHECK(lines(a / "report.csv") == 1 + 4 * 5 * 2);
    CHECK(slurp(a / "report.csv").rfind("function,characterization,alpha,p,q,m,value\n", 0) == 0);

    const json summary = json::parse(slurp(a / "summary.json"));
    CHECK(summary["passed"] == true);
    CHECK(summary["validating_paraproduct_variant"] == "statement");
    CHECK(summary["equivalence"].size() == 2);
    for (const auto& eq : summary["equivalence"]) {
        CHECK(eq["ratios"].size() == 10);
        for (const auto& r : eq["ratios"]) {
            CHECK(r["min"].get<double>() <= r["geo_mean"].get<double>());
            CHECK(r["geo_mean"].get<double>() <= r["max"].get<double>());
        }
    }

    // Ten pairs per parameter set, each a well-formed SVG document.
    std::size_t svgs = 0;
    for (const auto& e : fs::directory_iterator(a))
        if (e.path().extension() == ".svg") {
            ++svgs;
            boost::property_tree::ptree tree;
            CHECK_NOTHROW(boost::property_tree::read_xml(e.path().string(), tree));
            CHECK(tree.count("svg") == 1);
        }
    CHECK(svgs == 20);
}

TEST_CASE("exit codes") {
    const json base = smoke();
    {
        const fs::path d = scratch("empty_chars");
        json doc = base;
        doc["characterizations"] = json::array();
        CHECK(run_command("norm", write_config(d, doc), d / "out") == kInvalidConfig);
        CHECK(!fs::exists(d / "out"));
    }
    {
        const fs::path d = scratch("limit");
        json doc = base;
        doc["limits"] = {{"max_nodes", 100}};
        CHECK(run_command("equivalence", write_config(d, doc), d / "out") == kResourceLimit);
    }
    {
        const fs::path d = scratch("assert");
        json doc = base;
        doc["tolerances"] = {{"calderon", 1e-12}};
        doc["algebra"] = {{"m", {1}}, {"lemma_trials", 10}};
        CHECK(run_command("algebra", write_config(d, doc), d / "out") == kAssertionFailed);
        const json summary = json::parse(slurp(d / "out" / "summary.json"));
        CHECK(summary["passed"] == false);
        CHECK(summary["failures"][0]["invariant"] == "calderon_residual");
    }
    {
        const fs::path d = scratch("heat");
        CHECK(run_command("heat-check", kSmoke, d) == kOk);
        CHECK(lines(d / "heat_check.csv") == 1 + 4 * 5);
    }
    {
        const fs::path d = scratch("missing");
        CHECK(run_command("norm", d / "nope.json", d / "out") == kInvalidConfig);
    }
}

TEST_CASE("empty report writes header-only CSV") {
    const fs::path d = scratch("empty");
    write_norm_csv(d / "direct.csv", {});
    CHECK(slurp(d / "direct.csv") == "function,characterization,alpha,p,q,m,value\n");

    json doc = smoke();
    doc["family"]["count"] = 0;
    CHECK(run_command("norm", write_config(d, doc), d / "out") == kOk);
    CHECK(slurp(d / "out" / "report.csv") == "function,characterization,alpha,p,q,m,value\n");
}

TEST_CASE("command-line binary") {
    const fs::path d = scratch("binary");
    CHECK(shell("norm --config " + kSmoke.string() + " --out " + (d / "out").string()) == kOk);
    CHECK(lines(d / "out" / "report.csv") == 1 + 40);
    CHECK(shell("") == kInvalidConfig);
    CHECK(shell("norm") == kInvalidConfig);
    CHECK(shell("frobnicate --config " + kSmoke.string()) == kInvalidConfig);
    CHECK(shell("norm --config " + (d / "absent.json").string()) == kInvalidConfig);
    CHECK(shell("--help") == kOk);

    CHECK(::setenv("BESOV_THREADS", "zero", 1) == 0);
    CHECK(shell("norm --config " + kSmoke.string() + " --out " + (d / "t").string()) == kInvalidConfig);
    CHECK(::setenv("BESOV_THREADS", "1", 1) == 0);
    CHECK(shell("norm --config " + kSmoke.string() + " --out " + (d / "t").string()) == kOk);
    ::unsetenv("BESOV_THREADS");
}
