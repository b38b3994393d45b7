#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracstefan/config.hpp"

using namespace fracstefan;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// small, fast solve configuration shared by the artifact tests
std::string small_cfg(const std::string& mode, const fs::path& out) {
    return std::string("{\"mode\":\"") + mode +
           "\",\"grid\":{\"n\":128,\"L\":4.0,\"c_ext\":2.0},"
           "\"dt\":0.015625,\"T\":1.0,"
           "\"mc\":{\"N\":20000,\"workers\":2,\"seed\":7},"
           "\"out\":\"" + out.string() + "\"}";
}

}  // namespace

TEST_CASE("empty config object yields all spec defaults") {
    RunConfig cfg = parse_config_json("{}");
    CHECK(cfg.grid.dim == 1);
    CHECK(cfg.s == 0.4);
    CHECK(cfg.grid.half_width == 4.0);
    CHECK(cfg.grid.points_per_axis == 512);
    CHECK(cfg.dt == doctest::Approx(1.0 / 256.0));
    CHECK(cfg.horizon == 2.0);
    CHECK(cfg.grid.ext_factor == 3.0);
    CHECK(cfg.mc.N == 100000);
    CHECK(cfg.mc.seed == 42);
}

TEST_CASE("schema violations carry the field path") {
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_json("{\"grid\":{\"n\":4}}")),
                         doctest::Contains("grid.n"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_json("{\"s\":1.5}")),
                         doctest::Contains("config.s"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_json("{\"mode\":\"dance\"}")),
                         doctest::Contains("mode"), std::invalid_argument);
    CHECK_THROWS(parse_config_json("{\"mu\":{}}"));
    CHECK_THROWS(parse_config_json("not json at all"));
}

TEST_CASE("transience rule: potentials reject s >= 1/2 in d = 1") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(parse_config_json("{\"mode\":\"freeze\",\"s\":0.6}")),
        doctest::Contains("transience"), std::invalid_argument);
    // melting does not need potentials
    CHECK_NOTHROW(static_cast<void>(parse_config_json("{\"mode\":\"melt\",\"s\":0.6}")));
    // ... and neither do the pure-simulation modes
    CHECK_NOTHROW(static_cast<void>(parse_config_json("{\"mode\":\"tail\",\"s\":0.6}")));
}

TEST_CASE("mushy melting data is rejected at parse time with the rule named") {
    std::string text =
        "{\"mode\":\"melt\",\"mu\":{\"segments\":[{\"lo\":-1,\"hi\":1,\"value\":0.5}]}}";
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_config_json(text)),
                         doctest::Contains("mushy"), std::invalid_argument);
}

TEST_CASE("melt mode emits the full artifact set and a manifest") {
    fs::path out = fresh_dir("fracstefan_cli_melt");
    RunConfig cfg = parse_config_json(small_cfg("melt", out));
    CHECK(run(cfg) == 0);
    for (const char* f :
         {"nu.csv", "nu_base.csv", "instant_layer.csv", "barrier.csv", "manifest.json",
          "eta_index.csv", "w_index.csv", "rho_cum_index.csv", "kappa_index.csv",
          "enthalpy_index.csv"})
        CHECK(fs::exists(out / f));
    std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("\"extinction_time\": null") != std::string::npos);
    CHECK(manifest.find("\"masses\"") != std::string::npos);
    CHECK(manifest.find("\"residuals\"") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("freeze mode records a finite extinction time and writes u") {
    fs::path out = fresh_dir("fracstefan_cli_freeze");
    RunConfig cfg = parse_config_json(small_cfg("freeze", out));
    CHECK(run(cfg) == 0);
    CHECK(fs::exists(out / "u.csv"));
    std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("\"extinction_time\": null") == std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
    fs::path out1 = fresh_dir("fracstefan_det_1");
    fs::path out2 = fresh_dir("fracstefan_det_2");
    RunConfig c1 = parse_config_json(small_cfg("mc", out1));
    RunConfig c2 = parse_config_json(small_cfg("mc", out2));
    CHECK(run(c1) == run(c2));
    Index compared = 0;
    for (const auto& e : fs::directory_iterator(out1)) {
        fs::path other = out2 / e.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(e.path()) == slurp(other));
        ++compared;
    }
    CHECK(compared > 4);
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("exit-law mode writes samples and its KS check") {
    fs::path out = fresh_dir("fracstefan_exitlaw");
    RunConfig cfg = parse_config_json(
        "{\"mode\":\"exit-law\",\"mc\":{\"N\":5000,\"dt\":0.0005,\"workers\":2},"
        "\"tolerances\":{\"exit_law_ks\":0.05},\"out\":\"" + out.string() + "\"}");
    CHECK(run(cfg) == 0);
    CHECK(fs::exists(out / "exit_samples.csv"));
    std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("exit_law_ks") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("validate mode emits at least 8 check reports") {
    fs::path out = fresh_dir("fracstefan_validate");
    RunConfig cfg = parse_config_json(
        "{\"mode\":\"validate\",\"grid\":{\"n\":256,\"L\":4.0,\"c_ext\":3.0},"
        "\"dt\":0.0078125,\"T\":2.0,"
        "\"mc\":{\"N\":50000,\"workers\":2},"
        "\"out\":\"" + out.string() + "\"}");
    int status = run(cfg);
    std::string manifest = slurp(out / "manifest.json");
    Index n_checks = 0;
    for (size_t pos = 0; (pos = manifest.find("\"name\"", pos)) != std::string::npos; ++pos)
        ++n_checks;
    CHECK(n_checks >= 8);
    CHECK(status == 0);
    fs::remove_all(out);
}

TEST_CASE("piecewise f and insulated indicator are sampled onto the grid") {
    RunConfig cfg = parse_config_json(
        "{\"mode\":\"freeze\",\"f\":{\"one_minus_indicator\":{\"lo\":-0.25,\"hi\":0.25}}}");
    ProblemData data = make_problem_data(cfg);
    CHECK(data.has_insulation());
    Index inside = 0;
    for (Index i = 0; i < cfg.grid.node_count(); ++i) {
        if (data.insulated_G[i]) {
            CHECK(data.f.values[i] == 0.0);
            ++inside;
        } else {
            CHECK(data.f.values[i] == 1.0);
        }
    }
    CHECK(inside == Index(0.5 / cfg.grid.spacing()));
}
