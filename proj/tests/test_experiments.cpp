#include <doctest.h>

#include "sqngp/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sqngp;
namespace ex = sqngp::experiments;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sqngp_test_experiments_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("experiment names round-trip") {
    for (auto k : {ex::Kind::GPDemo, ex::Kind::Run1D, ex::Kind::RunLGSS, ex::Kind::RunNLToy, ex::Kind::ArmijoCheck})
        CHECK(ex::parse_kind(ex::to_string(k)) == k);
    CHECK_THROWS_AS(ex::parse_kind("run-2d"), Error);
}

TEST_CASE("median") {
    CHECK(ex::median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(ex::median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(ex::median({}), Error);
}

TEST_CASE("JSON overlay") {
    auto cfg = ex::default_config(ex::Kind::RunLGSS);
    ex::apply_json(cfg, R"({"seed": 9, "runs": 4, "iters": 50,
                            "optimizer": {"epsilon": 0.01, "gp": {"mode": "simplified", "h0_diag": [1, 2, 3, 4]},
                                          "line_search": {"tau": 7}},
                            "lgss": {"series_length": 30}})");
    CHECK(cfg.seed == 9);
    CHECK(cfg.runs == 4);
    CHECK(cfg.optimizer.k_max == 50);
    CHECK(cfg.optimizer.epsilon == 0.01);
    CHECK(cfg.optimizer.gp.mode == MeasurementMode::Simplified);
    CHECK(cfg.optimizer.gp.h0_diag.size() == 4);
    CHECK(cfg.optimizer.gp.h0_diag(3) == 4.0);
    CHECK(cfg.optimizer.ls.tau == 7);
    CHECK(cfg.lgss.series_length == 30);
    // untouched values keep their defaults
    CHECK(cfg.optimizer.gp.m == ex::default_config(ex::Kind::RunLGSS).optimizer.gp.m);

    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(ex::apply_json(cfg, R"({"sead": 1})"), Error);
        CHECK_THROWS_AS(ex::apply_json(cfg, R"({"optimizer": {"gp": {"hO": 1}}})"), Error);
    }
    SUBCASE("config for another experiment is rejected") {
        CHECK_THROWS_AS(ex::apply_json(cfg, R"({"experiment": "run-1d"})"), Error);
    }
    SUBCASE("malformed input") {
        CHECK_THROWS_AS(ex::apply_json(cfg, "{"), Error);
        CHECK_THROWS_AS(ex::apply_json(cfg, R"({"runs": "many"})"), Error);
        CHECK_THROWS_AS(ex::apply_json(cfg, R"({"runs": 0})"), Error);
    }
}

TEST_CASE("effective config echoes back unchanged") {
    for (auto k : {ex::Kind::GPDemo, ex::Kind::Run1D, ex::Kind::RunLGSS, ex::Kind::RunNLToy, ex::Kind::ArmijoCheck}) {
        const auto a = ex::default_config(k);
        auto b = ex::default_config(k);
        b.seed = 12345;
        ex::apply_json(b, ex::config_json(a));
        CHECK(ex::config_json(a) == ex::config_json(b));
    }
}

TEST_CASE("shipped configs load") {
    const fs::path dir = fs::path(SQNGP_SOURCE_DIR) / "configs";
    int seen = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".json") continue;
        ++seen;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(ex::load_config(e.path().string()));
    }
    CHECK(seen == 5);
}

TEST_CASE("gp-demo output") {
    auto cfg = ex::default_config(ex::Kind::GPDemo);
    cfg.out_dir = scratch_dir("gp").string();
    const auto res = ex::gp_demo(cfg);
    CHECK(res.iterates.size() == 13);
    CHECK(res.iterates.front() == -5.0);
    CHECK(res.iterates.back() == 7.0);
    REQUIRE(res.rows.size() == 461);
    CHECK(res.rows.front().x == -15.0);
    CHECK(res.rows.back().x == 8.0);
    CHECK(res.min_std > 0.0);
    const std::string csv = slurp(fs::path(cfg.out_dir) / "gp_demo.csv");
    CHECK(csv.rfind("x,true_hess,post_mean,post_std\n", 0) == 0);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "summary.json"));
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("run-1d writes traces and replicate table") {
    auto cfg = ex::default_config(ex::Kind::Run1D);
    cfg.runs = 3;
    cfg.optimizer.k_max = 40;
    cfg.out_dir = scratch_dir("r1d").string();
    const auto res = ex::run_1d(cfg);
    REQUIRE(res.replicates.size() == 3);
    for (const auto& r : res.replicates) {
        CHECK_FALSE(r.failed);
        CHECK(r.iterations == 40);
        CHECK(r.estimate.allFinite());
        CHECK(r.start(0) >= cfg.toy1d.x0_lo);
        CHECK(r.start(0) <= cfg.toy1d.x0_hi);
    }
    // replicates draw different starts
    CHECK(res.replicates[0].start(0) != res.replicates[1].start(0));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "traces" / "run_002.csv"));
    const std::string table = slurp(fs::path(cfg.out_dir) / "replicates.csv");
    CHECK(table.rfind("run,status,fallbacks,iterations,start_x,est_x\n", 0) == 0);
    fs::remove_all(cfg.out_dir);
}

TEST_CASE("replicates do not depend on the thread count") {
    auto cfg = ex::default_config(ex::Kind::RunLGSS);
    cfg.runs = 4;
    cfg.optimizer.k_max = 30;
    cfg.threads = 1;
    const auto a = ex::run_lgss(cfg);
    cfg.threads = 4;
    const auto b = ex::run_lgss(cfg);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.replicates[i].estimate == b.replicates[i].estimate);
}

TEST_CASE("nltoy smoke run") {
    auto cfg = ex::default_config(ex::Kind::RunNLToy);
    cfg.runs = 1;
    cfg.particles = 20;
    cfg.optimizer.k_max = 5;
    const auto res = ex::run_nltoy(cfg);
    REQUIRE(res.replicates.size() == 1);
    CHECK_FALSE(res.replicates[0].failed);
    CHECK(res.replicates[0].estimate.size() == 6);
    CHECK(res.stats.count("median_b") == 1);

    cfg.nltoy.unit = Vector::Ones(3);
    CHECK_THROWS_AS(ex::run_nltoy(cfg), Error);
}

TEST_CASE("armijo-check report") {
    auto cfg = ex::default_config(ex::Kind::ArmijoCheck);
    cfg.armijo.draws = 20000;
    const std::string report = ex::run_experiment(cfg);
    CHECK(report.find("armijo-check") != std::string::npos);
    CHECK(report.find("PASS") != std::string::npos);
}
