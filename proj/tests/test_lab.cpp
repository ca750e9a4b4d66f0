#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kaclab/experiment.hpp"
#include "kaclab/fit.hpp"
#include "kaclab/io.hpp"
#include "kaclab/rng.hpp"
#include "test_helpers.hpp"

using namespace kaclab;
using namespace kaclab::testing;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_oracle_config() {
    return nlohmann::json{
        {"schema_version", 1},
        {"mode", "oracle"},
        {"seed", 4},
        {"threads", 2},
        {"oracle",
         {{"model", {{"m", 3}, {"kernel_seed", 7}, {"lambda_target", 0.5}, {"f0", {0.6, 0.3, 0.1}}}},
          {"mu_list", {2.0, 4.0}},
          {"t_grid", {0.25, 0.5}},
          {"t_residual", 0.5},
          {"t_star", 0.5},
          {"j_stack", 3},
          {"j_check", 2},
          {"norm_j_max", 3},
          {"dyson", {{"mu", 2.0}, {"t", 0.05}, {"terms", 2}, {"j", 1}}}}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "kaclab_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("fit_powerlaw: exact laws and refusals") {
    SUBCASE("y = 7 x^{-1}") {
        std::vector<double> x{1.0, 2.0, 4.0, 8.0, 16.0}, y;
        for (double v : x) y.push_back(7.0 / v);
        const FitResult fit = fit_powerlaw(x, y);
        CHECK(std::abs(fit.slope + 1.0) <= 1e-10);
        CHECK(std::abs(fit.intercept - std::log(7.0)) <= 1e-10);
    }
    SUBCASE("constant y has slope 0") {
        const FitResult fit = fit_powerlaw({1.0, 3.0, 9.0}, {4.2, 4.2, 4.2});
        CHECK(std::abs(fit.slope) <= 1e-12);
    }
    SUBCASE("refusals") {
        CHECK_THROWS_AS(fit_powerlaw({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
        CHECK_THROWS_AS(fit_powerlaw({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), std::invalid_argument);
        CHECK_THROWS_AS(
            fit_powerlaw({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}, {0.6, 0.01, 0.01}),
            std::invalid_argument);
    }
    SUBCASE("synthetic noisy coverage: slope -1.5 recovered at 95%") {
        CounterRng rng(55, 0);
        const std::vector<double> x{1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
        int hits = 0;
        const int reps = 1000;
        for (int rep = 0; rep < reps; ++rep) {
            std::vector<double> y, sigma;
            for (double v : x) {
                const double base = std::pow(v, -1.5);
                y.push_back(base * (1.0 + 0.05 * rng.normal()));
                sigma.push_back(0.05 * base);
            }
            const FitResult fit = fit_powerlaw(x, y, sigma);
            if (fit.slope >= -1.6 && fit.slope <= -1.4) ++hits;
        }
        CHECK(hits >= 930); // 95% nominal with binomial slack
    }
    SUBCASE("fit_linear covariance sanity") {
        const FitResult fit =
            fit_linear({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
        CHECK(std::abs(fit.slope - 2.0) <= 1e-12);
        CHECK(std::abs(fit.intercept - 1.0) <= 1e-12);
        CHECK(fit.slope_stderr > 0.0);
    }
}

TEST_CASE("config parsing: strict schema") {
    SUBCASE("unknown top-level key") {
        nlohmann::json j = base_oracle_config();
        j["surprise"] = 1;
        CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j),
                             doctest::Contains("unknown key 'surprise'"), std::invalid_argument);
    }
    SUBCASE("unknown nested key") {
        nlohmann::json j = base_oracle_config();
        j["oracle"]["model"]["extra"] = 2;
        CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
    }
    SUBCASE("schema_version is mandatory") {
        nlohmann::json j = base_oracle_config();
        j["schema_version"] = 2;
        CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
    }
    SUBCASE("mu grid must increase strictly") {
        nlohmann::json j = base_oracle_config();
        j["mode"] = "scaling";
        j["scaling"] = {{"mu_grid", {8.0, 4.0}},
                        {"oracle", j["oracle"]["model"]}};
        CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
    }
    SUBCASE("bad kernel kind") {
        nlohmann::json j{{"schema_version", 1},
                         {"mode", "simulate"},
                         {"ensemble",
                          {{"mu", 10.0},
                           {"replicas", 2},
                           {"kernel", {{"kind", "hard_sphere"}, {"dimension", 3}}},
                           {"initial_density", {{"kind", "gaussian", }, {"sigma", 1.0}}}}}};
        CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
    }
}

TEST_CASE("simulate mode: snapshot artifact equals the sampled initial state") {
    nlohmann::json j{
        {"schema_version", 1},
        {"mode", "simulate"},
        {"seed", 11},
        {"threads", 1},
        {"emit_states", true},
        {"grid", {{"kind", "uniform"}, {"dimension", 3}, {"bins", 8}, {"v_max", 5.0}}},
        {"checkpoints", {0.0}},
        {"j_list", {1}},
        {"ensemble",
         {{"mu", 12.0},
          {"replicas", 1},
          {"t_final", 0.0},
          {"kernel", {{"kind", "maxwell"}, {"dimension", 3}}},
          {"initial_density", {{"kind", "gaussian"}, {"sigma", 1.0}, {"dimension", 3}}}}}};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("simulate_t0");
    CHECK(run(cfg) == 0);

    const ParticleState expect = sample_initial_state(cfg.ensemble, 0);
    std::ifstream in(cfg.out_dir / "states.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line); // header
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint64_t rep = 0, particle = 0;
        double t = 0, vx = 0, vy = 0, vz = 0;
        REQUIRE(std::sscanf(line.c_str(), "%zu,%lf,%zu,%lf,%lf,%lf", &rep, &t, &particle, &vx,
                            &vy, &vz) == 6);
        REQUIRE(particle < expect.size());
        CHECK(vx == expect.velocities[particle][0]);
        CHECK(vy == expect.velocities[particle][1]);
        CHECK(vz == expect.velocities[particle][2]);
        ++rows;
    }
    CHECK(rows == expect.size());
    CHECK(fs::exists(cfg.out_dir / "f_t0_j1.csv"));
    CHECK(fs::exists(cfg.out_dir / "f_t0_j1.json"));
    CHECK(fs::exists(cfg.out_dir / "manifest.json"));
}

TEST_CASE("oracle mode on the zero kernel: all residuals identically zero") {
    nlohmann::json j = base_oracle_config();
    const int m = 2;
    j["oracle"]["model"] =
        nlohmann::json{{"m", m},
                       {"kernel_matrix", std::vector<double>(16, 0.0)},
                       {"f0", {0.7, 0.3}}};
    j["oracle"]["mu_list"] = {2.0};
    j["oracle"]["j_stack"] = 3;
    j["oracle"]["j_check"] = 2;
    j["oracle"]["norm_j_max"] = 2;
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("oracle_zero");
    CHECK(run(cfg) == 0);

    nlohmann::json report;
    std::ifstream in(cfg.out_dir / "oracle_report.json");
    in >> report;
    for (const auto& rec : report.at("residuals")) {
        CHECK(rec.at("bbgky").get<double>() == 0.0);
        CHECK(rec.at("error_hierarchy").get<double>() == 0.0);
    }
    for (const auto& v : report.at("limiting")) CHECK(v.get<double>() == 0.0);
    for (const auto& rec : report.at("norms")) {
        CHECK(rec.at("T_norm").get<double>() == 0.0);
        CHECK(rec.at("C_norm").get<double>() == 0.0);
    }
}

TEST_CASE("rerun determinism: byte-identical artifacts, thread-count independence") {
    nlohmann::json j{
        {"schema_version", 1},
        {"mode", "simulate"},
        {"seed", 21},
        {"threads", 1},
        {"emit_states", true},
        {"grid", {{"kind", "uniform"}, {"dimension", 1}, {"bins", 24}, {"v_max", 5.0}}},
        {"checkpoints", {0.0, 0.4}},
        {"j_list", {1, 2}},
        {"ensemble",
         {{"mu", 15.0},
          {"replicas", 60},
          {"t_final", 0.4},
          {"kernel", {{"kind", "maxwell"}, {"dimension", 1}}},
          {"initial_density", {{"kind", "gaussian"}, {"sigma", 1.0}, {"dimension", 1}}}}}};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("det_a");
    CHECK(run(cfg) == 0);
    ExperimentConfig cfg2 = cfg;
    cfg2.out_dir = fresh_dir("det_b");
    cfg2.threads = 4; // numerical artifacts must not depend on the budget
    CHECK(run(cfg2) == 0);

    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue; // carries wall-clock timing
        CAPTURE(name);
        CHECK(slurp(entry.path()) == slurp(cfg2.out_dir / name));
    }
}

TEST_CASE("scaling experiment (oracle path) reports the chaos scaling") {
    nlohmann::json j{
        {"schema_version", 1},
        {"mode", "scaling"},
        {"seed", 1},
        {"threads", 2},
        {"scaling",
         {{"mu_grid", {4.0, 8.0, 16.0, 32.0}},
          {"j_list", {1, 2}},
          {"t_star", 0.5},
          {"oracle",
           {{"m", 3}, {"kernel_seed", 7}, {"lambda_target", 0.5}, {"f0", {0.6, 0.3, 0.1}}}}}}};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("scaling_small");

    const ScalingReport report = scaling_experiment(cfg);
    CHECK(report.rows.size() == 8);
    CHECK(report.slope_j1 == doctest::Approx(-1.0).epsilon(0.25));
    CHECK(report.mu_dist2_ratio >= 1.0);
    CHECK(report.mu_dist2_ratio <= 2.0);
    CHECK(report.envelope_ratio[2] <= 3.0);
    CHECK(report.g_fit > 0.0);
    CHECK(report.alpha == doctest::Approx(0.5).epsilon(0.2));

    // distance ratio d2/d1 at fixed mu consistent with j^2 within factor 3
    double d1 = 0.0, d2 = 0.0;
    for (const auto& r : report.rows)
        if (r.mu == 16.0) (r.j == 1 ? d1 : d2) = r.dist;
    CHECK(d2 / d1 >= 4.0 / 3.0);
    CHECK(d2 / d1 <= 12.0);

    CHECK(run(cfg) == 0);
    CHECK(fs::exists(cfg.out_dir / "scaling_report.json"));
    CHECK(fs::exists(cfg.out_dir / "scaling_rows.csv"));
}

TEST_CASE("scaling experiment: Monte Carlo demonstration path at j = 1") {
    nlohmann::json j{
        {"schema_version", 1},
        {"mode", "scaling"},
        {"seed", 3},
        {"threads", 2},
        {"grid", {{"kind", "uniform"}, {"dimension", 1}, {"bins", 12}, {"v_max", 6.0}}},
        {"ensemble",
         {{"mu", 4.0},
          {"replicas", 1},
          {"t_final", 4.0},
          {"kernel", {{"kind", "maxwell"}, {"dimension", 1}}},
          {"initial_density", {{"kind", "mixture"}, {"w1", 0.5}, {"sigma1", 0.5},
                               {"sigma2", 1.3229837287}, {"dimension", 1}}}}},
        {"scaling",
         {{"mu_grid", {2.0, 4.0, 8.0, 16.0}},
          {"j_list", {1}},
          {"t_star", 4.0},
          {"monte_carlo", true},
          {"oracle",
           {{"m", 3}, {"kernel_seed", 7}, {"lambda_target", 0.5}, {"f0", {0.6, 0.3, 0.1}}}}}}};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("scaling_mc");
    const ScalingReport report = scaling_experiment(cfg);
    REQUIRE(report.mc_rows.size() == 4);
    for (const auto& r : report.mc_rows)
        CHECK(r.dist_err > 0.0); // error bars on the Monte Carlo path
    CHECK(report.replicas_used > 4u * 4000u); // pilot budgets were auto-grown
    // The 1/mu decay should be resolved through the noise at this budget.
    CHECK(report.mc_rows.front().dist > 3.0 * report.mc_rows.front().dist_err);
    CHECK(report.mc_rows.front().dist > report.mc_rows.back().dist);
    if (!report.degraded_confidence) {
        CHECK(report.mc_slope <= -0.6);
        CHECK(report.mc_slope >= -1.4);
    }
    REQUIRE(report.mc_reference.has_value());
    CHECK(std::abs(report.mc_reference->total_mass() +
                   report.mc_reference->truncation_mass - 1.0) <= 1e-12);
    CHECK(report.a_fit >= 1.0);
    CHECK(report.b_fit >= 0.0);

    CHECK(run(cfg) == 0);
    CHECK(fs::exists(cfg.out_dir / "mc_reference.csv"));
    CHECK(fs::exists(cfg.out_dir / "scaling_mc_rows.csv"));
    // Reference CSV carries per-bin indices, values and standard errors.
    std::ifstream in(cfg.out_dir / "mc_reference.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "b0,value,stderr");
}

TEST_CASE("scaling experiment refuses a narrow mu grid") {
    nlohmann::json j{
        {"schema_version", 1},
        {"mode", "scaling"},
        {"seed", 1},
        {"scaling",
         {{"mu_grid", {4.0, 8.0}},
          {"j_list", {1}},
          {"oracle",
           {{"m", 3}, {"kernel_seed", 7}, {"lambda_target", 0.5}, {"f0", {0.6, 0.3, 0.1}}}}}}};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("scaling_narrow");
    CHECK_THROWS_AS(scaling_experiment(cfg), std::invalid_argument);
}

TEST_CASE("verify mode emits per-check results and a clean exit on a sane model") {
    nlohmann::json j = base_oracle_config();
    j["mode"] = "verify";
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.out_dir = fresh_dir("verify_small");
    CHECK(run(cfg) == 0);
    nlohmann::json report;
    std::ifstream in(cfg.out_dir / "verify_report.json");
    in >> report;
    CHECK(report.at("failures").get<int>() == 0);
    CHECK(report.at("checks").size() > 10);
}
