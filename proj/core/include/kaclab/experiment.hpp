#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kaclab/density_table.hpp"
#include "kaclab/ensemble.hpp"
#include "kaclab/grid.hpp"
#include "kaclab/hierarchy_verify.hpp"

namespace kaclab {

enum class RunMode { simulate, scaling, oracle, verify };

/// Discrete-model block of the oracle/scaling configs.
struct OracleModelConfig {
    int m = 3;
    std::uint64_t kernel_seed = 7;
    double lambda_target = 1.0;
    bool energy_compatible = false;
    std::vector<double> values;        ///< optional velocity values
    std::optional<std::vector<double>> kernel_matrix; ///< explicit K, m^4 entries
    std::vector<double> f0;            ///< initial pmf

    DiscreteModel build() const;
};

struct ScalingConfig {
    std::vector<double> mu_grid{5, 10, 20, 40, 80};
    std::vector<unsigned> j_list{1, 2, 3};
    double t_star = 0.5;
    bool monte_carlo = false;          ///< secondary j=1 demonstration path
    std::uint64_t replicas = 0;        ///< 0 = auto-size from the noise budget
    OracleModelConfig oracle;
};

struct ExperimentConfig {
    RunMode mode = RunMode::simulate;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::filesystem::path out_dir;
    bool emit_states = true;
    std::uint64_t table_alloc_limit = 0; ///< 0 keeps the library default

    // simulate
    EnsembleSpec ensemble;
    GridSpec grid = GridSpec::uniform(1, 64, 6.0);
    std::vector<double> checkpoints{0.0};
    std::vector<unsigned> j_list{1};

    // scaling / oracle / verify
    ScalingConfig scaling;
    OracleModelConfig oracle_model;
    VerifyOptions verify;

    bool has_ensemble = false;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

struct ScalingReport {
    struct Row {
        unsigned j = 0;
        double mu = 0.0;
        double dist = 0.0, dist_err = 0.0;
        double e_norm = 0.0, e_err = 0.0;
    };
    std::vector<Row> rows;            ///< oracle path: errors are 0
    std::vector<Row> mc_rows;         ///< Monte Carlo path (j = 1, debiased distances)
    double mc_slope = 0.0, mc_slope_err = 0.0;
    double t_star = 0.5;
    double slope_j1 = 0.0, slope_j1_err = 0.0, intercept_j1 = 0.0;
    double mu_dist2_ratio = 0.0;        ///< max/min of mu * dist(j=2)
    std::vector<double> envelope_ratio; ///< per j: max/min of ||E_j|| (sqrt(mu)/j)^j
    double g_fit = 0.0;
    double a_fit = 1.0, b_fit = 0.0;    ///< error-envelope constants over {t*/2, t*}
    double alpha = 0.0;
    std::uint64_t replicas_used = 0;    ///< Monte Carlo path only
    bool degraded_confidence = false;   ///< noise budget or fit prerequisites not met
    std::optional<DensityTable> mc_reference; ///< DSMC reference table (MC path)

    nlohmann::json to_json() const;
};

/// Exact oracle-path scaling study (plus the optional Monte Carlo j=1
/// demonstration when cfg.scaling.monte_carlo is set).
ScalingReport scaling_experiment(const ExperimentConfig& cfg);

/// Execute the configured mode, writing all artifacts under cfg.out_dir.
/// Artifacts are a pure function of the config; the manifest additionally
/// records wall-clock timing and is excluded from that contract. Returns
/// the process exit status (nonzero when verify-mode checks fail).
int run(const ExperimentConfig& cfg);

} // namespace kaclab
