// kaclab: batch driver for the Kac-model laboratory.
//
//   kaclab simulate|scaling|oracle|verify --config cfg.json --out dir
//          [--threads k] [--seed s]
//
// The config file selects all numerical parameters; --threads and --seed
// override the corresponding config fields. Exit status is nonzero for
// invalid configs and for failed verify-mode checks; diagnostics go to
// stderr as JSON.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kaclab/experiment.hpp"
#include "kaclab/io.hpp"

namespace {

int run_mode(const std::string& mode, const std::string& config_path, const std::string& out_dir,
             unsigned threads, bool threads_set, std::uint64_t seed, bool seed_set) {
    try {
        kaclab::ExperimentConfig cfg = kaclab::ExperimentConfig::from_file(config_path);
        const std::string cfg_mode =
            cfg.mode == kaclab::RunMode::simulate   ? "simulate"
            : cfg.mode == kaclab::RunMode::scaling  ? "scaling"
            : cfg.mode == kaclab::RunMode::oracle   ? "oracle"
                                                    : "verify";
        if (cfg_mode != mode) {
            nlohmann::json err = {{"error", "config mode mismatch"},
                                  {"subcommand", mode},
                                  {"config_mode", cfg_mode}};
            std::cerr << err.dump() << "\n";
            return 2;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads_set) {
            cfg.threads = threads;
            cfg.verify.threads = threads;
        }
        if (seed_set) {
            cfg.seed = seed;
            if (cfg.has_ensemble) cfg.ensemble.seed = seed;
        }
        return kaclab::run(cfg);
    } catch (const std::exception& e) {
        nlohmann::json err = {{"error", e.what()}, {"subcommand", mode}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kac-model collision laboratory"};
    app.set_version_flag("--version", std::string(kaclab::kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    unsigned threads = 0;
    std::uint64_t seed = 0;

    bool threads_set = false, seed_set = false;
    for (const char* name : {"simulate", "scaling", "oracle", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker thread budget (0 = hardware)")
            ->each([&](const std::string&) { threads_set = true; });
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);
    const std::string mode = app.get_subcommands().front()->get_name();
    return run_mode(mode, config_path, out_dir, threads, threads_set, seed, seed_set);
}
