// pshlab: run experiment campaigns from a JSON config.
//
//   pshlab run --config <path> [--resolution N] [--seed S] [--out PREFIX]
//   pshlab list-scenarios
//
// Exit codes: 0 all hard checks hold, 1 a hard check failed, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pshlab/experiment.hpp"

namespace {

constexpr int kUsage = 2;

int run(const std::string& config_path, std::optional<int> resolution, std::optional<long long> seed,
        std::optional<std::string> out, bool quiet) {
    pshlab::ExperimentConfig cfg;
    try {
        cfg = pshlab::load_config(config_path);
    } catch (const pshlab::ConfigError& e) {
        std::cerr << "usage error: " << config_path << ": " << e.what() << "\n";
        return kUsage;
    }
    if (resolution) {
        if (*resolution < 16) {
            std::cerr << "usage error: --resolution must be >= 16\n";
            return kUsage;
        }
        cfg.resolution = *resolution;
    }
    if (seed) {
        if (*seed < 0) {
            std::cerr << "usage error: --seed must be >= 0\n";
            return kUsage;
        }
        cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (out) cfg.output = *out;

    const std::filesystem::path prefix(cfg.output);
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());

    pshlab::RunResult result;
    try {
        result = pshlab::run_experiment(cfg);
    } catch (const pshlab::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const pshlab::Error& e) {
        // failures outside the per-item loop, e.g. an empty corpus
        std::cerr << "error: " << pshlab::to_string(e.kind()) << ": " << e.what() << "\n";
        return 1;
    }
    pshlab::write_outputs(result, cfg.output);
    if (!quiet) {
        std::printf("%s: %zu rows, %zu failed, %zu errors -> %s.csv\n", cfg.scenario.c_str(), result.table.rows().size(),
                    result.row_failures, result.row_errors, cfg.output.c_str());
        for (const auto& c : result.checks) {
            std::printf("  %s %s (%s)\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.detail.c_str());
        }
    }
    return result.hard_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pshlab experiment runner"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run the scenario described by a config file");
    std::string config;
    std::optional<int> resolution;
    std::optional<long long> seed;
    std::optional<std::string> out;
    bool quiet = false;
    run_cmd->add_option("--config", config, "JSON config file")->required();
    run_cmd->add_option("--resolution", resolution, "grid nodes per unit length (overrides the config)");
    run_cmd->add_option("--seed", seed, "master seed (overrides the config)");
    run_cmd->add_option("--out", out, "output path prefix (overrides the config)");
    run_cmd->add_flag("--quiet", quiet, "print nothing on success");

    app.add_subcommand("list-scenarios", "print every scenario with the inequality it checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    if (app.got_subcommand("list-scenarios")) {
        std::cout << pshlab::list_scenarios();
        return 0;
    }
    return run(config, resolution, seed, out, quiet);
}
