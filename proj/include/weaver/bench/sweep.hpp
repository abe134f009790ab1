#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "weaver/bench/config.hpp"
#include "weaver/orchestrator/run.hpp"
#include "weaver/reflection/selfplay.hpp"

namespace weaver {

struct SweepSpec {
    std::vector<Method> methods;
    std::vector<Money> budgets;
    std::vector<std::uint64_t> seeds{0};
    // Supplying both skips self-play; the prior is then fitted from
    // `store` when given, else left at its smoothed uniform start.
    std::optional<CostProfile> profile;
    std::optional<std::vector<CollaborationModule>> modules;
    std::optional<TrajectoryStore> store;

    void validate() const;
};

struct CellResult {
    Method method = Method::ReactPlain;
    Money budget;
    std::uint64_t seed = 0;
    std::vector<RunResult> runs;  // scored tasks, in task-file order
};

struct SeedArtifacts {
    std::uint64_t seed = 0;
    std::optional<SelfPlayResult> selfplay;
    std::vector<std::string> registry_modules;  // modules offered to module methods
};

struct SweepResult {
    std::vector<std::string> validation_ids;
    std::vector<std::string> scored_ids;
    // Ordered seed-major, then method, then budget, as given in the spec.
    std::vector<CellResult> cells;
    std::vector<SeedArtifacts> seeds;
    bool strict = true;
};

// Every (method, budget, seed, task) cell over the scored tasks. The first
// validation_size tasks are held out from scoring for every method and, when
// a module method is present, feed self-play first. Serial mode is the
// reference; parallel mode spreads cells over OpenMP threads and returns the
// same result.
SweepResult run_sweep(const std::vector<Task>& tasks, const SweepSpec& spec, const WeaverConfig& config,
                      ExecMode mode = ExecMode::Parallel);

// logs/<method>_b<budget>_s<seed>.jsonl plus, per seed with self-play,
// selfplay_s<seed>/{trajectories.jsonl, cost_profile.json, modules.json}.
void persist_sweep(const SweepResult& sweep, const std::filesystem::path& out_dir);

std::string log_file_name(Method method, Money budget, std::uint64_t seed);

}  // namespace weaver
