#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weaver/agents/agent.hpp"
#include "weaver/collab/module.hpp"
#include "weaver/core/pricing.hpp"
#include "weaver/planner/policy.hpp"
#include "weaver/reflection/cost_profile.hpp"
#include "weaver/reflection/miner.hpp"
#include "weaver/reflection/trajectory_store.hpp"

namespace weaver {

struct SelfPlayOptions {
    int rounds = 5;
    Money budget_per_task;
    int t_max = 20;
    bool meter_orchestrator_tokens = true;
    MinerOptions miner;
    // Tasks of one round run on OpenMP threads; the serial path is the
    // reference and produces the same store.
    bool parallel = true;
};

struct SelfPlayRound {
    int round = 0;
    std::size_t tasks = 0;
    std::size_t solved = 0;
    std::size_t failed = 0;  // runs that recorded an error
    std::optional<std::string> new_module;
};

struct SelfPlayResult {
    TrajectoryStore store;
    // Observed means plus structural estimates for anything never run.
    CostProfile profile;
    std::vector<CollaborationModule> new_modules;
    ModuleRegistry registry;
    std::vector<SelfPlayRound> rounds;
};

// Builds the budget-unaware orchestrator for the registry of a round.
using PolicyFactory = std::function<std::unique_ptr<Policy>(const ModuleRegistry&)>;

// Each round runs every task with the current registry, appends the
// trajectories, re-estimates costs over everything logged so far, and
// registers at most one mined module (the best novel pattern).
SelfPlayResult run_selfplay(std::span<const Task> tasks, const ModuleRegistry& registry, AgentBackend& backend,
                            const PriceSheet& prices, const PolicyFactory& make_policy,
                            const SelfPlayOptions& options, std::uint64_t seed);

}  // namespace weaver
