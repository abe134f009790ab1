#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/collab/executor.hpp"
#include "weaver/collab/module.hpp"
#include "weaver/core/ledger.hpp"
#include "weaver/core/pricing.hpp"
#include "weaver/planner/planner.hpp"
#include "weaver/planner/policy.hpp"
#include "weaver/reflection/cost_profile.hpp"

namespace weaver {

enum class Method {
    ReactPlain,
    ReactBestOfN,
    ReactIterVerify,
    ModulesBudgetUnaware,
    ModulesBudgetPrompt,
    DualLevel,
};

// react, react_best_of_n, react_iterative_verification,
// modules_budget_unaware, modules_budget_prompt, dual_level
std::string_view to_string(Method method);
Method parse_method(std::string_view text);
const std::vector<Method>& all_methods();

bool uses_modules(Method method);
bool needs_cost_profile(Method method);
bool is_budget_aware(Method method);

struct RunConfig {
    Method method = Method::ReactPlain;
    Money budget;
    int t_max = 20;
    PlannerParams planner;
    bool meter_orchestrator_tokens = true;
    int best_of_n = 3;
    int max_refinements = 8;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Scores behind one dual-level decision, kept for the audit log.
struct PlanTrace {
    std::int64_t step = 0;
    std::vector<ActionId> candidates;
    std::vector<double> g;
    std::vector<double> h;
    std::vector<double> f;
    std::vector<std::size_t> speculated;
    std::vector<std::size_t> feasible;
    std::size_t chosen = 0;
};

struct RunResult {
    std::string task_id;
    Method method = Method::ReactPlain;
    Money budget;
    std::uint64_t seed = 0;
    std::optional<std::string> final_answer;
    bool solved = false;
    Money total_cost;
    bool overshoot = false;
    // Executed loop steps; the best-effort answer entry is not counted.
    std::int64_t steps = 0;
    bool finished = false;     // the policy emitted finish
    bool best_effort = false;  // answer came from the post-loop request
    // Trajectory index of the post-loop answer entry, -1 when absent.
    std::int64_t best_effort_index = -1;
    int attempts = 0;          // best-of-N attempts started
    int refinements = 0;       // verification rounds
    std::vector<HistoryEntry> trajectory;
    std::vector<PlanTrace> plans;
    std::optional<std::string> error;

    Money step_sum() const;
};

/// Everything a run needs besides the task and its config.
struct RunEnv {
    const ModuleRegistry& registry;
    AgentBackend& backend;
    const PriceSheet& prices;
    Policy& policy;
    const CostProfile* profile = nullptr;
    Speculator* speculator = nullptr;
    ExecutorOptions executor;
};

// Per-step key shared by every method: attempt 0 of any method draws the
// same streams at the same step.
std::uint64_t step_key(std::uint64_t seed, std::string_view task_id, std::uint64_t attempt, std::int64_t step);

// Dispatches on config.method.
RunResult run_method(const Task& task, const RunConfig& config, RunEnv& env);

// The main loop: plan (dual level) or ask the policy, execute, repeat while
// steps remain, budget remains, and finish has not been chosen.
RunResult run_task(const Task& task, const RunConfig& config, RunEnv& env);
// Runs into a caller-owned ledger; the ledger may already be spent.
RunResult run_task(const Task& task, const RunConfig& config, RunEnv& env, CostLedger& ledger);

// Up to N independent attempts on one ledger; modal answer of the attempts
// that finished (ties: earliest). If none finished, the first attempt's
// best-effort answer.
RunResult run_best_of_n(const Task& task, const RunConfig& config, RunEnv& env);

// One pass, then verification rounds while the remaining budget covers the
// estimated cost of one; the modal answer so far stands after each round.
RunResult run_iterative_verification(const Task& task, const RunConfig& config, RunEnv& env);

// Modal answer by normalized form; ties go to the earliest.
std::string modal_answer(const std::vector<std::string>& answers);

}  // namespace weaver
