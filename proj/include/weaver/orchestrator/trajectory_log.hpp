#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "weaver/orchestrator/run.hpp"

namespace weaver {

// Line-delimited JSON, fields always in this order.
//
// Step record:
//   task_id, method, budget, seed, step, action_kind, action_name, subtask,
//   output_digest, input_tokens, output_tokens, dollars, remaining_after,
//   planner_input_tokens, planner_output_tokens, planner_dollars,
//   best_effort, plan (dual_level only: candidates, g, h, f, speculated,
//   feasible, chosen)
//
// Trailer record (one per run, after its steps):
//   task_id, method, budget, seed, trailer: true, final_answer, solved,
//   total_cost, overshoot, steps, error
//
// Dollar amounts are exact decimal strings; dollars + planner_dollars summed
// over a run's steps equals its total_cost.
void write_run_log(std::ostream& out, const RunResult& run);

struct LoggedStep {
    std::int64_t step = 0;
    ActionId action;
    std::string subtask;
    std::string output_digest;
    CostRecord cost;
    CostRecord planning;
    Money remaining_after;
    bool best_effort = false;
};

struct LoggedRun {
    std::string task_id;
    Method method = Method::ReactPlain;
    Money budget;
    std::uint64_t seed = 0;
    std::vector<LoggedStep> steps;
    std::optional<std::string> final_answer;
    bool solved = false;
    Money total_cost;
    bool overshoot = false;
    std::int64_t executed_steps = 0;
    std::optional<std::string> error;

    Money step_sum() const;
};

std::vector<LoggedRun> read_run_log(std::istream& in);
std::vector<LoggedRun> read_run_log(const std::filesystem::path& path);

}  // namespace weaver
