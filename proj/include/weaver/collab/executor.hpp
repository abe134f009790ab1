#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "weaver/agents/agent.hpp"
#include "weaver/collab/module.hpp"
#include "weaver/core/ledger.hpp"
#include "weaver/core/pricing.hpp"

namespace weaver {

struct ExecutionResult {
    std::string output;
    TokenUsage usage;
    Money dollars;
    // One record per worker invocation, in tree order (branch order for
    // ensembles), independent of thread scheduling.
    std::vector<CostRecord> records;

    CostRecord combined() const;
};

struct ExecutorOptions {
    bool concurrent_branches = true;
};

/// Runs agents and collaboration modules, charging every worker invocation
/// to the ledger as its own record.
class ModuleExecutor {
public:
    ModuleExecutor(const ModuleRegistry& registry, AgentBackend& backend, const PriceSheet& prices,
                   ExecutorOptions options = {});

    ExecutionResult invoke_agent(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx,
                                 CostLedger& ledger) const;
    ExecutionResult execute(const Strategy& strategy, std::string_view subtask, const CallContext& ctx,
                            CostLedger& ledger) const;
    ExecutionResult execute_module(const CollaborationModule& module, std::string_view subtask, const CallContext& ctx,
                                   CostLedger& ledger) const;
    // Agent or module action; finish is not executable here.
    ExecutionResult execute_action(const Action& action, const CallContext& ctx, CostLedger& ledger) const;

    const ModuleRegistry& registry() const { return registry_; }

private:
    ExecutionResult run_pipeline(const strategy_node::Pipeline& node, std::string_view subtask, const CallContext& ctx,
                                 CostLedger& ledger) const;
    ExecutionResult run_interactive(const strategy_node::Interactive& node, std::string_view subtask,
                                    const CallContext& ctx, CostLedger& ledger) const;
    ExecutionResult run_ensemble(const strategy_node::Ensemble& node, std::string_view subtask, const CallContext& ctx,
                                 CostLedger& ledger) const;

    const ModuleRegistry& registry_;
    AgentBackend& backend_;
    const PriceSheet& prices_;
    ExecutorOptions options_;
};

// Zero-cost majority vote over branch outputs: the modal "answer:" line
// (or whole output when a branch has none) wins; ties go to the
// lexicographically smallest candidate.
std::string majority_vote(const std::vector<std::string>& branch_outputs);

std::string aggregation_prompt(const std::vector<std::string>& sorted_branch_outputs);

}  // namespace weaver
