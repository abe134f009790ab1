#pragma once

#include <memory>

#include "weaver/agents/synthetic_world.hpp"
#include "weaver/orchestrator/rule_policy.hpp"
#include "weaver/orchestrator/run.hpp"
#include "weaver/reflection/trajectory_store.hpp"

namespace weaver {

// Rule-policy settings for a method: react baselines see agents only,
// module methods see the full registry, and the two budget-aware methods
// weight options by the cost profile.
RulePolicyOptions rule_options_for(Method method, RulePolicyOptions base);

// Markov prior over the registry's action space from logged trajectories.
TransitionPrior fit_prior(const TrajectoryStore& store, const ModuleRegistry& registry, double smoothing);

/// One method wired to the synthetic world: policy, speculator, and the
/// run environment. run() is safe to call from several threads at once;
/// every task gets its own ledger.
class SimMethodRunner {
public:
    SimMethodRunner(const RunConfig& config, const ModuleRegistry& registry, SyntheticWorld& world,
                    const PriceSheet& prices, const CostProfile* profile, const TransitionPrior* prior,
                    RulePolicyOptions base_options, ExecutorOptions executor = {});

    RunResult run(const Task& task) const;

    const RunConfig& config() const { return config_; }
    const RulePolicy& policy() const { return *policy_; }

private:
    RunConfig config_;
    const ModuleRegistry& registry_;
    SyntheticWorld& world_;
    const PriceSheet& prices_;
    const CostProfile* profile_;
    std::unique_ptr<RulePolicy> policy_;
    std::unique_ptr<MarkovSpeculator> speculator_;
    ExecutorOptions executor_;
};

}  // namespace weaver
