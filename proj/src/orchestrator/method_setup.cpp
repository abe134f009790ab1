#include "weaver/orchestrator/method_setup.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

RulePolicyOptions rule_options_for(Method method, RulePolicyOptions base) {
    base.use_modules = uses_modules(method);
    base.budget_aware = is_budget_aware(method);
    return base;
}

TransitionPrior fit_prior(const TrajectoryStore& store, const ModuleRegistry& registry, double smoothing) {
    return TransitionPrior::fit(registry.action_space(), store.sequences(false), smoothing);
}

SimMethodRunner::SimMethodRunner(const RunConfig& config, const ModuleRegistry& registry, SyntheticWorld& world,
                                 const PriceSheet& prices, const CostProfile* profile, const TransitionPrior* prior,
                                 RulePolicyOptions base_options, ExecutorOptions executor)
    : config_(config),
      registry_(registry),
      world_(world),
      prices_(prices),
      profile_(needs_cost_profile(config.method) ? profile : nullptr),
      executor_(executor) {
    config_.validate();
    if (needs_cost_profile(config_.method) && profile_ == nullptr)
        throw MissingCostProfile(std::string(to_string(config_.method)) + " needs a cost profile");
    policy_ = std::make_unique<RulePolicy>(registry_, world_, profile_, rule_options_for(config_.method, base_options));
    if (config_.method == Method::DualLevel && !config_.planner.uniform_h) {
        if (prior == nullptr) throw InvalidArgument("dual_level needs a transition prior");
        require_costs(*prior, *profile_);
        speculator_ = std::make_unique<MarkovSpeculator>(*prior, *profile_, config_.planner.n_rollouts,
                                                         config_.planner.depth_limit, config_.planner.mode);
    }
}

RunResult SimMethodRunner::run(const Task& task) const {
    RunEnv env{registry_, world_, prices_, *policy_, profile_, speculator_.get(), executor_};
    return run_method(task, config_, env);
}

}  // namespace weaver
