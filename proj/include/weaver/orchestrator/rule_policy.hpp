#pragma once

#include <string>
#include <vector>

#include "weaver/agents/facts.hpp"
#include "weaver/agents/synthetic_world.hpp"
#include "weaver/collab/module.hpp"
#include "weaver/planner/policy.hpp"
#include "weaver/reflection/cost_profile.hpp"

namespace weaver {

enum class Phase { Search, Read, Reason, Finish };

std::string_view to_string(Phase phase);

struct RulePolicyOptions {
    bool use_modules = true;
    bool budget_aware = false;
    // Budget-unaware policies stop looking for evidence after this many
    // steps and answer with what they have.
    int patience = 6;
    // Budget-aware weight of an affordable option: (cost / cheapest)^gamma.
    double gamma = 1.0;
    // Weight left on options whose cost plus the finish reserve exceeds the
    // remaining budget.
    double unaffordable_weight = 0.0;
    double module_weight = 1.0;
    double finish_weight = 1.0;
    // w * (1 + carry_boost * share) for ids seen in carried trajectories.
    double carry_boost = 1.0;
    std::string model = "claude-3-7-sonnet-latest";
};

/// Seeded stochastic orchestrator over the synthetic world.
///
/// The phase comes from the evidence in the history: search until the
/// latest candidate list has unread documents, read them, reason once the
/// chain is complete, finish once an answer exists. Within a phase the
/// policy draws one of the phase's actions; budget-aware policies weight
/// them by learned cost and drop what the remaining budget cannot cover.
class RulePolicy final : public Policy {
public:
    RulePolicy(const ModuleRegistry& registry, const SyntheticWorld& world, const CostProfile* profile,
               RulePolicyOptions options);

    Proposal propose(const PolicyView& view, int k) override;
    AnswerProposal answer(const PolicyView& view) override;
    std::string_view model() const override { return options_.model; }

    Phase phase(const PolicyView& view) const;
    // Phase options before weighting, in registry order; finish last.
    std::vector<Action> options(const PolicyView& view) const;
    std::vector<double> weights(const PolicyView& view, const std::vector<Action>& options) const;

    const RulePolicyOptions& settings() const { return options_; }

private:
    facts::WorldFacts evidence(const PolicyView& view) const;
    std::string best_answer(const PolicyView& view, const facts::WorldFacts& f) const;
    bool affordable(const PolicyView& view, const ActionId& id) const;
    std::optional<Money> cost_of(const ActionId& id) const;
    Role entry_role(const ActionId& id) const;

    const ModuleRegistry& registry_;
    const SyntheticWorld& world_;
    const CostProfile* profile_;
    RulePolicyOptions options_;
};

}  // namespace weaver
