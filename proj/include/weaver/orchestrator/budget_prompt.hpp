#pragma once

#include <string>

#include "weaver/core/money.hpp"
#include "weaver/reflection/cost_profile.hpp"

namespace weaver {

// Budget block injected into budget-aware orchestrator prompts:
//
//   Remaining budget: $0.1234
//   Estimated cost per action:
//     search (agent): $0.0012 over 40 runs
//     search_then_browse (module): $0.0051 (estimated)
//
// Entries appear in profile order. An empty profile renders the first line
// only. Output is a pure function of its inputs.
std::string render_budget_prompt(Money remaining, const CostProfile& profile);

}  // namespace weaver
