#include "weaver/orchestrator/budget_prompt.hpp"

namespace weaver {

std::string render_budget_prompt(Money remaining, const CostProfile& profile) {
    std::string out = "Remaining budget: $" + remaining.str() + "\n";
    if (profile.empty()) return out;
    out += "Estimated cost per action:\n";
    for (const auto& [id, stats] : profile.entries()) {
        out += "  " + id.name + " (" + std::string(to_string(id.kind)) + "): $" + stats.mean().str();
        if (stats.estimated)
            out += " (estimated)";
        else
            out += " over " + std::to_string(stats.count) + (stats.count == 1 ? " run" : " runs");
        out += '\n';
    }
    return out;
}

}  // namespace weaver
