#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "weaver/collab/module.hpp"

namespace weaver {

// Strategy trees serialize as nested tagged records:
//   {"type": "single", "agent": "search"}
//   {"type": "pipeline", "children": [...]}
//   {"type": "interactive", "left": {...}, "right": {...}, "max_rounds": 4}
//   {"type": "ensemble", "n": 3, "child": {...}, "aggregator": "reason" | "vote"}
nlohmann::ordered_json strategy_to_json(const Strategy& strategy);
Strategy strategy_from_json(const nlohmann::json& j);

// {"name", "provenance", "members", "strategy"}; members are checked
// against the strategy leaves on load.
nlohmann::ordered_json module_to_json(const CollaborationModule& module);
CollaborationModule module_from_json(const nlohmann::json& j);

void save_modules(const std::filesystem::path& path, const std::vector<CollaborationModule>& modules);
std::vector<CollaborationModule> load_modules(const std::filesystem::path& path);

}  // namespace weaver
