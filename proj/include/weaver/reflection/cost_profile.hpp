#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include <json.hpp>

#include "weaver/core/money.hpp"
#include "weaver/core/types.hpp"

namespace weaver {

class TrajectoryStore;
class ModuleRegistry;

/// Running statistics for one action id. The exact mean is sum / count;
/// mean() is that quotient rounded half-even to the nano-dollar.
struct CostStats {
    Money sum;
    std::int64_t count = 0;
    // True when the entry is a structural estimate rather than observed.
    bool estimated = false;

    Money mean() const;
    double stddev() const;  // sample standard deviation, 0 for count < 2

    // Welford accumulators over dollars as doubles, for stddev only.
    double running_mean = 0.0;
    double m2 = 0.0;
};

/// Mean dollar cost per action id, learned from logged trajectories.
class CostProfile {
public:
    void add(const ActionId& id, Money dollars);
    // Replaces the entry with a single sample of `mean`.
    void set_mean(const ActionId& id, Money mean, bool estimated = false);

    bool contains(const ActionId& id) const { return stats_.count(id) != 0; }
    const CostStats& at(const ActionId& id) const;  // MissingCostProfile
    Money mean(const ActionId& id) const { return at(id).mean(); }
    std::optional<Money> find_mean(const ActionId& id) const;

    const std::map<ActionId, CostStats>& entries() const { return stats_; }
    bool empty() const { return stats_.empty(); }
    std::size_t size() const { return stats_.size(); }

    // Every logged amount multiplied by k; means of single-sample entries
    // scale exactly.
    CostProfile scaled(std::int64_t k) const;

    // Table keyed by action id, sorted: [{"action_kind","action_name",
    // "mean_dollars","sample_count","sum_dollars","stddev_dollars","estimated"}].
    nlohmann::ordered_json to_json() const;
    static CostProfile from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static CostProfile load(const std::filesystem::path& path);

private:
    std::map<ActionId, CostStats> stats_;
};

// Per-id arithmetic mean over every logged step; EmptyStore on no records.
CostProfile estimate_costs(const TrajectoryStore& store);

// Adds structural estimates for registry actions the profile has never
// seen. A module is priced as one orchestrator call plus the worker share of
// each leaf invocation at its worst case (interactive: every round runs).
// The orchestrator share is taken from the finish entry, the only step that
// is pure orchestration. Agents without data get the mean of known agents.
void fill_structural_estimates(CostProfile& profile, const ModuleRegistry& registry);

}  // namespace weaver
