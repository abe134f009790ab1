#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weaver/collab/module.hpp"
#include "weaver/reflection/trajectory_store.hpp"

namespace weaver {

struct MinerOptions {
    double min_support = 0.5;  // fraction of successful trajectories
    int max_len = 4;
    std::string aggregator;    // used by mined ensembles
    int interactive_rounds = kDefaultInteractiveRounds;
};

struct MinedPattern {
    std::vector<ActionId> ids;
    std::size_t trajectories = 0;  // successful trajectories containing ids
    double support = 0.0;
    Strategy strategy;
    std::string signature;
    // Registry module (or earlier, higher-ranked pattern) with the same signature.
    std::optional<std::string> duplicate_of;

    double score() const { return support * static_cast<double>(ids.size()); }
};

struct MiningReport {
    std::size_t successful = 0;
    // Every frequent pattern, best first, duplicates included.
    std::vector<MinedPattern> frequent;
    // The novel ones as ready-to-register modules, best first.
    std::vector<CollaborationModule> novel;
};

// Contiguous action-id windows of length 2..max_len over successful
// trajectories (finish excluded). Each frequent window becomes a strategy:
// a run of one id is an ensemble, a strict a,b,a[,b] alternation is an
// interactive pair, anything else a pipeline. Module ids are inlined as
// their strategies. Ranked by support x length, then support, then
// signature.
MiningReport mine_patterns(const TrajectoryStore& store, const ModuleRegistry& registry, const MinerOptions& options);

std::vector<CollaborationModule> mine_modules(const TrajectoryStore& store, const ModuleRegistry& registry,
                                              const MinerOptions& options);

// Windows and their trajectory counts, by brute force; used as a test oracle
// and by the miner itself.
std::size_t count_support(const std::vector<std::vector<ActionId>>& trajectories, const std::vector<ActionId>& window);

Strategy abstract_pattern(const std::vector<ActionId>& ids, const ModuleRegistry& registry, const MinerOptions& options);

// Readable unique name for a mined strategy, e.g. mined_search_then_browse.
std::string mined_module_name(const Strategy& strategy, const ModuleRegistry& registry);

}  // namespace weaver
