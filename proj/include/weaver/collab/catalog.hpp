#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "weaver/collab/module.hpp"

namespace weaver {

enum class BenchmarkKind { GaiaLike, BrowseLike };

std::string_view to_string(BenchmarkKind kind);
BenchmarkKind parse_benchmark(std::string_view text);

struct CatalogModels {
    std::string light = "claude-3-5-haiku-latest";
    std::string heavy = "claude-3-7-sonnet-latest";
};

// GaiaLike: search, browse (light) and reason (heavy).
// BrowseLike: search, read (light) and critic (heavy).
std::vector<WorkerAgent> builtin_agents(BenchmarkKind kind, const CatalogModels& models = {});

// Aggregator used for mined ensembles: the heavy agent of the benchmark.
std::string default_aggregator(BenchmarkKind kind);

std::vector<CollaborationModule> builtin_catalog(BenchmarkKind kind);

ModuleRegistry make_registry(BenchmarkKind kind, bool with_builtin_modules, const CatalogModels& models = {});

}  // namespace weaver
