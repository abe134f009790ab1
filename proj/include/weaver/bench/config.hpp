#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "weaver/agents/agent.hpp"
#include "weaver/agents/synthetic_world.hpp"
#include "weaver/collab/catalog.hpp"
#include "weaver/core/pricing.hpp"
#include "weaver/orchestrator/rule_policy.hpp"
#include "weaver/planner/planner.hpp"

namespace weaver {

struct SelfPlaySettings {
    int rounds = 5;
    Money budget = Money::parse("0.5");
    std::size_t validation_size = 30;
    double min_support = 0.5;
    int max_len = 4;
};

struct OrchestratorSettings {
    int t_max = 20;
    bool meter_orchestrator_tokens = true;
    int best_of_n = 3;
    int max_refinements = 8;
};

struct PromptSettings {
    std::string orchestrator;                 // empty: built-in
    std::map<Role, std::string> roles;        // missing roles: built-in
    std::string reflection;                   // empty: built-in
};

struct ParallelSettings {
    bool enabled = true;
    int threads = 0;  // 0: OpenMP default
};

/// Everything a sweep, self-play run, or single run reads from the config
/// file. Every section and key is optional; see docs in README.
///
/// {
///   "benchmark": "gaia_like" | "browse_like",
///   "prices": {"<model>": {"input_per_1k": "0.003", "output_per_1k": "0.015"}},
///   "models": {"light": "...", "heavy": "..."},
///   "planner": {"k", "n_rollouts", "depth_limit", "smoothing", "weight_g", "weight_h",
///               "carry_boost", "uniform_h"},
///   "world": {"p_hit", "p_reason", "p_orchestrator_answer", "critic_search_exponent",
///             "num_docs", "min_hops", "max_hops", "top_k",
///             "tokens": {"<role>|orchestrator": {"input": [mu, sigma], "output": [mu, sigma],
///                                               "per_context_item": x}}},
///   "policy": {"patience", "gamma", "unaffordable_weight", "module_weight", "finish_weight",
///              "carry_boost", "model"},
///   "selfplay": {"rounds", "budget", "validation_size", "min_support", "max_len"},
///   "orchestrator": {"t_max", "meter_orchestrator_tokens", "best_of_n", "max_refinements"},
///   "prompts": {"orchestrator", "roles": {"<role>": "..."}, "reflection"},
///   "grading": {"strict"},
///   "parallelism": {"enabled", "threads"}
/// }
///
/// Dollar amounts may be strings ("0.003") or numbers; token means are in
/// log space as in the lognormal draw.
struct WeaverConfig {
    BenchmarkKind benchmark = BenchmarkKind::GaiaLike;
    PriceSheet prices = PriceSheet::bedrock_defaults();
    CatalogModels models;
    PlannerParams planner;
    WorldParams world = WorldParams::defaults();
    RulePolicyOptions policy;
    SelfPlaySettings selfplay;
    OrchestratorSettings orchestrator;
    PromptSettings prompts;
    bool strict_grading = true;
    ParallelSettings parallelism;
};

WeaverConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const WeaverConfig& config);
WeaverConfig load_config(const std::filesystem::path& path);

}  // namespace weaver
