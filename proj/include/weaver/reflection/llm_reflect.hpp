#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "weaver/agents/chat_client.hpp"
#include "weaver/collab/module.hpp"
#include "weaver/reflection/trajectory_store.hpp"

namespace weaver {

struct ReflectOptions {
    // Slots: {few_shot_demonstrations}, {collected_collaboration_modules}.
    std::string prompt_template;  // empty: default_reflection_template()
    std::string model = "claude-3-7-sonnet-latest";
    int max_tokens = 2048;
    std::size_t max_demonstrations = 3;
    std::string default_aggregator;
};

struct ReflectResult {
    std::vector<CollaborationModule> modules;
    std::vector<std::string> diagnostics;
    TokenUsage usage;
};

std::string default_reflection_template();

// Successful trajectories as numbered action sequences, up to `limit`.
std::string render_demonstrations(const TrajectoryStore& store, std::size_t limit);
// One "name: expression" line per registered module.
std::string render_module_list(const ModuleRegistry& registry);

std::string render_reflection_prompt(std::string_view tmpl, const TrajectoryStore& store,
                                     const ModuleRegistry& registry, std::size_t max_demonstrations);

// "MODULE <name>: <expression>" lines. Lines that fail to parse, reference
// unknown agents, or repeat a known structure are dropped with a diagnostic.
ReflectResult parse_reflection(std::string_view reply, const ModuleRegistry& registry,
                               std::string_view default_aggregator);

ReflectResult llm_reflect(const TrajectoryStore& store, const ModuleRegistry& registry, const ChatClient& client,
                          const ReflectOptions& options = {});

}  // namespace weaver
