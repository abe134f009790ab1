#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/agents/agent.hpp"
#include "weaver/collab/strategy.hpp"

namespace weaver {

enum class Provenance { Builtin, Mined, Reflected };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

/// A named coordination strategy over a subset of the worker agents,
/// callable as a single action.
struct CollaborationModule {
    ActionId id;
    std::string name;
    std::set<std::string> members;
    Strategy strategy;
    Provenance provenance = Provenance::Builtin;

    // members are derived from the strategy's leaves.
    static CollaborationModule make(std::string name, Strategy strategy, Provenance provenance);
};

std::string structural_signature(const Strategy& strategy);

/// The expanded action space: agents, modules, and finish.
class ModuleRegistry {
public:
    void add_agent(WorkerAgent agent);

    // Throws DuplicateAction on a name or signature clash and UnknownAction
    // when a member agent is not registered.
    void add_module(CollaborationModule module);
    // Returns false instead of throwing when the signature is already taken.
    bool try_add_module(CollaborationModule module);

    bool has_signature(std::string_view signature) const;
    std::optional<std::string> module_with_signature(std::string_view signature) const;

    bool contains(const ActionId& id) const;
    bool has_agent(std::string_view name) const;
    bool has_module(std::string_view name) const;
    const WorkerAgent& agent(std::string_view name) const;
    const CollaborationModule& module(std::string_view name) const;
    // Agent or module id for a bare name; "finish" resolves to finish.
    ActionId resolve(std::string_view name) const;

    const std::vector<WorkerAgent>& agents() const { return agents_; }
    const std::vector<CollaborationModule>& modules() const { return modules_; }

    // Agents, then modules, in registration order, then finish.
    std::vector<ActionId> action_space() const;

private:
    void check_name_free(const std::string& name) const;

    std::vector<WorkerAgent> agents_;
    std::vector<CollaborationModule> modules_;
    std::map<std::string, std::size_t, std::less<>> agent_index_;
    std::map<std::string, std::size_t, std::less<>> module_index_;
    std::map<std::string, std::string, std::less<>> signatures_;
};

}  // namespace weaver
