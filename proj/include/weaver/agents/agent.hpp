#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/core/types.hpp"

namespace weaver {

enum class Role { Searcher, Reader, Reasoner, Critic };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

struct WorkerAgent {
    ActionId id;
    Role role = Role::Searcher;
    std::string model;

    static WorkerAgent make(std::string name, Role role, std::string model) {
        return {ActionId::agent(std::move(name)), role, std::move(model)};
    }
};

struct InvocationResult {
    std::string output;
    TokenUsage usage;
};

/// What a worker sees when invoked: the task, the executed history, outputs
/// produced earlier inside the same module call, and a call-site key.
///
/// `path` identifies the call site (step, module-tree position, branch,
/// round). Backends that draw randomness key it on this value so concurrent
/// ensemble branches stay reproducible.
struct CallContext {
    const Task* task = nullptr;
    std::span<const HistoryEntry> history;
    std::vector<std::string> local;
    std::uint64_t path = 0;

    CallContext child(std::uint64_t tag, std::uint64_t index) const;

    // History outputs followed by module-local outputs.
    std::vector<std::string_view> outputs() const;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual InvocationResult invoke(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx) = 0;
};

}  // namespace weaver
