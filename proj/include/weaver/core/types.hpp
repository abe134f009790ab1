#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/core/money.hpp"

namespace weaver {

enum class ActionKind { Agent, Module, Finish };

std::string_view to_string(ActionKind kind);
ActionKind parse_action_kind(std::string_view text);

inline constexpr std::string_view kFinishName = "finish";

/// Identifier of one element of the action space: a worker agent, a
/// collaboration module, or the reserved finish action.
struct ActionId {
    ActionKind kind = ActionKind::Agent;
    std::string name;

    static ActionId agent(std::string name) { return {ActionKind::Agent, std::move(name)}; }
    static ActionId module(std::string name) { return {ActionKind::Module, std::move(name)}; }
    static ActionId finish() { return {ActionKind::Finish, std::string(kFinishName)}; }

    bool is_finish() const { return kind == ActionKind::Finish; }

    friend auto operator<=>(const ActionId&, const ActionId&) = default;
    friend bool operator==(const ActionId&, const ActionId&) = default;
};

/// One orchestration decision: which agent or module to call and with what
/// subtask. For finish, the subtask carries the final answer.
struct Action {
    ActionId id;
    std::string subtask;

    Action() = default;
    Action(ActionId action_id, std::string sub);

    friend bool operator==(const Action&, const Action&) = default;
};

struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;

    TokenUsage& operator+=(const TokenUsage& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        return *this;
    }
    friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) { return a += b; }
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

inline constexpr std::string_view kMixedModel = "mixed";

/// Priced token usage. Adding records of different models yields the
/// pseudo-model "mixed"; dollars stay exact.
struct CostRecord {
    TokenUsage usage;
    std::string model;
    Money dollars;

    CostRecord& operator+=(const CostRecord& o);
    friend CostRecord operator+(CostRecord a, const CostRecord& b) { return a += b; }
    friend bool operator==(const CostRecord&, const CostRecord&) = default;
};

/// One executed step. `cost` is the action's own worker spend; `planning`
/// is the orchestrator/planner call that chose it (zero when unmetered).
struct HistoryEntry {
    std::int64_t step = 0;
    Action action;
    std::string output;
    CostRecord cost;
    CostRecord planning;
    Money remaining_after;

    Money total_dollars() const { return cost.dollars + planning.dollars; }
};

struct Task {
    std::string id;
    std::string question;
    std::string answer;
    std::map<std::string, std::string> meta;
};

}  // namespace weaver
