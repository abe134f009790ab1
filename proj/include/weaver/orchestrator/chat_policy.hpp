#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "weaver/agents/chat_client.hpp"
#include "weaver/collab/module.hpp"
#include "weaver/planner/planner.hpp"
#include "weaver/planner/policy.hpp"
#include "weaver/reflection/cost_profile.hpp"

namespace weaver {

struct ChatPolicyOptions {
    std::string model = "claude-3-7-sonnet-latest";
    int max_tokens = 1024;
    // Extra requests when a reply has fewer than K parseable actions.
    int max_retries = 2;
    std::string system_prompt;  // empty: default_orchestrator_prompt()
};

std::string default_orchestrator_prompt();

// "ACTION <name>: <subtask>" lines, in order. Unknown names and empty
// subtasks are skipped.
std::vector<Action> parse_action_lines(std::string_view text, const ModuleRegistry& registry);

// "ANSWER: <text>"; the last such line wins. Empty when absent.
std::string parse_answer_line(std::string_view text);

/// Orchestrator backed by a chat model. With a cost profile the prompt
/// carries the budget block; without one it is budget-unaware.
class ChatPolicy final : public Policy {
public:
    ChatPolicy(const ChatClient& client, const ModuleRegistry& registry, const CostProfile* profile,
               ChatPolicyOptions options = {});

    Proposal propose(const PolicyView& view, int k) override;
    // Once the budget is gone no call is made; the latest answer found in
    // the history (possibly empty) is returned at zero usage.
    AnswerProposal answer(const PolicyView& view) override;
    std::string_view model() const override { return options_.model; }

    std::vector<ChatMessage> render(const PolicyView& view, int k) const;

private:
    std::string render_state(const PolicyView& view) const;

    const ChatClient& client_;
    const ModuleRegistry& registry_;
    const CostProfile* profile_;
    ChatPolicyOptions options_;
};

// "ROLLOUT <i>: a -> b -> finish" lines for candidate i (0-based).
// Unknown names drop the line; each rollout is forced to start with the
// candidate's id, cut at depth_limit, and priced from the profile.
std::vector<std::vector<SpeculativeTrajectory>> parse_rollout_lines(std::string_view text,
                                                                    const CandidateSet& candidates,
                                                                    const ModuleRegistry& registry,
                                                                    const CostProfile& profile, int depth_limit);

/// Speculator that asks the orchestrator model for symbolic continuations.
class ChatSpeculator final : public Speculator {
public:
    ChatSpeculator(const ChatClient& client, const ModuleRegistry& registry, const CostProfile& profile,
                   int n_rollouts, int depth_limit, ChatPolicyOptions options = {});

    std::vector<std::vector<SpeculativeTrajectory>> rollouts(const CandidateSet& candidates,
                                                             std::uint64_t key) override;
    TokenUsage last_usage() const override { return last_usage_; }

private:
    const ChatClient& client_;
    const ModuleRegistry& registry_;
    const CostProfile& profile_;
    int n_rollouts_;
    int depth_limit_;
    ChatPolicyOptions options_;
    TokenUsage last_usage_;
};

}  // namespace weaver
