#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/core/types.hpp"
#include "weaver/planner/planner.hpp"

namespace weaver {

/// What the orchestrator sees when it decides.
struct PolicyView {
    const Task* task = nullptr;
    std::span<const HistoryEntry> history;
    Money budget;
    Money remaining;
    std::int64_t step = 0;
    // Feasible speculative trajectories carried from the previous step.
    std::span<const SpeculativeTrajectory> carried;
    // Per-step key; every random draw the policy makes derives from it.
    std::uint64_t key = 0;
};

struct Proposal {
    std::vector<Action> candidates;
    TokenUsage usage;  // orchestrator tokens spent producing them
};

struct AnswerProposal {
    std::string answer;
    TokenUsage usage;
};

/// The orchestrator policy pi: proposes actions from the history.
class Policy {
public:
    virtual ~Policy() = default;

    // k candidate actions in one orchestrator call.
    virtual Proposal propose(const PolicyView& view, int k) = 0;
    // Best-effort answer when the loop ends without finish.
    virtual AnswerProposal answer(const PolicyView& view) = 0;
    // Model whose prices apply to the usage above.
    virtual std::string_view model() const = 0;
};

// K candidates from the policy; PolicyFailure unless exactly K come back.
CandidateSet sample_candidates(Policy& policy, const PolicyView& view, int k, TokenUsage* usage = nullptr);

}  // namespace weaver
