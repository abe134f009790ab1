#include "weaver/planner/policy.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

CandidateSet sample_candidates(Policy& policy, const PolicyView& view, int k, TokenUsage* usage) {
    if (k < 1) throw InvalidArgument("K must be >= 1");
    Proposal p = policy.propose(view, k);
    if (static_cast<int>(p.candidates.size()) != k)
        throw PolicyFailure("policy returned " + std::to_string(p.candidates.size()) + " candidates, expected " +
                            std::to_string(k));
    if (usage != nullptr) *usage = p.usage;
    return CandidateSet{view.step, std::move(p.candidates)};
}

}  // namespace weaver
