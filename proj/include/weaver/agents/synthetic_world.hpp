#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weaver/agents/agent.hpp"
#include "weaver/core/random.hpp"

namespace weaver {

struct LogNormalSpec {
    double mu = 0.0;
    double sigma = 0.0;
};

struct RoleTokenModel {
    LogNormalSpec input;
    LogNormalSpec output;
    // Extra input tokens per prior output visible in the context.
    double input_per_context_item = 0.0;
};

/// Knobs of the seeded multi-hop retrieval world.
struct WorldParams {
    double p_hit = 0.5;                // one search surfaces the next hop
    double p_reason = 0.7;             // reasoner answers correctly from a full chain
    double p_orchestrator_answer = 0.5;  // orchestrator answers unaided from a full chain
    double critic_search_exponent = 2.0;  // a critic hint acts like this many searches
    std::int64_t num_docs = 100000;
    int min_hops = 1;
    int max_hops = 3;
    int top_k = 5;

    RoleTokenModel searcher;
    RoleTokenModel reader;  // output is drawn once per document read
    RoleTokenModel reasoner;
    RoleTokenModel critic;
    RoleTokenModel orchestrator;

    static WorldParams defaults();
    const RoleTokenModel& tokens(Role role) const;
};

struct WorldTask {
    std::string id;
    std::vector<std::string> chain;
    std::string answer;
};

/// Deterministic stand-in for a retrieval benchmark.
///
/// Each task hides a chain of documents; the answer sits behind the last
/// hop. Searchers surface the next hop with probability p_hit, readers
/// reveal document payloads, reasoners turn a complete chain into the right
/// answer with probability p_reason. Every draw is keyed on
/// (seed, task, agent, call path), so replays are byte-identical and
/// concurrent callers cannot perturb each other.
class SyntheticWorld final : public AgentBackend {
public:
    SyntheticWorld(std::uint64_t seed, WorldParams params);

    // Chain taken from meta["chain"] ("d1 d2 ...") when present, otherwise
    // derived from the seed and task id.
    void add_task(const Task& task);
    void add_tasks(std::span<const Task> tasks);
    WorldTask world_task(const Task& task) const;

    static std::vector<Task> generate_tasks(std::uint64_t seed, std::size_t count, const WorldParams& params);

    InvocationResult invoke(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx) override;

    // Token draw for one orchestrator call producing `output_multiplier`
    // proposals. Not a worker invocation; counters are untouched.
    TokenUsage orchestrator_usage(const CallContext& ctx, std::int64_t output_multiplier) const;

    // The orchestrator's own answer from the evidence in the history.
    std::string synthesize_answer(const CallContext& ctx) const;

    std::uint64_t invocation_count() const { return total_invocations_.load(); }
    std::uint64_t invocation_count(std::string_view agent) const;

    std::uint64_t seed() const { return seed_; }
    const WorldParams& params() const { return params_; }

private:
    std::string search(const WorldTask& task, std::string_view subtask, const CallContext& ctx, Rng& rng) const;
    std::string read(const WorldTask& task, std::string_view subtask, const CallContext& ctx, Rng& rng,
                     std::size_t& docs_read) const;
    std::string reason(const WorldTask& task, const CallContext& ctx, Rng& rng) const;
    std::string critique(const WorldTask& task, const CallContext& ctx) const;
    std::string aggregate(const WorldTask& task, std::string_view subtask, const CallContext& ctx, Rng& rng) const;
    std::string wrong_answer(Rng& rng) const;
    std::string doc_payload(const WorldTask& task, std::size_t hop_index) const;
    std::uint64_t stream_key(const WorldTask& task, std::string_view who, const CallContext& ctx) const;

    std::uint64_t seed_;
    WorldParams params_;
    std::map<std::string, WorldTask, std::less<>> tasks_;
    mutable std::mutex count_mutex_;
    std::map<std::string, std::uint64_t, std::less<>> counts_;
    std::atomic<std::uint64_t> total_invocations_{0};
};

}  // namespace weaver
