#include "weaver/agents/synthetic_world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "weaver/agents/facts.hpp"
#include "weaver/core/errors.hpp"

namespace weaver {

namespace {

constexpr std::uint64_t kOrchestratorTag = 0x6f72636865737472ULL;

std::string hex_token(std::string_view prefix, std::uint64_t v, int width) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%0*llx", width, static_cast<unsigned long long>(v));
    return std::string(prefix) + buf;
}

std::int64_t draw_tokens(Rng& rng, const LogNormalSpec& spec) {
    return static_cast<std::int64_t>(std::llround(rng.lognormal(spec.mu, spec.sigma)));
}

std::vector<std::string> split_chain(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != ',') ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

bool valid_doc(std::string_view doc, std::int64_t num_docs) {
    if (doc.size() < 2 || doc[0] != 'd') return false;
    std::int64_t v = 0;
    for (std::size_t i = 1; i < doc.size(); ++i) {
        if (doc[i] < '0' || doc[i] > '9') return false;
        v = v * 10 + (doc[i] - '0');
        if (v >= num_docs) return false;
    }
    return true;
}

}  // namespace

WorldParams WorldParams::defaults() {
    WorldParams p;
    p.searcher = {{std::log(600.0), 0.25}, {std::log(350.0), 0.25}, 40.0};
    p.reader = {{std::log(400.0), 0.25}, {std::log(700.0), 0.30}, 20.0};
    p.reasoner = {{std::log(2500.0), 0.20}, {std::log(500.0), 0.30}, 150.0};
    p.critic = {{std::log(2000.0), 0.20}, {std::log(200.0), 0.25}, 120.0};
    p.orchestrator = {{std::log(2500.0), 0.15}, {std::log(250.0), 0.25}, 250.0};
    return p;
}

const RoleTokenModel& WorldParams::tokens(Role role) const {
    switch (role) {
        case Role::Searcher: return searcher;
        case Role::Reader: return reader;
        case Role::Reasoner: return reasoner;
        case Role::Critic: return critic;
    }
    return searcher;
}

SyntheticWorld::SyntheticWorld(std::uint64_t seed, WorldParams params) : seed_(seed), params_(std::move(params)) {
    if (params_.p_hit < 0 || params_.p_hit > 1 || params_.p_reason < 0 || params_.p_reason > 1 ||
        params_.p_orchestrator_answer < 0 || params_.p_orchestrator_answer > 1)
        throw InvalidArgument("world probabilities must lie in [0, 1]");
    if (params_.min_hops < 1 || params_.max_hops < params_.min_hops)
        throw InvalidArgument("world hop range must satisfy 1 <= min_hops <= max_hops");
    if (params_.top_k < 1) throw InvalidArgument("world top_k must be >= 1");
    if (params_.num_docs < params_.max_hops + params_.top_k + 1) throw InvalidArgument("world has too few documents");
}

WorldTask SyntheticWorld::world_task(const Task& task) const {
    if (auto it = tasks_.find(task.id); it != tasks_.end()) return it->second;
    WorldTask wt;
    wt.id = task.id;
    wt.answer = task.answer;
    if (auto it = task.meta.find("chain"); it != task.meta.end()) {
        wt.chain = split_chain(it->second);
        for (const auto& d : wt.chain)
            if (!valid_doc(d, params_.num_docs)) throw UnknownDocument("task " + task.id + " chain names unknown doc " + d);
    }
    if (wt.chain.empty()) {
        Rng rng(mix_keys(seed_, fnv1a("chain"), fnv1a(task.id)));
        int hops = static_cast<int>(rng.uniform_int(params_.min_hops, params_.max_hops));
        std::set<std::string> used;
        while (static_cast<int>(wt.chain.size()) < hops) {
            std::string d = "d" + std::to_string(rng.uniform_int(0, params_.num_docs - 1));
            if (used.insert(d).second) wt.chain.push_back(d);
        }
    }
    if (wt.answer.empty()) throw InvalidArgument("task " + task.id + " has no gold answer");
    return wt;
}

void SyntheticWorld::add_task(const Task& task) {
    WorldTask wt = world_task(task);
    tasks_.insert_or_assign(wt.id, std::move(wt));
}

void SyntheticWorld::add_tasks(std::span<const Task> tasks) {
    for (const auto& t : tasks) add_task(t);
}

std::vector<Task> SyntheticWorld::generate_tasks(std::uint64_t seed, std::size_t count, const WorldParams& params) {
    std::vector<Task> out;
    out.reserve(count);
    std::set<std::string> used;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(mix_keys(seed, fnv1a("task"), i));
        char id[32];
        std::snprintf(id, sizeof id, "t%04zu", i);
        Task t;
        t.id = id;
        int hops = static_cast<int>(rng.uniform_int(params.min_hops, params.max_hops));
        std::string chain;
        std::vector<std::string> docs;
        while (static_cast<int>(docs.size()) < hops) {
            std::string d = "d" + std::to_string(rng.uniform_int(0, params.num_docs - 1));
            if (used.insert(d).second) docs.push_back(d);
        }
        for (const auto& d : docs) chain += (chain.empty() ? "" : " ") + d;
        std::string entity = hex_token("e-", rng.next() & 0xffff, 4);
        t.answer = hex_token("ans-", rng.next() & 0xffffff, 6);
        t.question = "Starting from entity " + entity + ", follow " + std::to_string(hops) +
                     " linked document(s) and report the attribute named in the last one.";
        t.meta["chain"] = chain;
        t.meta["hops"] = std::to_string(hops);
        out.push_back(std::move(t));
    }
    return out;
}

std::uint64_t SyntheticWorld::stream_key(const WorldTask& task, std::string_view who, const CallContext& ctx) const {
    return mix_keys(seed_, fnv1a(task.id), fnv1a(who), ctx.path);
}

std::string SyntheticWorld::wrong_answer(Rng& rng) const { return hex_token("ans-x", rng.next() & 0xffffff, 6); }

std::string SyntheticWorld::doc_payload(const WorldTask& task, std::size_t hop_index) const {
    std::uint64_t h = mix_keys(seed_, fnv1a(task.id), hop_index);
    if (hop_index + 1 == task.chain.size()) return hex_token("evidence=e-", h & 0xffff, 4);
    return hex_token("next=e-", h & 0xffff, 4);
}

InvocationResult SyntheticWorld::invoke(const WorkerAgent& agent, std::string_view subtask, const CallContext& ctx) {
    if (ctx.task == nullptr) throw InvalidArgument("synthetic world invoked without a task");
    if (agent.id.kind != ActionKind::Agent) throw InvalidArgument("only agents can be invoked on a backend");
    WorldTask task = world_task(*ctx.task);
    Rng rng(stream_key(task, agent.id.name, ctx));
    const RoleTokenModel& tm = params_.tokens(agent.role);

    InvocationResult res;
    std::size_t output_units = 1;
    bool aggregating = subtask.starts_with(facts::kAggregatePrefix);
    if (aggregating) {
        res.output = aggregate(task, subtask, ctx, rng);
    } else {
        switch (agent.role) {
            case Role::Searcher: res.output = search(task, subtask, ctx, rng); break;
            case Role::Reader: res.output = read(task, subtask, ctx, rng, output_units); break;
            case Role::Reasoner: res.output = reason(task, ctx, rng); break;
            case Role::Critic: res.output = critique(task, ctx); break;
        }
    }

    std::size_t context_items = ctx.history.size() + ctx.local.size();
    res.usage.input_tokens = draw_tokens(rng, tm.input) +
                             static_cast<std::int64_t>(std::llround(tm.input_per_context_item * context_items)) +
                             static_cast<std::int64_t>(subtask.size() / 4);
    std::int64_t out = 0;
    for (std::size_t i = 0; i < std::max<std::size_t>(output_units, 1); ++i) out += draw_tokens(rng, tm.output);
    if (output_units == 0) out = std::max<std::int64_t>(1, out / 10);
    res.usage.output_tokens = out;

    {
        std::lock_guard lock(count_mutex_);
        ++counts_[agent.id.name];
    }
    total_invocations_.fetch_add(1);
    return res;
}

std::uint64_t SyntheticWorld::invocation_count(std::string_view agent) const {
    std::lock_guard lock(count_mutex_);
    auto it = counts_.find(agent);
    return it == counts_.end() ? 0 : it->second;
}

std::string SyntheticWorld::search(const WorldTask& task, std::string_view, const CallContext& ctx, Rng& rng) const {
    auto outs = ctx.outputs();
    facts::WorldFacts f = facts::scan(outs);
    int progress = f.progress();
    const int k = static_cast<int>(task.chain.size());
    double p = params_.p_hit;
    if (f.missing_hop && *f.missing_hop == progress + 1) p = 1.0 - std::pow(1.0 - p, params_.critic_search_exponent);

    std::vector<std::string> docs;
    std::set<std::string> taken(task.chain.begin(), task.chain.end());
    bool hit = progress < k && rng.bernoulli(p);
    while (static_cast<int>(docs.size()) < params_.top_k - (hit ? 1 : 0)) {
        std::string d = "d" + std::to_string(rng.uniform_int(0, params_.num_docs - 1));
        if (taken.insert(d).second) docs.push_back(d);
    }
    if (hit) {
        auto pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(docs.size())));
        docs.insert(docs.begin() + static_cast<std::ptrdiff_t>(pos), task.chain[static_cast<std::size_t>(progress)]);
    }
    return facts::candidates_line(docs);
}

std::string SyntheticWorld::read(const WorldTask& task, std::string_view subtask, const CallContext& ctx, Rng&,
                                 std::size_t& docs_read) const {
    auto outs = ctx.outputs();
    facts::WorldFacts f = facts::scan(outs);
    std::vector<std::string> ids = facts::doc_ids_in(subtask);
    if (ids.empty() && !f.candidate_lists.empty()) ids = f.candidate_lists.back();
    docs_read = ids.size();
    if (ids.empty()) return "no documents to read";

    std::string body;
    for (const auto& id : ids) {
        if (!valid_doc(id, params_.num_docs)) throw UnknownDocument("no document '" + id + "' in the world");
        auto it = std::find(task.chain.begin(), task.chain.end(), id);
        std::string line;
        if (it == task.chain.end()) {
            line = facts::irrelevant_line(id);
        } else {
            auto idx = static_cast<std::size_t>(it - task.chain.begin());
            line = facts::doc_line(id, static_cast<int>(idx) + 1, static_cast<int>(task.chain.size()),
                                   doc_payload(task, idx));
        }
        facts::scan_into(f, line);
        if (!body.empty()) body += '\n';
        body += line;
    }
    if (f.chain_complete()) return std::string(facts::kDoneMarker) + "\n" + body;
    return body;
}

std::string SyntheticWorld::reason(const WorldTask& task, const CallContext& ctx, Rng& rng) const {
    auto outs = ctx.outputs();
    facts::WorldFacts f = facts::scan(outs);
    bool complete = f.progress() >= static_cast<int>(task.chain.size());
    if (complete && rng.bernoulli(params_.p_reason)) return facts::answer_line(task.answer);
    return facts::answer_line(wrong_answer(rng));
}

std::string SyntheticWorld::critique(const WorldTask& task, const CallContext& ctx) const {
    auto outs = ctx.outputs();
    facts::WorldFacts f = facts::scan(outs);
    int progress = f.progress();
    if (progress >= static_cast<int>(task.chain.size())) return "complete";
    return facts::missing_line(progress + 1);
}

std::string SyntheticWorld::aggregate(const WorldTask& task, std::string_view subtask, const CallContext& ctx,
                                      Rng& rng) const {
    std::string_view branches = subtask.substr(facts::kAggregatePrefix.size());
    auto outs = ctx.outputs();
    facts::WorldFacts before = facts::scan(outs);
    facts::WorldFacts merged = facts::scan(branches);
    int progress = before.progress();
    const int k = static_cast<int>(task.chain.size());

    std::vector<std::string> lines;
    if (!merged.candidate_lists.empty()) {
        std::vector<std::string> pool;
        std::set<std::string> seen;
        for (const auto& list : merged.candidate_lists)
            for (const auto& d : list)
                if (seen.insert(d).second) pool.push_back(d);
        if (progress < k) {
            auto target = std::find(pool.begin(), pool.end(), task.chain[static_cast<std::size_t>(progress)]);
            if (target != pool.end()) std::rotate(pool.begin(), target, target + 1);
        }
        if (static_cast<int>(pool.size()) > params_.top_k) pool.resize(static_cast<std::size_t>(params_.top_k));
        lines.push_back(facts::candidates_line(pool));
    }
    for (const auto& [hop, doc] : merged.hop_docs) {
        if (hop < 1 || hop > k || task.chain[static_cast<std::size_t>(hop - 1)] != doc) continue;
        lines.push_back(facts::doc_line(doc, hop, k, doc_payload(task, static_cast<std::size_t>(hop - 1))));
    }
    if (!merged.answers.empty()) {
        std::map<std::string, int> tally;
        for (const auto& a : merged.answers) ++tally[a];
        std::string chosen;
        int n = static_cast<int>(merged.answers.size());
        for (const auto& [a, c] : tally)
            if (2 * c > n) chosen = a;
        if (chosen.empty()) {
            bool has_correct = tally.count(task.answer) != 0;
            chosen = (has_correct && rng.bernoulli(params_.p_reason)) ? task.answer : tally.begin()->first;
        }
        lines.push_back(facts::answer_line(chosen));
    }
    facts::WorldFacts all = before;
    facts::scan_into(all, branches);
    if (merged.critic_complete || merged.missing_hop) {
        lines.push_back(all.progress() >= k ? "complete" : facts::missing_line(all.progress() + 1));
    }
    if (lines.empty()) return "nothing to aggregate";
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += '\n';
        out += l;
    }
    return out;
}

TokenUsage SyntheticWorld::orchestrator_usage(const CallContext& ctx, std::int64_t output_multiplier) const {
    if (ctx.task == nullptr) throw InvalidArgument("orchestrator usage without a task");
    Rng rng(mix_keys(seed_, fnv1a(ctx.task->id), kOrchestratorTag, ctx.path));
    const RoleTokenModel& tm = params_.orchestrator;
    TokenUsage u;
    u.input_tokens = draw_tokens(rng, tm.input) +
                     static_cast<std::int64_t>(std::llround(tm.input_per_context_item * ctx.history.size()));
    for (std::int64_t i = 0; i < std::max<std::int64_t>(1, output_multiplier); ++i)
        u.output_tokens += draw_tokens(rng, tm.output);
    return u;
}

std::string SyntheticWorld::synthesize_answer(const CallContext& ctx) const {
    if (ctx.task == nullptr) throw InvalidArgument("answer synthesis without a task");
    WorldTask task = world_task(*ctx.task);
    Rng rng(mix_keys(seed_, fnv1a(task.id), fnv1a("synthesize"), ctx.path));
    auto outs = ctx.outputs();
    facts::WorldFacts f = facts::scan(outs);
    if (f.progress() >= static_cast<int>(task.chain.size()) && rng.bernoulli(params_.p_orchestrator_answer))
        return task.answer;
    return wrong_answer(rng);
}

}  // namespace weaver
