#include "weaver/orchestrator/rule_policy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace {

constexpr std::uint64_t kProposeTag = 0x70726f70;
constexpr std::uint64_t kUsageTag = 0x75736167;
constexpr std::uint64_t kAnswerTag = 0x616e7377;

CallContext context_for(const PolicyView& view, std::uint64_t tag) {
    CallContext ctx;
    ctx.task = view.task;
    ctx.history = view.history;
    ctx.path = mix_keys(view.key, tag);
    return ctx;
}

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& d : ids) out += (out.empty() ? "" : " ") + d;
    return out;
}

}  // namespace

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Search: return "search";
        case Phase::Read: return "read";
        case Phase::Reason: return "reason";
        case Phase::Finish: return "finish";
    }
    return "search";
}

RulePolicy::RulePolicy(const ModuleRegistry& registry, const SyntheticWorld& world, const CostProfile* profile,
                       RulePolicyOptions options)
    : registry_(registry), world_(world), profile_(profile), options_(std::move(options)) {
    if (options_.patience < 1) throw InvalidArgument("policy patience must be >= 1");
    if (options_.gamma < 0 || options_.unaffordable_weight < 0 || options_.module_weight < 0 ||
        options_.finish_weight < 0 || options_.carry_boost < 0)
        throw InvalidArgument("policy weights must be non-negative");
}

facts::WorldFacts RulePolicy::evidence(const PolicyView& view) const {
    std::vector<std::string_view> outs;
    outs.reserve(view.history.size());
    for (const auto& h : view.history) outs.push_back(h.output);
    return facts::scan(outs);
}

Role RulePolicy::entry_role(const ActionId& id) const {
    if (id.kind == ActionKind::Agent) return registry_.agent(id.name).role;
    return registry_.agent(registry_.module(id.name).strategy.first_agent()).role;
}

std::optional<Money> RulePolicy::cost_of(const ActionId& id) const {
    if (profile_ == nullptr) return std::nullopt;
    return profile_->find_mean(id);
}

bool RulePolicy::affordable(const PolicyView& view, const ActionId& id) const {
    if (id.is_finish()) return true;
    auto c = cost_of(id);
    if (!c) return true;
    Money reserve = cost_of(ActionId::finish()).value_or(Money{});
    return *c + reserve <= view.remaining;
}

Phase RulePolicy::phase(const PolicyView& view) const {
    facts::WorldFacts f = evidence(view);
    if (!f.answers.empty()) return Phase::Finish;
    if (f.chain_complete()) return Phase::Reason;
    if (!options_.budget_aware && static_cast<int>(view.history.size()) >= options_.patience) return Phase::Reason;
    if (!f.candidate_lists.empty()) {
        const auto& latest = f.candidate_lists.back();
        bool unread = std::any_of(latest.begin(), latest.end(),
                                  [&](const std::string& d) { return f.docs_read.count(d) == 0; });
        if (unread) return Phase::Read;
    }
    return Phase::Search;
}

std::vector<Action> RulePolicy::options(const PolicyView& view) const {
    facts::WorldFacts f = evidence(view);
    const Phase ph = phase(view);
    const int next_hop = f.progress() + 1;
    const bool hinted = f.missing_hop && *f.missing_hop == next_hop;

    std::string search_task = "find the document for hop " + std::to_string(next_hop) + " of the chain";
    std::string read_task;
    if (!f.candidate_lists.empty()) {
        std::vector<std::string> unread;
        for (const auto& d : f.candidate_lists.back())
            if (f.docs_read.count(d) == 0) unread.push_back(d);
        read_task = "read " + join_ids(unread);
    }
    const std::string reason_task = "answer the question from the evidence gathered so far";

    auto wanted = [&](Role role) {
        switch (ph) {
            case Phase::Search: return role == Role::Searcher || (role == Role::Critic && !hinted);
            case Phase::Read: return role == Role::Reader;
            case Phase::Reason: return role == Role::Reasoner;
            case Phase::Finish: return false;
        }
        return false;
    };
    auto subtask_for = [&](Role role) -> const std::string& {
        if (role == Role::Reader) return read_task;
        if (role == Role::Reasoner) return reason_task;
        return search_task;
    };

    std::vector<Action> out;
    for (const auto& a : registry_.agents())
        if (wanted(a.role)) out.emplace_back(a.id, subtask_for(a.role));
    if (options_.use_modules)
        for (const auto& m : registry_.modules()) {
            Role r = entry_role(m.id);
            if (wanted(r)) out.emplace_back(m.id, subtask_for(r));
        }
    if (options_.budget_aware) {
        std::erase_if(out, [&](const Action& a) {
            return options_.unaffordable_weight <= 0.0 && !affordable(view, a.id);
        });
    }
    if (ph == Phase::Reason || ph == Phase::Finish || out.empty()) out.emplace_back(ActionId::finish(), "pending");
    return out;
}

std::vector<double> RulePolicy::weights(const PolicyView& view, const std::vector<Action>& opts) const {
    std::vector<double> w(opts.size(), 1.0);
    if (options_.budget_aware) {
        std::optional<Money> cheapest;
        for (const auto& o : opts)
            if (auto c = cost_of(o.id); c && c->is_positive() && affordable(view, o.id))
                if (!cheapest || *c < *cheapest) cheapest = c;
        for (std::size_t i = 0; i < opts.size(); ++i) {
            if (!affordable(view, opts[i].id)) {
                w[i] = options_.unaffordable_weight;
                continue;
            }
            auto c = cost_of(opts[i].id);
            if (c && cheapest && c->is_positive())
                w[i] = std::pow(c->to_double() / cheapest->to_double(), options_.gamma);
        }
    } else {
        for (std::size_t i = 0; i < opts.size(); ++i) {
            switch (opts[i].id.kind) {
                case ActionKind::Agent: w[i] = 1.0; break;
                case ActionKind::Module: w[i] = options_.module_weight; break;
                case ActionKind::Finish: w[i] = options_.finish_weight; break;
            }
        }
    }
    if (!view.carried.empty() && options_.carry_boost > 0.0) {
        std::map<ActionId, std::size_t> seen;
        std::size_t total = 0;
        for (const auto& t : view.carried)
            for (const auto& id : t.actions) {
                ++seen[id];
                ++total;
            }
        for (std::size_t i = 0; i < opts.size(); ++i) {
            auto it = seen.find(opts[i].id);
            if (it == seen.end() || total == 0) continue;
            w[i] *= 1.0 + options_.carry_boost * static_cast<double>(it->second) / static_cast<double>(total);
        }
    }
    return w;
}

std::string RulePolicy::best_answer(const PolicyView& view, const facts::WorldFacts& f) const {
    if (!f.answers.empty()) return f.answers.back();
    return world_.synthesize_answer(context_for(view, kAnswerTag));
}

Proposal RulePolicy::propose(const PolicyView& view, int k) {
    if (view.task == nullptr) throw InvalidArgument("policy needs a task");
    if (k < 1) throw InvalidArgument("K must be >= 1");
    auto opts = options(view);
    auto w = weights(view, opts);

    Proposal p;
    Rng rng(mix_keys(view.key, kProposeTag));
    std::optional<std::string> final_answer;
    for (int i = 0; i < k; ++i) {
        Action a = opts[rng.categorical(w)];
        if (a.id.is_finish()) {
            if (!final_answer) final_answer = best_answer(view, evidence(view));
            a.subtask = *final_answer;
        }
        p.candidates.push_back(std::move(a));
    }
    p.usage = world_.orchestrator_usage(context_for(view, kUsageTag), k);
    return p;
}

AnswerProposal RulePolicy::answer(const PolicyView& view) {
    if (view.task == nullptr) throw InvalidArgument("policy needs a task");
    AnswerProposal a;
    a.answer = best_answer(view, evidence(view));
    a.usage = world_.orchestrator_usage(context_for(view, kUsageTag), 1);
    return a;
}

}  // namespace weaver
