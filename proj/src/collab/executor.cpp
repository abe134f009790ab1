#include "weaver/collab/executor.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <optional>

#include "weaver/agents/facts.hpp"
#include "weaver/core/errors.hpp"

namespace weaver {

namespace sn = strategy_node;

namespace {

constexpr std::uint64_t kPipelineTag = 0x50;
constexpr std::uint64_t kInteractiveTag = 0x49;
constexpr std::uint64_t kEnsembleTag = 0x45;
constexpr std::uint64_t kAggregateTag = 0x41;

void absorb(ExecutionResult& into, ExecutionResult&& part) {
    into.usage += part.usage;
    into.dollars += part.dollars;
    for (auto& r : part.records) into.records.push_back(std::move(r));
}

std::string join_lines(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += '\n';
        out += p;
    }
    return out;
}

std::string answer_key(const std::string& output) {
    auto f = facts::scan(output);
    if (!f.answers.empty()) return f.answers.back();
    return output;
}

}  // namespace

CostRecord ExecutionResult::combined() const {
    CostRecord total;
    for (const auto& r : records) total += r;
    return total;
}

std::string majority_vote(const std::vector<std::string>& branch_outputs) {
    if (branch_outputs.empty()) throw InvalidArgument("majority vote over no branches");
    std::map<std::string, int> tally;
    for (const auto& o : branch_outputs) ++tally[answer_key(o)];
    auto best = tally.begin();
    for (auto it = tally.begin(); it != tally.end(); ++it)
        if (it->second > best->second) best = it;
    for (const auto& o : branch_outputs)
        if (answer_key(o) == best->first) {
            auto f = facts::scan(o);
            return f.answers.empty() ? o : facts::answer_line(best->first);
        }
    return branch_outputs.front();
}

std::string aggregation_prompt(const std::vector<std::string>& sorted_branch_outputs) {
    std::string s(facts::kAggregatePrefix);
    for (std::size_t i = 0; i < sorted_branch_outputs.size(); ++i) {
        s += "\n";
        s += sorted_branch_outputs[i];
    }
    return s;
}

ModuleExecutor::ModuleExecutor(const ModuleRegistry& registry, AgentBackend& backend, const PriceSheet& prices,
                               ExecutorOptions options)
    : registry_(registry), backend_(backend), prices_(prices), options_(options) {}

ExecutionResult ModuleExecutor::invoke_agent(const WorkerAgent& agent, std::string_view subtask,
                                             const CallContext& ctx, CostLedger& ledger) const {
    InvocationResult inv = backend_.invoke(agent, subtask, ctx);
    CostRecord rec = price_cost(inv.usage, agent.model, prices_);
    ledger.charge(rec);
    ExecutionResult res;
    res.output = std::move(inv.output);
    res.usage = inv.usage;
    res.dollars = rec.dollars;
    res.records.push_back(std::move(rec));
    return res;
}

ExecutionResult ModuleExecutor::execute(const Strategy& strategy, std::string_view subtask, const CallContext& ctx,
                                        CostLedger& ledger) const {
    const auto& node = strategy.node();
    if (auto* s = std::get_if<sn::Single>(&node)) return invoke_agent(registry_.agent(s->agent), subtask, ctx, ledger);
    if (auto* p = std::get_if<sn::Pipeline>(&node)) return run_pipeline(*p, subtask, ctx, ledger);
    if (auto* i = std::get_if<sn::Interactive>(&node)) return run_interactive(*i, subtask, ctx, ledger);
    return run_ensemble(std::get<sn::Ensemble>(node), subtask, ctx, ledger);
}

ExecutionResult ModuleExecutor::execute_module(const CollaborationModule& module, std::string_view subtask,
                                               const CallContext& ctx, CostLedger& ledger) const {
    for (const auto& m : module.members)
        if (!registry_.has_agent(m)) throw UnknownAction("module '" + module.name + "' member '" + m + "' not registered");
    return execute(module.strategy, subtask, ctx, ledger);
}

ExecutionResult ModuleExecutor::execute_action(const Action& action, const CallContext& ctx, CostLedger& ledger) const {
    switch (action.id.kind) {
        case ActionKind::Agent: return invoke_agent(registry_.agent(action.id.name), action.subtask, ctx, ledger);
        case ActionKind::Module:
            return execute_module(registry_.module(action.id.name), action.subtask, ctx, ledger);
        case ActionKind::Finish: break;
    }
    throw InvalidArgument("finish is handled by the orchestrator, not the executor");
}

ExecutionResult ModuleExecutor::run_pipeline(const sn::Pipeline& node, std::string_view subtask,
                                             const CallContext& ctx, CostLedger& ledger) const {
    ExecutionResult total;
    CallContext local = ctx;
    std::vector<std::string> outputs;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        ExecutionResult part = execute(node.children[i], subtask, local.child(kPipelineTag, i), ledger);
        local.local.push_back(part.output);
        outputs.push_back(part.output);
        absorb(total, std::move(part));
    }
    total.output = join_lines(outputs);
    return total;
}

ExecutionResult ModuleExecutor::run_interactive(const sn::Interactive& node, std::string_view subtask,
                                                const CallContext& ctx, CostLedger& ledger) const {
    ExecutionResult total;
    CallContext shared = ctx;
    std::vector<std::string> transcript;
    for (int round = 0; round < node.max_rounds; ++round) {
        bool done = false;
        for (int side = 0; side < 2 && !done; ++side) {
            const Strategy& who = side == 0 ? *node.left : *node.right;
            ExecutionResult part =
                execute(who, subtask, shared.child(kInteractiveTag, static_cast<std::uint64_t>(2 * round + side)), ledger);
            done = facts::starts_with_done(part.output);
            shared.local.push_back(part.output);
            transcript.push_back(part.output);
            absorb(total, std::move(part));
        }
        if (done) break;
    }
    total.output = join_lines(transcript);
    return total;
}

ExecutionResult ModuleExecutor::run_ensemble(const sn::Ensemble& node, std::string_view subtask,
                                             const CallContext& ctx, CostLedger& ledger) const {
    const auto n = static_cast<std::size_t>(node.n);
    std::vector<std::optional<ExecutionResult>> branches(n);
    std::vector<std::string> errors(n);

    auto run_branch = [&](std::size_t b) {
        try {
            branches[b] = execute(*node.child, subtask, ctx.child(kEnsembleTag, b), ledger);
        } catch (const Error& e) {
            errors[b] = e.what();
        }
    };

    if (options_.concurrent_branches && n > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(n);
        for (std::size_t b = 0; b < n; ++b) futures.push_back(std::async(std::launch::async, run_branch, b));
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t b = 0; b < n; ++b) run_branch(b);
    }

    ExecutionResult total;
    std::vector<std::string> outputs;
    for (std::size_t b = 0; b < n; ++b) {
        if (!branches[b]) continue;
        outputs.push_back(branches[b]->output);
        absorb(total, std::move(*branches[b]));
    }
    if (outputs.empty()) {
        std::string why;
        for (const auto& e : errors)
            if (!e.empty()) why = e;
        throw ModuleFailed("every ensemble branch failed: " + why);
    }
    std::sort(outputs.begin(), outputs.end());

    if (node.aggregator.kind == Aggregator::Kind::Vote) {
        total.output = majority_vote(outputs);
        return total;
    }
    ExecutionResult agg = invoke_agent(registry_.agent(node.aggregator.agent), aggregation_prompt(outputs),
                                       ctx.child(kAggregateTag, 0), ledger);
    total.output = agg.output;
    absorb(total, std::move(agg));
    return total;
}

}  // namespace weaver
