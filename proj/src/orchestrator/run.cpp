#include "weaver/orchestrator/run.hpp"

#include <algorithm>
#include <map>

#include "weaver/agents/facts.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/grading.hpp"

namespace weaver {

namespace {

constexpr std::uint64_t kExecTag = 0x65786563;
constexpr std::uint64_t kSpeculateTag = 0x73706563;

struct MethodName {
    Method method;
    std::string_view name;
};

constexpr MethodName kMethodNames[] = {
    {Method::ReactPlain, "react"},
    {Method::ReactBestOfN, "react_best_of_n"},
    {Method::ReactIterVerify, "react_iterative_verification"},
    {Method::ModulesBudgetUnaware, "modules_budget_unaware"},
    {Method::ModulesBudgetPrompt, "modules_budget_prompt"},
    {Method::DualLevel, "dual_level"},
};

struct LoopOutcome {
    std::vector<HistoryEntry> history;
    std::optional<std::string> answer;
    bool finished = false;
    std::vector<PlanTrace> plans;
    std::optional<std::string> error;
};

CostRecord sum_since(const CostLedger& ledger, std::size_t mark, std::size_t skip_first) {
    auto entries = ledger.entries();
    CostRecord total;
    for (std::size_t i = mark + skip_first; i < entries.size(); ++i) total += entries[i];
    return total;
}

LoopOutcome run_loop(const Task& task, const RunConfig& cfg, RunEnv& env, CostLedger& ledger, std::uint64_t attempt,
                     bool plan, int t_max) {
    LoopOutcome out;
    ModuleExecutor exec(env.registry, env.backend, env.prices, env.executor);
    std::optional<DualLevelPlanner> planner;
    if (plan) {
        if (env.profile == nullptr) throw MissingCostProfile("dual-level planning needs a cost profile");
        planner.emplace(cfg.planner, *env.profile, env.speculator);
    }
    std::vector<SpeculativeTrajectory> carried;

    for (std::int64_t t = 0; t < t_max && ledger.remaining().is_positive(); ++t) {
        const std::uint64_t key = step_key(cfg.seed, task.id, attempt, t);
        const Money remaining = ledger.remaining();
        PolicyView view{&task, out.history, ledger.budget(), remaining, t, carried, key};
        const std::size_t mark = ledger.size();
        std::optional<Action> chosen;
        CostRecord planning;
        bool planning_charged = false;
        try {
            TokenUsage usage;
            const int k = plan ? cfg.planner.k : 1;
            CandidateSet cands = sample_candidates(env.policy, view, k, &usage);
            chosen = cands.candidates.front();
            if (cfg.meter_orchestrator_tokens) {
                planning = price_cost(usage, env.policy.model(), env.prices);
                ledger.charge(planning);
                planning_charged = true;
            }
            if (plan) {
                PlanStep ps = planner->evaluate(std::move(cands), remaining, mix_keys(key, kSpeculateTag));
                if (env.speculator != nullptr && cfg.meter_orchestrator_tokens && !cfg.planner.uniform_h) {
                    TokenUsage spec = env.speculator->last_usage();
                    if (spec.input_tokens > 0 || spec.output_tokens > 0) {
                        CostRecord rec = price_cost(spec, env.policy.model(), env.prices);
                        ledger.charge(rec);
                        planning += rec;
                    }
                }
                PlanTrace trace;
                trace.step = t;
                trace.candidates = ps.candidates.ids();
                trace.g = ps.g;
                trace.h = ps.h;
                trace.f = ps.f;
                for (const auto& s : ps.speculated) trace.speculated.push_back(s.size());
                for (const auto& s : ps.feasible) trace.feasible.push_back(s.size());
                trace.chosen = ps.chosen;
                out.plans.push_back(std::move(trace));
                chosen = ps.action();
                carried = std::move(ps.carried);
            }

            if (chosen->id.is_finish()) {
                HistoryEntry e{t, *chosen, chosen->subtask, CostRecord{}, planning, ledger.remaining()};
                out.history.push_back(std::move(e));
                out.answer = chosen->subtask;
                out.finished = true;
                break;
            }

            CallContext ctx;
            ctx.task = &task;
            ctx.history = out.history;
            ctx.path = mix_keys(key, kExecTag);
            ExecutionResult res = exec.execute_action(*chosen, ctx, ledger);
            HistoryEntry e{t, *chosen, std::move(res.output), res.combined(), planning, ledger.remaining()};
            out.history.push_back(std::move(e));
        } catch (const Error& err) {
            out.error = err.what();
            if (ledger.size() > mark && chosen) {
                CostRecord spent = sum_since(ledger, mark, planning_charged ? 1 : 0);
                HistoryEntry e{t, *chosen, std::string("error: ") + err.what(), spent, planning, ledger.remaining()};
                out.history.push_back(std::move(e));
            }
            break;
        }
    }
    return out;
}

// Appends the post-loop answer request. Charged only while budget remains,
// so spending never continues past the step that exhausted it.
void best_effort_answer(const Task& task, const RunConfig& cfg, RunEnv& env, CostLedger& ledger,
                        std::uint64_t attempt, LoopOutcome& loop) {
    const auto t = static_cast<std::int64_t>(loop.history.size());
    PolicyView view{&task, loop.history, ledger.budget(), ledger.remaining(), t, {},
                    step_key(cfg.seed, task.id, attempt, t)};
    try {
        AnswerProposal ap = env.policy.answer(view);
        CostRecord rec;
        if (cfg.meter_orchestrator_tokens && ledger.remaining().is_positive()) {
            rec = price_cost(ap.usage, env.policy.model(), env.prices);
            ledger.charge(rec);
        }
        std::string shown = ap.answer.empty() ? std::string("(none)") : ap.answer;
        loop.history.push_back(HistoryEntry{t, Action(ActionId::finish(), shown), ap.answer, CostRecord{}, rec,
                                            ledger.remaining()});
        if (!ap.answer.empty()) loop.answer = ap.answer;
    } catch (const Error& err) {
        if (!loop.error) loop.error = err.what();
    }
}

void finalize(RunResult& r, const Task& task, const CostLedger& ledger) {
    r.total_cost = ledger.total();
    r.overshoot = r.total_cost > ledger.budget();
    r.solved = r.final_answer && answers_match(*r.final_answer, task.answer);
}

RunResult blank_result(const Task& task, const RunConfig& cfg) {
    RunResult r;
    r.task_id = task.id;
    r.method = cfg.method;
    r.budget = cfg.budget;
    r.seed = cfg.seed;
    return r;
}

void append_history(RunResult& r, std::vector<HistoryEntry>& part) {
    for (auto& e : part) {
        e.step = static_cast<std::int64_t>(r.trajectory.size());
        r.trajectory.push_back(std::move(e));
    }
}

}  // namespace

std::string_view to_string(Method method) {
    for (const auto& m : kMethodNames)
        if (m.method == method) return m.name;
    return "react";
}

Method parse_method(std::string_view text) {
    for (const auto& m : kMethodNames)
        if (m.name == text) return m.method;
    throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = [] {
        std::vector<Method> v;
        for (const auto& m : kMethodNames) v.push_back(m.method);
        return v;
    }();
    return methods;
}

bool uses_modules(Method m) {
    return m == Method::ModulesBudgetUnaware || m == Method::ModulesBudgetPrompt || m == Method::DualLevel;
}

bool needs_cost_profile(Method m) { return m == Method::ModulesBudgetPrompt || m == Method::DualLevel; }

bool is_budget_aware(Method m) { return needs_cost_profile(m); }

void RunConfig::validate() const {
    if (!budget.is_positive()) throw InvalidArgument("run budget must be positive");
    if (t_max < 1) throw InvalidArgument("t_max must be >= 1");
    if (best_of_n < 1) throw InvalidArgument("best-of-N needs N >= 1");
    if (max_refinements < 0) throw InvalidArgument("max_refinements must be >= 0");
    if (planner.k < 1) throw InvalidArgument("planner K must be >= 1");
}

Money RunResult::step_sum() const {
    Money s;
    for (const auto& e : trajectory) s += e.total_dollars();
    return s;
}

std::uint64_t step_key(std::uint64_t seed, std::string_view task_id, std::uint64_t attempt, std::int64_t step) {
    return mix_keys(seed, fnv1a(task_id), attempt, static_cast<std::uint64_t>(step));
}

RunResult run_task(const Task& task, const RunConfig& config, RunEnv& env, CostLedger& ledger) {
    RunResult r = blank_result(task, config);
    r.attempts = 1;
    LoopOutcome loop;
    try {
        loop = run_loop(task, config, env, ledger, 0, config.method == Method::DualLevel, config.t_max);
    } catch (const Error& err) {
        loop.error = err.what();
    }
    r.steps = static_cast<std::int64_t>(loop.history.size());
    r.finished = loop.finished;
    if (!loop.finished) {
        best_effort_answer(task, config, env, ledger, 0, loop);
        r.best_effort = true;
        if (static_cast<std::int64_t>(loop.history.size()) > r.steps) r.best_effort_index = r.steps;
    }
    r.final_answer = loop.answer;
    r.plans = std::move(loop.plans);
    r.error = loop.error;
    append_history(r, loop.history);
    finalize(r, task, ledger);
    return r;
}

RunResult run_task(const Task& task, const RunConfig& config, RunEnv& env) {
    config.validate();
    CostLedger ledger(config.budget);
    return run_task(task, config, env, ledger);
}

std::string modal_answer(const std::vector<std::string>& answers) {
    if (answers.empty()) throw InvalidArgument("no answers to vote over");
    std::map<std::string, std::size_t> count;
    for (const auto& a : answers) ++count[normalize_answer(a)];
    std::size_t best = 0;
    for (std::size_t i = 1; i < answers.size(); ++i)
        if (count[normalize_answer(answers[i])] > count[normalize_answer(answers[best])]) best = i;
    return answers[best];
}

RunResult run_best_of_n(const Task& task, const RunConfig& config, RunEnv& env) {
    config.validate();
    CostLedger ledger(config.budget);
    RunResult r = blank_result(task, config);
    std::vector<std::string> completed;
    std::optional<LoopOutcome> first_unfinished;
    std::int64_t steps = 0;

    for (int a = 0; a < config.best_of_n && ledger.remaining().is_positive(); ++a) {
        ++r.attempts;
        LoopOutcome loop;
        try {
            loop = run_loop(task, config, env, ledger, static_cast<std::uint64_t>(a), false, config.t_max);
        } catch (const Error& err) {
            loop.error = err.what();
        }
        steps += static_cast<std::int64_t>(loop.history.size());
        if (loop.error && !r.error) r.error = loop.error;
        if (loop.finished && loop.answer) {
            completed.push_back(*loop.answer);
            append_history(r, loop.history);
        } else if (completed.empty() && !first_unfinished) {
            first_unfinished = std::move(loop);
            // Its steps are appended once the fallback answer is known.
            continue;
        } else {
            append_history(r, loop.history);
        }
    }
    r.steps = steps;

    if (!completed.empty()) {
        if (first_unfinished) {
            // An early unfinished attempt still spent budget; keep its steps.
            std::vector<HistoryEntry> tail = std::move(r.trajectory);
            r.trajectory.clear();
            append_history(r, first_unfinished->history);
            append_history(r, tail);
        }
        r.final_answer = modal_answer(completed);
        r.finished = true;
    } else if (first_unfinished) {
        std::vector<HistoryEntry> tail = std::move(r.trajectory);
        r.trajectory.clear();
        const std::size_t before = first_unfinished->history.size();
        best_effort_answer(task, config, env, ledger, 0, *first_unfinished);
        r.best_effort = true;
        r.final_answer = first_unfinished->answer;
        // The answer request happens last; keep the log chronological.
        std::vector<HistoryEntry> answer_entry(first_unfinished->history.begin() + static_cast<std::ptrdiff_t>(before),
                                               first_unfinished->history.end());
        first_unfinished->history.resize(before);
        append_history(r, first_unfinished->history);
        append_history(r, tail);
        if (!answer_entry.empty()) r.best_effort_index = static_cast<std::int64_t>(r.trajectory.size());
        append_history(r, answer_entry);
    }
    finalize(r, task, ledger);
    return r;
}

RunResult run_iterative_verification(const Task& task, const RunConfig& config, RunEnv& env) {
    config.validate();
    CostLedger ledger(config.budget);
    RunResult r = run_task(task, config, env, ledger);
    if (!r.final_answer) return r;

    const WorkerAgent* verifier = nullptr;
    for (Role want : {Role::Reasoner, Role::Critic}) {
        for (const auto& a : env.registry.agents())
            if (a.role == want) {
                verifier = &a;
                break;
            }
        if (verifier) break;
    }
    if (verifier == nullptr) return r;

    // One verification round: an orchestrator critique call plus the
    // verifier. Without a profile, the priciest step seen so far stands in.
    Money estimate;
    if (env.profile != nullptr && env.profile->contains(verifier->id)) {
        estimate = env.profile->mean(verifier->id);
    } else {
        for (const auto& e : r.trajectory) estimate = std::max(estimate, e.total_dollars());
    }

    ModuleExecutor exec(env.registry, env.backend, env.prices, env.executor);
    std::vector<std::string> answers{*r.final_answer};
    std::vector<HistoryEntry> history = r.trajectory;
    while (r.refinements < config.max_refinements && ledger.remaining().is_positive() &&
           ledger.remaining() >= estimate) {
        const auto t = static_cast<std::int64_t>(history.size());
        const std::uint64_t key = step_key(config.seed, task.id, 1, t);
        PolicyView view{&task, history, ledger.budget(), ledger.remaining(), t, {}, key};
        const std::size_t mark = ledger.size();
        Action check(verifier->id, "verify the proposed answer: " + answers.back());
        CostRecord planning;
        bool planning_charged = false;
        try {
            AnswerProposal critique = env.policy.answer(view);
            if (config.meter_orchestrator_tokens) {
                planning = price_cost(critique.usage, env.policy.model(), env.prices);
                ledger.charge(planning);
                planning_charged = true;
            }
            CallContext ctx;
            ctx.task = &task;
            ctx.history = history;
            ctx.path = mix_keys(key, kExecTag);
            ExecutionResult res = exec.execute_action(check, ctx, ledger);
            facts::WorldFacts f = facts::scan(res.output);
            std::string proposed = f.answers.empty() ? critique.answer : f.answers.back();
            history.push_back(HistoryEntry{t, check, std::move(res.output), res.combined(), planning,
                                           ledger.remaining()});
            if (!proposed.empty()) answers.push_back(proposed);
            ++r.refinements;
        } catch (const Error& err) {
            r.error = err.what();
            if (ledger.size() > mark) {
                CostRecord spent = sum_since(ledger, mark, planning_charged ? 1 : 0);
                history.push_back(HistoryEntry{t, check, std::string("error: ") + err.what(), spent, planning,
                                               ledger.remaining()});
            }
            break;
        }
    }
    r.trajectory = std::move(history);
    r.steps = static_cast<std::int64_t>(r.trajectory.size()) - (r.best_effort_index >= 0 ? 1 : 0);
    r.final_answer = modal_answer(answers);
    finalize(r, task, ledger);
    return r;
}

RunResult run_method(const Task& task, const RunConfig& config, RunEnv& env) {
    switch (config.method) {
        case Method::ReactBestOfN: return run_best_of_n(task, config, env);
        case Method::ReactIterVerify: return run_iterative_verification(task, config, env);
        default: return run_task(task, config, env);
    }
}

}  // namespace weaver
