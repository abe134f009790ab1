#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "weaver/agents/chat_client.hpp"
#include "weaver/agents/facts.hpp"
#include "weaver/agents/synthetic_world.hpp"
#include "weaver/collab/catalog.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/budget_prompt.hpp"
#include "weaver/orchestrator/chat_policy.hpp"
#include "weaver/orchestrator/grading.hpp"
#include "weaver/orchestrator/method_setup.hpp"
#include "weaver/orchestrator/rule_policy.hpp"
#include "weaver/orchestrator/run.hpp"
#include "weaver/orchestrator/trajectory_log.hpp"
#include "weaver/reflection/cost_profile.hpp"
#include "weaver/reflection/trajectory_store.hpp"

using namespace weaver;

namespace {

Money M(const char* s) { return Money::parse(s); }
ActionId A(const std::string& n) { return ActionId::agent(n); }
constexpr const char* kHeavy = "claude-3-7-sonnet-latest";

Task task_with_chain(const std::string& id, const std::string& chain) {
    Task t;
    t.id = id;
    t.question = "follow " + chain;
    t.answer = "ans-gold";
    t.meta["chain"] = chain;
    return t;
}

// Policy that replays a fixed script: the step's candidate list, and a
// finish answer drawn from a queue.
class ScriptedPolicy final : public Policy {
public:
    std::function<std::vector<Action>(const PolicyView&, int)> script;
    std::vector<std::string> finish_answers{"A"};
    TokenUsage usage{100, 10};
    TokenUsage finish_usage{100, 10};
    std::size_t finishes = 0;

    Proposal propose(const PolicyView& view, int k) override {
        Proposal p;
        p.candidates = script(view, k);
        bool fin = false;
        for (auto& c : p.candidates)
            if (c.id.is_finish()) {
                c.subtask = finish_answers[std::min(finishes, finish_answers.size() - 1)];
                fin = true;
            }
        if (fin) ++finishes;
        p.usage = fin ? finish_usage : usage;
        return p;
    }
    AnswerProposal answer(const PolicyView&) override { return {"best-effort", {50, 5}}; }
    std::string_view model() const override { return kHeavy; }
};

class ConfirmingBackend final : public AgentBackend {
public:
    InvocationResult invoke(const WorkerAgent&, std::string_view, const CallContext&) override {
        return {"answer: A", {200, 20}};
    }
};

struct Rig {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    PriceSheet prices = PriceSheet::bedrock_defaults();
    SyntheticWorld world;
    explicit Rig(WorldParams p = WorldParams::defaults(), std::uint64_t seed = 1) : world(seed, p) {}
};

CostProfile gaia_profile(const ModuleRegistry& reg) {
    CostProfile p;
    p.set_mean(A("search"), M("0.004"));
    p.set_mean(A("browse"), M("0.012"));
    p.set_mean(A("reason"), M("0.03"));
    p.set_mean(ActionId::finish(), M("0.002"));
    fill_structural_estimates(p, reg);
    return p;
}

TransitionPrior chain_prior(const ModuleRegistry& reg) {
    std::vector<std::vector<ActionId>> log{{A("search"), A("browse"), A("reason")},
                                           {ActionId::module("search_then_browse"), A("reason")}};
    return TransitionPrior::fit(reg.action_space(), log, 1.0);
}

// Budget guard and overshoot bound, checked against the ledger arithmetic.
void check_invariants(const RunResult& r) {
    ASSERT_EQ(r.total_cost, r.step_sum()) << r.task_id;
    ASSERT_EQ(r.overshoot, r.total_cost > r.budget);
    Money spent;
    Money last_remaining = r.budget;
    std::optional<std::size_t> crossed;
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        const auto& e = r.trajectory[i];
        const Money before = r.budget - spent;
        if (static_cast<std::int64_t>(i) != r.best_effort_index) ASSERT_TRUE(before.is_positive()) << r.task_id << " step " << i;
        spent += e.total_dollars();
        ASSERT_EQ(e.remaining_after, r.budget - spent);
        if (e.total_dollars().is_positive()) ASSERT_LT(e.remaining_after, last_remaining);
        last_remaining = e.remaining_after;
        if (!crossed && spent > r.budget) crossed = i;
    }
    if (r.overshoot) {
        ASSERT_TRUE(crossed);
        for (std::size_t i = *crossed + 1; i < r.trajectory.size(); ++i) ASSERT_TRUE(r.trajectory[i].total_dollars().is_zero());
        ASSERT_LE(r.total_cost - r.budget, r.trajectory[*crossed].total_dollars());
    }
}

}  // namespace

TEST(RunTask, SpentLedgerRunsZeroSteps) {
    Rig rig;
    Task t = task_with_chain("z", "d5");
    rig.world.add_task(t);
    RulePolicy policy(rig.reg, rig.world, nullptr, rule_options_for(Method::ReactPlain, {}));
    RunEnv env{rig.reg, rig.world, rig.prices, policy};
    RunConfig cfg;
    cfg.budget = M("0.01");
    CostLedger ledger(cfg.budget);
    ledger.charge({{}, "x", M("0.01")});
    RunResult r = run_task(t, cfg, env, ledger);
    EXPECT_EQ(r.steps, 0);
    EXPECT_EQ(r.trajectory.size(), 1u);
    EXPECT_TRUE(r.best_effort);
    EXPECT_EQ(r.best_effort_index, 0);
    EXPECT_FALSE(r.solved);
    EXPECT_TRUE(r.final_answer.has_value());
    EXPECT_EQ(r.total_cost, M("0.01"));
    EXPECT_EQ(rig.world.invocation_count(), 0u);
}

TEST(RunTask, CertainWorldSolvesChainOneQuickly) {
    WorldParams p = WorldParams::defaults();
    p.p_hit = p.p_reason = p.p_orchestrator_answer = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rig rig(p, seed);
        Task t = task_with_chain("c" + std::to_string(seed), "d42");
        rig.world.add_task(t);
        RulePolicyOptions o = rule_options_for(Method::ReactPlain, {});
        o.finish_weight = 1e9;
        ModuleRegistry agents_only = make_registry(BenchmarkKind::GaiaLike, false);
        RulePolicy policy(agents_only, rig.world, nullptr, o);
        RunEnv env{agents_only, rig.world, rig.prices, policy};
        RunConfig cfg;
        cfg.budget = M("1");
        cfg.seed = seed;
        RunResult r = run_task(t, cfg, env);
        EXPECT_TRUE(r.solved);
        EXPECT_TRUE(r.finished);
        EXPECT_LE(r.steps, 3);
        ASSERT_EQ(r.trajectory.size(), 3u);
        EXPECT_EQ(r.trajectory[0].action.id, A("search"));
        EXPECT_EQ(r.trajectory[1].action.id, A("browse"));
        EXPECT_TRUE(r.trajectory[2].action.id.is_finish());
    }
}

TEST(RunTask, DefaultWeightsReasonBeforeFinishing) {
    WorldParams p = WorldParams::defaults();
    p.p_hit = p.p_reason = p.p_orchestrator_answer = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rig rig(p, seed);
        Task t = task_with_chain("w" + std::to_string(seed), "d42");
        rig.world.add_task(t);
        ModuleRegistry agents_only = make_registry(BenchmarkKind::GaiaLike, false);
        RulePolicy policy(agents_only, rig.world, nullptr, rule_options_for(Method::ReactPlain, {}));
        RunEnv env{agents_only, rig.world, rig.prices, policy};
        RunConfig cfg;
        cfg.budget = M("1");
        cfg.seed = seed;
        RunResult r = run_task(t, cfg, env);
        EXPECT_TRUE(r.solved);
        EXPECT_LE(r.steps, 4);
    }
}

TEST(RunTask, DualLevelPicksTheOnlyModuleThatFits) {
    Rig rig;
    Task t = task_with_chain("m", "d7 d8");
    rig.world.add_task(t);
    const ActionId m = ActionId::module("ensemble_search");
    CostProfile profile;
    for (const auto& id : rig.reg.action_space()) profile.set_mean(id, M("0.5"));
    profile.set_mean(m, M("0.01"));
    profile.set_mean(ActionId::finish(), Money{});
    TransitionPrior prior(rig.reg.action_space());
    for (const auto& s : prior.states()) prior.set_row(s, {{ActionId::finish(), 1.0}});

    ScriptedPolicy policy;
    policy.script = [&](const PolicyView&, int k) {
        std::vector<Action> out(static_cast<std::size_t>(k - 1), Action(A("search"), "look"));
        out.emplace_back(m, "look wider");
        return out;
    };
    RunConfig cfg;
    cfg.method = Method::DualLevel;
    cfg.budget = M("0.1");
    cfg.t_max = 1;
    MarkovSpeculator spec(prior, profile, cfg.planner.n_rollouts, cfg.planner.depth_limit, ExecMode::Serial);
    RunEnv env{rig.reg, rig.world, rig.prices, policy, &profile, &spec};
    RunResult r = run_task(t, cfg, env);
    ASSERT_FALSE(r.plans.empty());
    EXPECT_EQ(r.plans[0].chosen, 2u);
    EXPECT_EQ(r.plans[0].feasible, (std::vector<std::size_t>{0, 0, 5}));
    EXPECT_EQ(r.trajectory[0].action.id, m);
}

TEST(RunTask, DualLevelNeedsAProfile) {
    Rig rig;
    Task t = task_with_chain("np", "d7");
    ScriptedPolicy policy;
    policy.script = [](const PolicyView&, int k) { return std::vector<Action>(static_cast<std::size_t>(k), Action(A("search"), "q")); };
    RunConfig cfg;
    cfg.method = Method::DualLevel;
    cfg.budget = M("0.1");
    RunEnv env{rig.reg, rig.world, rig.prices, policy};
    RunResult r = run_task(t, cfg, env);
    ASSERT_TRUE(r.error.has_value());
    EXPECT_FALSE(r.solved);
}

TEST(ModalAnswer, MajorityThenEarliest) {
    EXPECT_EQ(modal_answer({"A", "A", "B"}), "A");
    EXPECT_EQ(modal_answer({"B", "A"}), "B");
    EXPECT_EQ(modal_answer({"x", "Y.", "y"}), "Y.");
    EXPECT_THROW(modal_answer({}), InvalidArgument);
}

TEST(BestOfN, ModalAnswerOfAttempts) {
    Rig rig;
    Task t = task_with_chain("b", "d3");
    ScriptedPolicy policy;
    policy.finish_answers = {"A", "A", "B"};
    policy.script = [](const PolicyView&, int k) {
        return std::vector<Action>(static_cast<std::size_t>(k), Action(ActionId::finish(), "x"));
    };
    RunEnv env{rig.reg, rig.world, rig.prices, policy};
    RunConfig cfg;
    cfg.method = Method::ReactBestOfN;
    cfg.budget = M("1");
    RunResult r = run_best_of_n(t, cfg, env);
    EXPECT_EQ(r.attempts, 3);
    EXPECT_EQ(r.final_answer, "A");
    EXPECT_EQ(r.trajectory.size(), 3u);
}

TEST(BestOfN, ExhaustedAfterFirstAttempt) {
    Rig rig;
    Task t = task_with_chain("b1", "d3");
    ScriptedPolicy policy;
    policy.finish_answers = {"first", "second"};
    policy.finish_usage = {1'000'000, 0};  // $3 of orchestrator tokens
    policy.script = [](const PolicyView&, int k) {
        return std::vector<Action>(static_cast<std::size_t>(k), Action(ActionId::finish(), "x"));
    };
    RunEnv env{rig.reg, rig.world, rig.prices, policy};
    RunConfig cfg;
    cfg.method = Method::ReactBestOfN;
    cfg.budget = M("0.5");
    RunResult r = run_best_of_n(t, cfg, env);
    EXPECT_EQ(r.attempts, 1);
    EXPECT_EQ(r.final_answer, "first");
    EXPECT_TRUE(r.overshoot);
}

TEST(BestOfN, SingleAttemptMatchesPlainReact) {
    auto tasks = SyntheticWorld::generate_tasks(2, 15, WorldParams::defaults());
    Rig rig;
    rig.world.add_tasks(tasks);
    RulePolicy policy(rig.reg, rig.world, nullptr, rule_options_for(Method::ReactPlain, {}));
    RunEnv env{rig.reg, rig.world, rig.prices, policy};
    for (const auto& t : tasks) {
        RunConfig plain;
        plain.budget = M("0.3");
        plain.seed = 4;
        RunConfig bon = plain;
        bon.method = Method::ReactBestOfN;
        bon.best_of_n = 1;
        RunResult a = run_task(t, plain, env);
        RunResult b = run_best_of_n(t, bon, env);
        ASSERT_EQ(a.final_answer, b.final_answer);
        ASSERT_EQ(a.total_cost, b.total_cost);
        ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
        for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
            ASSERT_EQ(a.trajectory[i].action, b.trajectory[i].action);
            ASSERT_EQ(a.trajectory[i].output, b.trajectory[i].output);
        }
    }
}

TEST(IterVerify, NoLeftoverKeepsTheInitialAnswer) {
    Rig rig;
    Task t = task_with_chain("iv", "d3");
    ScriptedPolicy policy;
    policy.finish_answers = {"initial"};
    policy.finish_usage = {1'000'000, 0};
    policy.script = [](const PolicyView&, int k) {
        return std::vector<Action>(static_cast<std::size_t>(k), Action(ActionId::finish(), "x"));
    };
    RunEnv env{rig.reg, rig.world, rig.prices, policy};
    RunConfig cfg;
    cfg.method = Method::ReactIterVerify;
    cfg.budget = M("0.5");
    RunResult r = run_iterative_verification(t, cfg, env);
    EXPECT_EQ(r.refinements, 0);
    EXPECT_EQ(r.final_answer, "initial");
}

TEST(IterVerify, ConfirmingVerifierIsAFixedPoint) {
    Rig rig;
    ConfirmingBackend confirm;
    Task t = task_with_chain("fx", "d3");
    ScriptedPolicy policy;
    policy.script = [](const PolicyView&, int k) {
        return std::vector<Action>(static_cast<std::size_t>(k), Action(ActionId::finish(), "x"));
    };
    RunEnv env{rig.reg, confirm, rig.prices, policy};
    RunConfig cfg;
    cfg.method = Method::ReactIterVerify;
    cfg.budget = M("0.1");
    cfg.max_refinements = 100;
    RunResult r = run_iterative_verification(t, cfg, env);
    EXPECT_GT(r.refinements, 2);
    EXPECT_EQ(r.final_answer, "A");
    for (std::size_t i = 1; i < r.trajectory.size(); ++i) EXPECT_EQ(r.trajectory[i].output, "answer: A");
    check_invariants(r);
}

TEST(IterVerify, RefinementCountReplays) {
    auto tasks = SyntheticWorld::generate_tasks(6, 10, WorldParams::defaults());
    std::vector<int> first, second;
    for (int rep = 0; rep < 2; ++rep) {
        Rig rig;
        rig.world.add_tasks(tasks);
        RulePolicy policy(rig.reg, rig.world, nullptr, rule_options_for(Method::ReactIterVerify, {}));
        RunEnv env{rig.reg, rig.world, rig.prices, policy};
        for (const auto& t : tasks) {
            RunConfig cfg;
            cfg.method = Method::ReactIterVerify;
            cfg.budget = M("0.5");
            cfg.seed = 3;
            (rep == 0 ? first : second).push_back(run_iterative_verification(t, cfg, env).refinements);
        }
    }
    EXPECT_EQ(first, second);
    EXPECT_GT(*std::max_element(first.begin(), first.end()), 0);
}

TEST(BudgetPrompt, Examples) {
    CostProfile empty;
    EXPECT_EQ(render_budget_prompt(M("0.1234"), empty), "Remaining budget: $0.1234\n");
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    CostProfile p = gaia_profile(reg);
    std::string a = render_budget_prompt(M("0.1234"), p);
    EXPECT_NE(a.find("0.1234"), std::string::npos);
    EXPECT_NE(a.find("  search (agent): $0.0040 over 1 run\n"), std::string::npos);
    EXPECT_NE(a.find("search_then_browse (module): $0.0140 (estimated)"), std::string::npos);
    EXPECT_EQ(a, render_budget_prompt(M("0.1234"), p));
}

TEST(Grading, NormalizedMatch) {
    EXPECT_TRUE(answers_match("  Paris. ", "paris"));
    EXPECT_TRUE(answers_match("New   York", "new york"));
    EXPECT_FALSE(answers_match("Paris", "Lyon"));
}

TEST(RunProperty, InvariantsAcrossMethodsAndBudgets) {
    auto tasks = SyntheticWorld::generate_tasks(9, 25, WorldParams::defaults());
    Rig rig;
    rig.world.add_tasks(tasks);
    CostProfile profile = gaia_profile(rig.reg);
    TransitionPrior prior = chain_prior(rig.reg);
    for (Method m : all_methods())
        for (const char* b : {"0.02", "0.1", "0.3"}) {
            RunConfig cfg;
            cfg.method = m;
            cfg.budget = M(b);
            cfg.seed = 5;
            SimMethodRunner runner(cfg, rig.reg, rig.world, rig.prices, &profile, &prior, {});
            for (const auto& t : tasks) {
                RunResult r = runner.run(t);
                ASSERT_FALSE(r.error.has_value()) << *r.error;
                check_invariants(r);
                if (testing::Test::HasFatalFailure()) return;
            }
        }
}

TEST(RunProperty, DegenerateDualLevelMatchesBudgetPrompt) {
    auto tasks = SyntheticWorld::generate_tasks(10, 40, WorldParams::defaults());
    Rig rig;
    rig.world.add_tasks(tasks);
    CostProfile profile = gaia_profile(rig.reg);
    TransitionPrior prior = chain_prior(rig.reg);
    for (const char* b : {"0.05", "0.2", "0.5"}) {
        RunConfig prompt;
        prompt.method = Method::ModulesBudgetPrompt;
        prompt.budget = M(b);
        prompt.seed = 8;
        RunConfig dual = prompt;
        dual.method = Method::DualLevel;
        dual.planner.k = 1;
        dual.planner.uniform_h = true;
        SimMethodRunner a(prompt, rig.reg, rig.world, rig.prices, &profile, &prior, {});
        SimMethodRunner d(dual, rig.reg, rig.world, rig.prices, &profile, &prior, {});
        for (const auto& t : tasks) {
            RunResult ra = a.run(t), rd = d.run(t);
            ASSERT_EQ(ra.trajectory.size(), rd.trajectory.size()) << t.id;
            for (std::size_t i = 0; i < ra.trajectory.size(); ++i) {
                ASSERT_EQ(ra.trajectory[i].action, rd.trajectory[i].action);
                ASSERT_EQ(ra.trajectory[i].output, rd.trajectory[i].output);
                ASSERT_EQ(ra.trajectory[i].total_dollars(), rd.trajectory[i].total_dollars());
            }
            ASSERT_EQ(ra.final_answer, rd.final_answer);
            ASSERT_EQ(ra.total_cost, rd.total_cost);
        }
    }
}

TEST(RunProperty, SeededRunsAreByteIdentical) {
    auto tasks = SyntheticWorld::generate_tasks(12, 10, WorldParams::defaults());
    std::string logs[2];
    for (auto& out : logs) {
        Rig rig;
        rig.world.add_tasks(tasks);
        CostProfile profile = gaia_profile(rig.reg);
        TransitionPrior prior = chain_prior(rig.reg);
        RunConfig cfg;
        cfg.method = Method::DualLevel;
        cfg.budget = M("0.3");
        cfg.seed = 2;
        SimMethodRunner runner(cfg, rig.reg, rig.world, rig.prices, &profile, &prior, {});
        std::ostringstream s;
        for (const auto& t : tasks) write_run_log(s, runner.run(t));
        out = s.str();
    }
    EXPECT_EQ(logs[0], logs[1]);
    EXPECT_FALSE(logs[0].empty());
}

TEST(TrajectoryLog, RoundTrip) {
    auto tasks = SyntheticWorld::generate_tasks(13, 6, WorldParams::defaults());
    Rig rig;
    rig.world.add_tasks(tasks);
    CostProfile profile = gaia_profile(rig.reg);
    TransitionPrior prior = chain_prior(rig.reg);
    RunConfig cfg;
    cfg.method = Method::DualLevel;
    cfg.budget = M("0.05");
    cfg.seed = 1;
    SimMethodRunner runner(cfg, rig.reg, rig.world, rig.prices, &profile, &prior, {});
    std::vector<RunResult> runs;
    std::stringstream s;
    for (const auto& t : tasks) {
        runs.push_back(runner.run(t));
        write_run_log(s, runs.back());
    }
    auto back = read_run_log(s);
    ASSERT_EQ(back.size(), runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        EXPECT_EQ(back[i].task_id, runs[i].task_id);
        EXPECT_EQ(back[i].method, Method::DualLevel);
        EXPECT_EQ(back[i].total_cost, runs[i].total_cost);
        EXPECT_EQ(back[i].step_sum(), runs[i].total_cost);
        EXPECT_EQ(back[i].solved, runs[i].solved);
        EXPECT_EQ(back[i].final_answer, runs[i].final_answer);
        EXPECT_EQ(back[i].steps.size(), runs[i].trajectory.size());
        for (std::size_t k = 0; k < back[i].steps.size(); ++k)
            EXPECT_EQ(back[i].steps[k].best_effort, static_cast<std::int64_t>(k) == runs[i].best_effort_index);
    }
    std::istringstream first_line(s.str());
    std::string line;
    std::getline(first_line, line);
    auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys.at(0), "task_id");
    EXPECT_EQ(keys.at(4), "step");
    EXPECT_EQ(keys.at(12), "remaining_after");
}

TEST(ChatPolicy, ParsesActionAndAnswerLines) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    auto acts = parse_action_lines("thinking...\nACTION search: find d1\nACTION ghost: x\nACTION browse:\n"
                                   "ACTION search_then_browse: go\nACTION finish: 42\n",
                                   reg);
    ASSERT_EQ(acts.size(), 3u);
    EXPECT_EQ(acts[0], Action(A("search"), "find d1"));
    EXPECT_EQ(acts[1].id, ActionId::module("search_then_browse"));
    EXPECT_TRUE(acts[2].id.is_finish());
    EXPECT_EQ(parse_answer_line("ANSWER: one\nmore\nANSWER:  two "), "two");
    EXPECT_EQ(parse_answer_line("nothing"), "");
}

TEST(ChatPolicy, RetriesThenFails) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    int calls = 0;
    ChatClient client(
        [&](const std::string&) {
            ++calls;
            return HttpReply{200, R"({"text":"ACTION search: q","usage":{"input_tokens":10,"output_tokens":2}})"};
        },
        RetryPolicy{1, std::chrono::milliseconds(0)});
    ChatPolicy policy(client, reg, nullptr);
    Task t = task_with_chain("cp", "d1");
    PolicyView view;
    view.task = &t;
    view.remaining = view.budget = M("1");
    Proposal two = policy.propose(view, 2);
    EXPECT_EQ(two.candidates.size(), 2u);
    EXPECT_EQ(two.usage, (TokenUsage{20, 4}));
    calls = 0;
    EXPECT_THROW(policy.propose(view, 4), PolicyFailure);
    EXPECT_EQ(calls, 3);
}

TEST(ChatPolicy, NoCallOnceBudgetIsGone) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    int calls = 0;
    ChatClient client(
        [&](const std::string&) {
            ++calls;
            return HttpReply{200, R"({"text":"ANSWER: x","usage":{"input_tokens":1,"output_tokens":1}})"};
        },
        RetryPolicy{1, std::chrono::milliseconds(0)});
    CostProfile profile = gaia_profile(reg);
    ChatPolicy policy(client, reg, &profile);
    Task t = task_with_chain("cp", "d1");
    std::vector<HistoryEntry> hist(1);
    hist[0].output = "answer: seen";
    PolicyView view;
    view.task = &t;
    view.history = hist;
    view.budget = M("1");
    view.remaining = M("-0.01");
    AnswerProposal a = policy.answer(view);
    EXPECT_EQ(calls, 0);
    EXPECT_EQ(a.answer, "seen");
    EXPECT_EQ(a.usage, TokenUsage{});
    view.remaining = M("0.5");
    EXPECT_EQ(policy.answer(view).answer, "x");
    auto msgs = policy.render(view, 3);
    EXPECT_NE(msgs[1].content.find("Remaining budget: $0.5000"), std::string::npos);
}

TEST(ChatPolicy, RolloutLinesArePricedAndCut) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    CostProfile profile = gaia_profile(reg);
    CandidateSet c;
    c.candidates = {Action(A("search"), "q"), Action(A("reason"), "r")};
    auto out = parse_rollout_lines("ROLLOUT 0: search -> browse -> reason -> finish\n"
                                   "ROLLOUT 1: browse -> finish\n"
                                   "ROLLOUT 1: ghost -> finish\n"
                                   "ROLLOUT 7: search\n",
                                   c, reg, profile, 2);
    ASSERT_EQ(out.size(), 2u);
    ASSERT_EQ(out[0].size(), 1u);
    EXPECT_EQ(out[0][0].actions, (std::vector<ActionId>{A("search"), A("browse")}));
    EXPECT_EQ(out[0][0].estimated_cost, M("0.016"));
    ASSERT_EQ(out[1].size(), 1u);
    EXPECT_EQ(out[1][0].actions, (std::vector<ActionId>{A("reason"), A("browse")}));
}
