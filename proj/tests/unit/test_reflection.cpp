#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>
#include <sstream>

#include "weaver/agents/chat_client.hpp"
#include "weaver/agents/synthetic_world.hpp"
#include "weaver/collab/catalog.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/rule_policy.hpp"
#include "weaver/reflection/cost_profile.hpp"
#include "weaver/reflection/llm_reflect.hpp"
#include "weaver/reflection/miner.hpp"
#include "weaver/reflection/selfplay.hpp"
#include "weaver/reflection/trajectory_store.hpp"

using namespace weaver;

namespace {

Money M(const char* s) { return Money::parse(s); }
ActionId A(const std::string& n) { return ActionId::agent(n); }

TrajectoryRecord record(const std::string& task, bool ok, const std::vector<std::pair<ActionId, Money>>& steps) {
    TrajectoryRecord r;
    r.task_id = task;
    r.success = ok;
    for (const auto& [id, cost] : steps) {
        StepRecord s;
        s.id = id;
        s.subtask = "sub";
        s.subtask_digest = digest_hex("sub");
        s.output_digest = digest_hex(id.name);
        s.cost = {{100, 20}, "claude-3-5-haiku-latest", cost};
        r.steps.push_back(s);
    }
    return r;
}

TrajectoryRecord seq(const std::string& task, const std::vector<std::string>& names, bool ok = true) {
    std::vector<std::pair<ActionId, Money>> steps;
    for (const auto& n : names) steps.emplace_back(A(n), M("0.01"));
    steps.emplace_back(ActionId::finish(), M("0.002"));
    return record(task, ok, steps);
}

// Six successful runs: [search, browse] planted in five, [reason, reason] in four.
TrajectoryStore planted_store() {
    TrajectoryStore s;
    s.append(seq("T1", {"search", "browse", "x", "reason", "reason"}));
    s.append(seq("T2", {"search", "browse", "y", "reason", "reason"}));
    s.append(seq("T3", {"search", "browse", "z", "reason", "reason"}));
    s.append(seq("T4", {"reason", "reason", "search", "browse"}));
    s.append(seq("T5", {"search", "browse", "w"}));
    s.append(seq("T6", {"browse", "search", "reason"}));
    s.append(seq("F1", {"x", "y", "z"}, false));
    return s;
}

void add_fillers(ModuleRegistry& reg) {
    for (const char* n : {"x", "y", "z", "w"}) reg.add_agent(WorkerAgent::make(n, Role::Reader, "claude-3-5-haiku-latest"));
}

MinerOptions gaia_miner() {
    MinerOptions o;
    o.aggregator = "reason";
    return o;
}

SelfPlayResult play(const std::vector<Task>& tasks, WorldParams params, int rounds, bool parallel, std::uint64_t seed) {
    SyntheticWorld world(seed, params);
    world.add_tasks(tasks);
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    SelfPlayOptions o;
    o.rounds = rounds;
    o.budget_per_task = M("0.5");
    o.miner = gaia_miner();
    o.parallel = parallel;
    RulePolicyOptions base;
    PolicyFactory factory = [&](const ModuleRegistry& r) -> std::unique_ptr<Policy> {
        return std::make_unique<RulePolicy>(r, world, nullptr, base);
    };
    const PriceSheet prices = PriceSheet::bedrock_defaults();
    return run_selfplay(tasks, reg, world, prices, factory, o, seed);
}

}  // namespace

TEST(EstimateCosts, TwoPointMeanAndSingleton) {
    TrajectoryStore s;
    s.append(record("a", true, {{A("a"), M("0.01")}, {ActionId::module("m"), M("0.07")}}));
    s.append(record("b", false, {{A("a"), M("0.03")}}));
    CostProfile p = estimate_costs(s);
    EXPECT_EQ(p.mean(A("a")), M("0.02"));
    EXPECT_EQ(p.at(A("a")).count, 2);
    EXPECT_EQ(p.mean(ActionId::module("m")), M("0.07"));
    EXPECT_EQ(p.at(ActionId::module("m")).count, 1);
    EXPECT_FALSE(p.contains(A("never")));
    EXPECT_THROW(p.mean(A("never")), MissingCostProfile);
}

TEST(EstimateCosts, IntegerCentFixtureIsExact) {
    const std::vector<int> cents{1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
    TrajectoryStore s;
    for (int c : cents) s.append(record("t", true, {{A("a"), Money::from_micros(c * 10'000)}}));
    CostProfile p = estimate_costs(s);
    // 231 cents / 10 = 23.1 cents, exactly representable.
    const int total = std::accumulate(cents.begin(), cents.end(), 0);
    EXPECT_EQ(p.mean(A("a")).nanos() * 10, static_cast<std::int64_t>(total) * 10'000'000);
    EXPECT_EQ(p.mean(A("a")), M("0.231"));
    EXPECT_EQ(p.at(A("a")).sum, M("2.31"));
}

TEST(EstimateCosts, EmptyStoreIsAnError) { EXPECT_THROW(estimate_costs(TrajectoryStore{}), EmptyStore); }

TEST(EstimateCosts, MeanTimesCountIsTheSum) {
    Rng rng(8);
    TrajectoryStore s;
    std::map<ActionId, std::int64_t> sums;
    for (int i = 0; i < 300; ++i) {
        ActionId id = A(std::string(1, static_cast<char>('a' + rng.uniform_int(0, 4))));
        std::int64_t nanos = rng.uniform_int(0, 90'000'000);
        sums[id] += nanos;
        s.append(record("t", true, {{id, Money::from_nanos(nanos)}}));
    }
    CostProfile p = estimate_costs(s);
    for (const auto& [id, sum] : sums) {
        const auto& st = p.at(id);
        EXPECT_EQ(st.sum.nanos(), sum);
        // mean is the half-even rounded quotient, so mean * count is within count/2 nanos of the sum.
        EXPECT_LE(std::llabs(st.mean().nanos() * st.count - sum), st.count / 2 + 1);
        if (sum % st.count == 0) EXPECT_EQ(st.mean().nanos() * st.count, sum);
    }
}

TEST(CostProfile, JsonRoundTripAndScaling) {
    TrajectoryStore s = planted_store();
    CostProfile p = estimate_costs(s);
    CostProfile back = CostProfile::from_json(nlohmann::json::parse(p.to_json().dump()));
    ASSERT_EQ(back.size(), p.size());
    for (const auto& [id, st] : p.entries()) {
        EXPECT_EQ(back.at(id).sum, st.sum);
        EXPECT_EQ(back.at(id).count, st.count);
    }
    CostProfile p3 = p.scaled(3);
    for (const auto& [id, st] : p.entries()) EXPECT_EQ(p3.at(id).sum, st.sum * 3);
}

TEST(CostProfile, StructuralEstimatesCoverTheRegistry) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    CostProfile p;
    p.set_mean(A("search"), M("0.012"));
    p.set_mean(A("browse"), M("0.022"));
    p.set_mean(ActionId::finish(), M("0.002"));
    fill_structural_estimates(p, reg);
    EXPECT_TRUE(p.at(A("reason")).estimated);
    EXPECT_EQ(p.mean(A("reason")), M("0.017"));
    // orchestration + 2 worker shares
    EXPECT_EQ(p.mean(ActionId::module("search_then_browse")), M("0.002") + M("0.010") + M("0.020"));
    // 3 searches + one search aggregation
    EXPECT_EQ(p.mean(ActionId::module("ensemble_search")), M("0.002") + M("0.010") * 4);
    for (const auto& id : reg.action_space()) EXPECT_TRUE(p.contains(id)) << id.name;
}

TEST(TrajectoryStore, JsonlRoundTrip) {
    TrajectoryStore s = planted_store();
    std::stringstream buf;
    s.write_jsonl(buf);
    TrajectoryStore back = TrajectoryStore::read_jsonl(buf);
    ASSERT_EQ(back.size(), s.size());
    EXPECT_EQ(back.digest(), s.digest());
    EXPECT_EQ(back.sequences(true), s.sequences(true));
    EXPECT_EQ(back.records()[6].success, false);
    EXPECT_EQ(back.records()[0].steps[0].cost, s.records()[0].steps[0].cost);
}

TEST(Miner, PlantedPatternsAgainstBareAgents) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, false);
    add_fillers(reg);
    MiningReport r = mine_patterns(planted_store(), reg, gaia_miner());
    EXPECT_EQ(r.successful, 6u);
    ASSERT_EQ(r.novel.size(), 2u);
    EXPECT_EQ(r.novel[0].strategy.signature(),
              Strategy::pipeline({Strategy::single("search"), Strategy::single("browse")}).signature());
    EXPECT_EQ(r.novel[1].strategy.signature(),
              Strategy::ensemble(2, Strategy::single("reason"), Aggregator::by("reason")).signature());
    EXPECT_EQ(r.novel[0].provenance, Provenance::Mined);
    EXPECT_NEAR(r.frequent[0].support, 5.0 / 6, 1e-12);
    EXPECT_NEAR(r.frequent[1].support, 4.0 / 6, 1e-12);
}

TEST(Miner, PlantedPatternsDuplicateTheCatalog) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    add_fillers(reg);
    MiningReport r = mine_patterns(planted_store(), reg, gaia_miner());
    EXPECT_TRUE(r.novel.empty());
    ASSERT_EQ(r.frequent.size(), 2u);
    EXPECT_EQ(r.frequent[0].duplicate_of, "search_then_browse");
    EXPECT_EQ(r.frequent[1].duplicate_of, "two_ensemble_reasoning");
}

TEST(Miner, FullSupportFindsNothingInMixedRuns) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, false);
    add_fillers(reg);
    MinerOptions o = gaia_miner();
    o.min_support = 1.0;
    EXPECT_TRUE(mine_modules(planted_store(), reg, o).empty());
    o.min_support = 0.0;
    EXPECT_THROW(mine_modules(planted_store(), reg, o), InvalidArgument);
}

TEST(Miner, AlternationBecomesInteractive) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, false);
    Strategy s = abstract_pattern({A("search"), A("browse"), A("search")}, reg, gaia_miner());
    EXPECT_EQ(s.signature(), Strategy::interactive(Strategy::single("search"), Strategy::single("browse"),
                                                   kDefaultInteractiveRounds)
                                 .signature());
}

TEST(MinerProperty, ReturnedPatternsMeetSupport) {
    const std::vector<std::string> names{"search", "browse", "reason"};
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, false);
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        TrajectoryStore s;
        for (int t = 0; t < 8; ++t) {
            std::vector<std::string> steps;
            for (auto n = rng.uniform_int(1, 7); n > 0; --n) steps.push_back(names[static_cast<std::size_t>(rng.uniform_int(0, 2))]);
            s.append(seq("t" + std::to_string(t), steps, rng.bernoulli(0.7)));
        }
        MinerOptions o = gaia_miner();
        o.min_support = 0.25 + 0.25 * static_cast<double>(trial % 3);
        MiningReport r = mine_patterns(s, reg, o);
        std::vector<std::vector<ActionId>> ok;
        for (auto q : s.sequences(true)) {
            std::erase_if(q, [](const ActionId& a) { return a.is_finish(); });
            ok.push_back(q);
        }
        for (const auto& p : r.frequent) {
            const auto support = count_support(ok, p.ids);
            ASSERT_EQ(support, p.trajectories);
            ASSERT_GE(static_cast<double>(support) + 1e-9, o.min_support * static_cast<double>(ok.size()));
        }
        std::set<std::string> sigs;
        for (const auto& m : r.novel) ASSERT_TRUE(sigs.insert(m.strategy.signature()).second);
    }
}

TEST(SelfPlay, FiveRoundsGrowTheRegistryWithoutDuplicates) {
    auto tasks = SyntheticWorld::generate_tasks(3, 30, WorldParams::defaults());
    SelfPlayResult r = play(tasks, WorldParams::defaults(), 5, true, 11);
    ASSERT_EQ(r.rounds.size(), 5u);
    EXPECT_LE(r.new_modules.size(), 5u);
    EXPECT_EQ(r.registry.modules().size(), 5u + r.new_modules.size());
    std::set<std::string> sigs;
    for (const auto& m : r.registry.modules()) EXPECT_TRUE(sigs.insert(m.strategy.signature()).second);
    EXPECT_EQ(r.store.size(), 5u * 30u);
    for (const auto& id : r.registry.action_space()) EXPECT_TRUE(r.profile.contains(id)) << id.name;
    std::size_t named = 0;
    for (const auto& round : r.rounds) named += round.new_module.has_value();
    EXPECT_EQ(named, r.new_modules.size());
}

TEST(SelfPlay, NoSuccessMinesNothing) {
    WorldParams p = WorldParams::defaults();
    p.p_reason = 0.0;
    p.p_orchestrator_answer = 0.0;
    auto tasks = SyntheticWorld::generate_tasks(4, 10, p);
    SelfPlayResult r = play(tasks, p, 1, true, 2);
    EXPECT_EQ(r.rounds.at(0).solved, 0u);
    EXPECT_TRUE(r.new_modules.empty());
}

TEST(SelfPlay, ReplayIsDigestIdentical) {
    auto tasks = SyntheticWorld::generate_tasks(5, 12, WorldParams::defaults());
    auto a = play(tasks, WorldParams::defaults(), 2, true, 9);
    auto b = play(tasks, WorldParams::defaults(), 2, true, 9);
    auto c = play(tasks, WorldParams::defaults(), 2, false, 9);
    EXPECT_EQ(a.store.digest(), b.store.digest());
    EXPECT_EQ(a.store.digest(), c.store.digest());
    EXPECT_EQ(a.profile.to_json().dump(), c.profile.to_json().dump());
}

namespace {

ChatClient canned(std::string text) {
    return ChatClient(
        [text](const std::string&) {
            nlohmann::json j{{"text", text}, {"usage", {{"input_tokens", 40}, {"output_tokens", 12}}}};
            return HttpReply{200, j.dump()};
        },
        RetryPolicy{1, std::chrono::milliseconds(0)});
}

ModuleRegistry retrieve_read_registry() {
    ModuleRegistry reg;
    reg.add_agent(WorkerAgent::make("retrieve", Role::Searcher, "m"));
    reg.add_agent(WorkerAgent::make("read", Role::Reader, "m"));
    return reg;
}

}  // namespace

TEST(LlmReflect, CannedPipelineParses) {
    ModuleRegistry reg = retrieve_read_registry();
    ChatClient client = canned("Looking at the runs, retrieval is always followed by reading.\n"
                               "MODULE retrieve_then_read: pipeline(retrieve, read)\n");
    ReflectResult r = llm_reflect(planted_store(), reg, client);
    ASSERT_EQ(r.modules.size(), 1u);
    EXPECT_EQ(r.modules[0].name, "retrieve_then_read");
    EXPECT_EQ(r.modules[0].provenance, Provenance::Reflected);
    EXPECT_EQ(r.modules[0].strategy.signature(),
              Strategy::pipeline({Strategy::single("retrieve"), Strategy::single("read")}).signature());
    EXPECT_EQ(r.usage, (TokenUsage{40, 12}));
}

TEST(LlmReflect, KnownStructureIsDropped) {
    ModuleRegistry reg = retrieve_read_registry();
    reg.add_module(CollaborationModule::make(
        "existing", Strategy::pipeline({Strategy::single("retrieve"), Strategy::single("read")}), Provenance::Builtin));
    ReflectResult r = llm_reflect(planted_store(), reg, canned("MODULE again: pipeline(retrieve, read)"));
    EXPECT_TRUE(r.modules.empty());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_NE(r.diagnostics[0].find("existing"), std::string::npos);
}

TEST(LlmReflect, ProseYieldsDiagnostic) {
    ReflectResult r = llm_reflect(planted_store(), retrieve_read_registry(),
                                  canned("I think the agents should cooperate more closely."));
    EXPECT_TRUE(r.modules.empty());
    EXPECT_EQ(r.diagnostics, std::vector<std::string>{"reply contains no MODULE lines"});
}

TEST(LlmReflect, BadLinesAreReportedIndividually) {
    ReflectResult r = parse_reflection("MODULE a: pipeline(retrieve\n"
                                       "MODULE b: pipeline(retrieve, ghost)\n"
                                       "MODULE bad name: retrieve\n"
                                       "MODULE ok: interactive(retrieve, read, rounds=2)\n",
                                       retrieve_read_registry(), "read");
    EXPECT_EQ(r.modules.size(), 1u);
    EXPECT_EQ(r.diagnostics.size(), 3u);
}

TEST(LlmReflect, PromptFillsBothSlots) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    std::string prompt = render_reflection_prompt(default_reflection_template(), planted_store(), reg, 3);
    EXPECT_EQ(prompt.find("{few_shot_demonstrations}"), std::string::npos);
    EXPECT_EQ(prompt.find("{collected_collaboration_modules}"), std::string::npos);
    EXPECT_NE(prompt.find("search_then_browse"), std::string::npos);
    EXPECT_NE(prompt.find("search -> browse"), std::string::npos);
}
