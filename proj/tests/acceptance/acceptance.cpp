// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs against the seeded synthetic world only.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "weaver/agents/synthetic_world.hpp"
#include "weaver/bench/config.hpp"
#include "weaver/bench/metrics.hpp"
#include "weaver/bench/report.hpp"
#include "weaver/bench/sweep.hpp"
#include "weaver/collab/catalog.hpp"
#include "weaver/core/pricing.hpp"
#include "weaver/core/random.hpp"
#include "weaver/orchestrator/method_setup.hpp"
#include "weaver/orchestrator/rule_policy.hpp"
#include "weaver/planner/planner.hpp"
#include "weaver/planner/policy.hpp"
#include "weaver/reflection/cost_profile.hpp"
#include "weaver/reflection/miner.hpp"
#include "weaver/reflection/trajectory_store.hpp"

using namespace weaver;
namespace fs = std::filesystem;

namespace {

Money M(const char* s) { return Money::parse(s); }
ActionId A(const std::string& n) { return ActionId::agent(n); }

struct Check {
    bool ok = true;
    std::string why;
    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            why = msg;
        }
    }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", n, title, secs, c.ok ? "" : " -- ",
                c.why.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string tree_bytes(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    std::string out;
    for (const auto& f : files) out += f.string() + "\n" + slurp(root / f);
    return out;
}

CostProfile gaia_profile(const ModuleRegistry& reg) {
    CostProfile p;
    p.set_mean(A("search"), M("0.004"));
    p.set_mean(A("browse"), M("0.012"));
    p.set_mean(A("reason"), M("0.03"));
    p.set_mean(ActionId::finish(), M("0.002"));
    fill_structural_estimates(p, reg);
    return p;
}

TrajectoryRecord seq(const std::string& task, const std::vector<std::string>& names, bool ok = true) {
    TrajectoryRecord r;
    r.task_id = task;
    r.success = ok;
    std::vector<std::string> all = names;
    all.push_back(std::string(kFinishName));
    for (const auto& n : all) {
        StepRecord s;
        s.id = n == kFinishName ? ActionId::finish() : A(n);
        s.subtask = "sub";
        s.subtask_digest = digest_hex("sub");
        s.output_digest = digest_hex(n);
        s.cost = {{100, 20}, "claude-3-5-haiku-latest", M("0.01")};
        r.steps.push_back(s);
    }
    return r;
}

void c1(Check& c) {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto k = static_cast<std::size_t>(rng.uniform_int(1, 8));
        std::vector<ActionId> ids;
        for (std::size_t i = 0; i < k; ++i) ids.push_back(A(std::string(1, static_cast<char>('a' + rng.uniform_int(0, 3)))));
        auto g = short_term_gain(ids);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t same = 0;
            for (const auto& x : ids) same += x == ids[i];
            c.require(g[i] == static_cast<double>(same) / static_cast<double>(k), "g mismatch");
        }
    }
    for (int trial = 0; trial < 1000; ++trial) {
        const auto k = static_cast<std::size_t>(rng.uniform_int(1, 8));
        std::vector<std::size_t> counts(k);
        for (auto& n : counts) n = static_cast<std::size_t>(rng.uniform_int(0, 6));
        auto h = long_term_gain(counts);
        const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
        double sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double want = total ? static_cast<double>(counts[i]) / static_cast<double>(total) : 1.0 / static_cast<double>(k);
            c.require(h[i] == want, "h mismatch");
            sum += h[i];
        }
        if (total) c.require(std::abs(sum - 1.0) <= 1e-9, "h does not sum to 1");
    }
}

void c2(Check& c) {
    const PriceSheet sheet = PriceSheet::bedrock_defaults();
    c.require(price_cost({1000, 1000}, "claude-3-7-sonnet-latest", sheet).dollars == M("0.018"), "sonnet cost");
    c.require(price_cost({2000, 500}, "claude-3-5-haiku-latest", sheet).dollars == M("0.0036"), "haiku cost");
}

void c3(Check& c) {
    Rng rng(77);
    const std::vector<ActionId> states{A("a"), A("b"), A("c"), ActionId::module("m")};
    for (int trial = 0; trial < 1000; ++trial) {
        CostProfile p;
        for (const auto& s : states) p.set_mean(s, Money::from_nanos(rng.uniform_int(1'000'000, 60'000'000)));
        std::vector<std::vector<ActionId>> log;
        for (int i = 0; i < 5; ++i) {
            std::vector<ActionId> s;
            for (auto n = rng.uniform_int(1, 5); n > 0; --n) s.push_back(states[static_cast<std::size_t>(rng.uniform_int(0, 3))]);
            log.push_back(s);
        }
        auto prior = TransitionPrior::fit(states, log);
        const std::int64_t k = rng.uniform_int(2, 50);
        const CostProfile pk = p.scaled(k);
        const Money b1 = Money::from_nanos(rng.uniform_int(0, 200'000'000));
        const Money b2 = b1 + Money::from_nanos(rng.uniform_int(0, 100'000'000));
        PlannerParams params;
        params.mode = ExecMode::Serial;
        MarkovSpeculator s1(prior, p, params.n_rollouts, params.depth_limit, params.mode);
        MarkovSpeculator sk(prior, pk, params.n_rollouts, params.depth_limit, params.mode);
        DualLevelPlanner a(params, p, &s1), b(params, pk, &sk);
        CandidateSet cs;
        for (int i = 0; i < params.k; ++i) cs.candidates.emplace_back(states[static_cast<std::size_t>(rng.uniform_int(0, 3))], "go");
        const auto key = static_cast<std::uint64_t>(trial);
        auto lo = a.evaluate(cs, b1, key);
        auto hi = a.evaluate(cs, b2, key);
        for (std::size_t i = 0; i < cs.k(); ++i) {
            c.require(lo.feasible[i].size() <= hi.feasible[i].size(), "feasible set shrank as budget grew");
            for (const auto& t : lo.feasible[i])
                c.require(std::find(hi.feasible[i].begin(), hi.feasible[i].end(), t) != hi.feasible[i].end(),
                          "feasible trajectory lost as budget grew");
        }
        auto scaled = b.evaluate(cs, b1 * k, key);
        c.require(scaled.chosen == lo.chosen, "selection changed under cost scaling");
        c.require(scaled.h == lo.h, "h changed under cost scaling");
    }
}

void c4(Check& c) {
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    SyntheticWorld world(7, WorldParams::defaults());
    auto tasks = SyntheticWorld::generate_tasks(7, 20, WorldParams::defaults());
    world.add_tasks(tasks);
    CostProfile p = gaia_profile(reg);
    std::vector<std::vector<ActionId>> log{{A("search"), A("browse"), A("reason")}};
    auto prior = TransitionPrior::fit(reg.action_space(), log);
    PlannerParams params;
    MarkovSpeculator spec(prior, p, params.n_rollouts, params.depth_limit, params.mode);
    DualLevelPlanner planner(params, p, &spec);
    RulePolicy policy(reg, world, &p, rule_options_for(Method::DualLevel, {}));
    const auto before = world.invocation_count();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        PolicyView view;
        view.task = &tasks[i];
        view.budget = view.remaining = M("0.3");
        view.key = i;
        auto step = planner.evaluate(sample_candidates(policy, view, params.k), view.remaining, view.key);
        c.require(step.candidates.k() == static_cast<std::size_t>(params.k), "wrong candidate count");
    }
    c.require(world.invocation_count() == before, "planning invoked a worker");
}

// Shared by 5 and 9: 230 tasks, first 30 held out for self-play.
const std::vector<Task>& trend_tasks() {
    static const std::vector<Task> tasks = SyntheticWorld::generate_tasks(1, 230, WorldParams::defaults());
    return tasks;
}

void c5(Check& c) {
    SweepSpec spec;
    spec.methods = all_methods();
    spec.budgets = {M("0.05"), M("0.2"), M("0.5")};
    spec.seeds = {1};
    const SweepResult r = run_sweep(trend_tasks(), spec, WeaverConfig{});
    const SweepSummary s = summarize(r);
    std::size_t runs = 0, overshoots = 0;
    for (const auto& cell : r.cells) {
        std::int64_t strict_ok = 0;
        for (const auto& run : cell.runs) {
            ++runs;
            c.require(!run.error, run.task_id + ": " + run.error.value_or(""));
            Money sum;
            for (const auto& e : run.trajectory) sum += e.total_dollars();
            c.require(run.total_cost == sum, run.task_id + ": total_cost differs from the step sum");
            if (run.overshoot) {
                ++overshoots;
                Money spent;
                for (const auto& e : run.trajectory) {
                    const Money before = spent;
                    spent += e.total_dollars();
                    if (before <= run.budget && spent > run.budget)
                        c.require(run.total_cost - run.budget <= e.total_dollars(),
                                  run.task_id + ": overshoot exceeds the crossing action's cost");
                }
            }
            strict_ok += run.solved && !run.overshoot;
        }
        const CellSummary* cs = s.find(cell.method, cell.budget, cell.seed);
        c.require(cs && cs->counted(true) == strict_ok, "strict count includes an overshoot run");
        c.require(s.acc_hundredths(cell.method, cell.budget) ==
                      acc_hundredths(strict_ok, static_cast<std::int64_t>(cell.runs.size())),
                  "strict Acc@B mismatch");
    }
    c.require(r.scored_ids.size() == 200, "expected 200 scored tasks");
    std::printf("  %zu runs checked, %zu overshoots\n", runs, overshoots);
}

void c6(Check& c) {
    TrajectoryStore s;
    s.append(seq("T1", {"search", "browse", "x", "reason", "reason"}));
    s.append(seq("T2", {"search", "browse", "y", "reason", "reason"}));
    s.append(seq("T3", {"search", "browse", "z", "reason", "reason"}));
    s.append(seq("T4", {"reason", "reason", "search", "browse"}));
    s.append(seq("T5", {"search", "browse", "w"}));
    s.append(seq("T6", {"browse", "search", "reason"}));
    s.append(seq("F1", {"x", "y", "z"}, false));
    MinerOptions o;
    o.aggregator = "reason";
    o.min_support = 0.5;

    ModuleRegistry bare = make_registry(BenchmarkKind::GaiaLike, false);
    ModuleRegistry full = make_registry(BenchmarkKind::GaiaLike, true);
    for (ModuleRegistry* r : {&bare, &full})
        for (const char* n : {"x", "y", "z", "w"}) r->add_agent(WorkerAgent::make(n, Role::Reader, "claude-3-5-haiku-latest"));

    const auto pipe = Strategy::pipeline({Strategy::single("search"), Strategy::single("browse")}).signature();
    const auto ens = Strategy::ensemble(2, Strategy::single("reason"), Aggregator::by("reason")).signature();
    MiningReport a = mine_patterns(s, bare, o);
    c.require(a.novel.size() == 2, "expected exactly two mined modules");
    if (a.novel.size() == 2) {
        c.require(a.novel[0].strategy.signature() == pipe, "first module is not Pipeline(search, browse)");
        c.require(a.novel[1].strategy.signature() == ens, "second module is not Ensemble(2, reason)");
        c.require(a.frequent[0].support == 5.0 / 6 && a.frequent[1].support == 4.0 / 6, "supports");
    }
    MiningReport b = mine_patterns(s, full, o);
    c.require(b.novel.empty(), "builtins should absorb both patterns");
    c.require(b.frequent.size() == 2 && b.frequent[0].duplicate_of == "search_then_browse" &&
                  b.frequent[1].duplicate_of == "two_ensemble_reasoning",
              "duplicates not attributed to the builtin modules");
}

void c7(Check& c) {
    const std::vector<std::pair<std::string, std::vector<int>>> fixture{
        {"search", {1, 2, 3, 5, 8, 13, 21, 34, 55, 89}},
        {"browse", {7, 7, 8}},
        {"reason", {1, 2}},
        {"critic", {100}},
    };
    TrajectoryStore s;
    for (const auto& [name, cents] : fixture)
        for (int ct : cents) {
            TrajectoryRecord r;
            r.task_id = name;
            StepRecord st;
            st.id = A(name);
            st.cost = {{1, 1}, "claude-3-5-haiku-latest", Money::from_micros(ct * 10'000)};
            r.steps.push_back(st);
            s.append(r);
        }
    CostProfile p = estimate_costs(s);
    for (const auto& [name, cents] : fixture) {
        // Exact rational mean in nanos: sum * 10^7 / n must divide evenly here.
        const std::int64_t sum = std::accumulate(cents.begin(), cents.end(), std::int64_t{0}) * 10'000'000;
        const auto n = static_cast<std::int64_t>(cents.size());
        const std::int64_t q = sum / n, r = sum % n;
        const std::int64_t want = q + ((2 * r > n || (2 * r == n && q % 2 != 0)) ? 1 : 0);
        c.require(p.mean(A(name)).nanos() == want, name + ": mean mismatch");
        c.require(p.at(A(name)).count == n, name + ": count mismatch");
    }
}

void c8(Check& c) {
    const auto tasks = SyntheticWorld::generate_tasks(8, 70, WorldParams::defaults());
    SweepSpec spec;
    spec.methods = all_methods();
    spec.budgets = {M("0.1"), M("0.3")};
    spec.seeds = {1, 2};
    const fs::path root = fs::temp_directory_path() / ("weaver_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    for (const char* d : {"a", "b"}) {
        const SweepResult r = run_sweep(tasks, spec, WeaverConfig{});
        persist_sweep(r, root / d);
        emit_reports(summarize(r), root / d / "reports");
    }
    const std::string a = tree_bytes(root / "a"), b = tree_bytes(root / "b");
    c.require(!a.empty(), "nothing written");
    c.require(a == b, "two identical sweeps differ");
    fs::remove_all(root);
}

void c9(Check& c) {
    const std::vector<Money> budgets{M("0.2"), M("0.3"), M("0.4"), M("0.5")};
    SweepSpec spec;
    spec.methods = {Method::ModulesBudgetUnaware, Method::DualLevel};
    spec.budgets = budgets;
    spec.seeds = {1, 2, 3};
    const SweepResult r = run_sweep(trend_tasks(), spec, WeaverConfig{});
    const SweepSummary s = summarize(r);
    int strictly_better = 0;
    for (std::uint64_t seed : spec.seeds) {
        std::printf("  seed %llu", static_cast<unsigned long long>(seed));
        for (Method m : spec.methods) {
            std::printf("  %s:", std::string(to_string(m)).c_str());
            for (Money b : budgets) std::printf(" %s", format_hundredths(s.acc_hundredths(m, b, seed)).c_str());
        }
        std::printf("\n");
        bool better_both = true;
        for (Money b : {budgets[2], budgets[3]}) {
            const auto dual = s.acc_hundredths(Method::DualLevel, b, seed);
            const auto unaware = s.acc_hundredths(Method::ModulesBudgetUnaware, b, seed);
            c.require(dual >= unaware, "(a) dual_level below the unaware baseline at a large budget");
            better_both = better_both && dual > unaware;
        }
        strictly_better += better_both;
        for (std::size_t i = 1; i < budgets.size(); ++i)
            c.require(s.acc_hundredths(Method::DualLevel, budgets[i], seed) >=
                          s.acc_hundredths(Method::DualLevel, budgets[i - 1], seed),
                      "(c) dual_level accuracy decreased with budget");
    }
    c.require(strictly_better >= 2, "(a) strictly better on fewer than 2 seeds");
    const auto ud = s.utilization(Method::DualLevel, budgets[3]);
    const auto uu = s.utilization(Method::ModulesBudgetUnaware, budgets[3]);
    std::printf("  utilization at %s: dual_level %s, unaware %s\n", budget_label(budgets[3]).c_str(),
                format_ten_thousandths(ud).c_str(), format_ten_thousandths(uu).c_str());
    c.require(ud > uu, "(b) dual_level utilization not above the unaware baseline");
}

void c10(Check& c) {
    const auto tasks = SyntheticWorld::generate_tasks(10, 20, WorldParams::defaults());
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    SyntheticWorld world(10, WorldParams::defaults());
    world.add_tasks(tasks);
    const PriceSheet prices = PriceSheet::bedrock_defaults();
    const CostProfile profile = gaia_profile(reg);
    const TransitionPrior prior = TransitionPrior::fit(reg.action_space(), {{A("search"), A("browse"), A("reason")}});
    std::size_t steps = 0;
    for (const char* b : {"0.05", "0.2", "0.5"}) {
        RunConfig prompt;
        prompt.method = Method::ModulesBudgetPrompt;
        prompt.budget = M(b);
        prompt.seed = 10;
        RunConfig dual = prompt;
        dual.method = Method::DualLevel;
        dual.planner.k = 1;
        dual.planner.uniform_h = true;
        SimMethodRunner pa(prompt, reg, world, prices, &profile, &prior, {});
        SimMethodRunner da(dual, reg, world, prices, &profile, &prior, {});
        for (const auto& t : tasks) {
            const RunResult x = pa.run(t), y = da.run(t);
            c.require(x.trajectory.size() == y.trajectory.size(), t.id + ": step counts differ");
            for (std::size_t i = 0; i < std::min(x.trajectory.size(), y.trajectory.size()); ++i) {
                c.require(x.trajectory[i].action == y.trajectory[i].action, t.id + ": actions differ");
                c.require(x.trajectory[i].output == y.trajectory[i].output, t.id + ": outputs differ");
                c.require(x.trajectory[i].total_dollars() == y.trajectory[i].total_dollars(), t.id + ": costs differ");
            }
            c.require(x.final_answer == y.final_answer && x.total_cost == y.total_cost, t.id + ": results differ");
            steps += x.trajectory.size();
        }
    }
    std::printf("  %zu steps compared\n", steps);
}

}  // namespace

int main() {
    criterion(1, "gain formulas match brute force on 1000 instances each", c1);
    criterion(2, "token pricing is exact", c2);
    criterion(3, "feasibility monotone in budget, selection scale-invariant (1000 states)", c3);
    criterion(4, "planning performs no worker invocations", c4);
    criterion(5, "ledger integrity over a 200-task sweep", c5);
    criterion(6, "miner recovers the planted patterns", c6);
    criterion(7, "cost profile equals exact means on integer-cent fixtures", c7);
    criterion(8, "identical sweeps write identical bytes", c8);
    criterion(9, "budget-aware planning beats the unaware baseline and grows with budget", c9);
    criterion(10, "K=1 with uniform h reproduces the budget-prompt method step for step", c10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
