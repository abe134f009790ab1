// weaver: task generation, self-play, single-method runs, sweeps, reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weaver/agents/chat_client.hpp"
#include "weaver/bench/config.hpp"
#include "weaver/bench/metrics.hpp"
#include "weaver/bench/report.hpp"
#include "weaver/bench/sweep.hpp"
#include "weaver/bench/task_file.hpp"
#include "weaver/collab/module_json.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/chat_policy.hpp"
#include "weaver/orchestrator/method_setup.hpp"
#include "weaver/orchestrator/trajectory_log.hpp"
#include "weaver/reflection/llm_reflect.hpp"
#include "weaver/reflection/selfplay.hpp"

namespace fs = std::filesystem;
using namespace weaver;

namespace {

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

WeaverConfig config_or_default(const std::string& path) {
    return path.empty() ? WeaverConfig{} : load_config(path);
}

std::unique_ptr<ChatAgentBackend> chat_workers(const ChatClient& client, const WeaverConfig& cfg) {
    return std::make_unique<ChatAgentBackend>(client, cfg.prompts.roles);
}

ChatPolicyOptions chat_policy_options(const WeaverConfig& cfg) {
    ChatPolicyOptions o;
    o.model = cfg.policy.model;
    o.system_prompt = cfg.prompts.orchestrator;
    return o;
}

void print_summary_table(const SweepSummary& s) {
    std::cout << "method";
    for (Money b : s.budgets) std::cout << "\tacc@" << budget_label(b);
    std::cout << '\n';
    for (Method m : s.methods) {
        std::cout << to_string(m);
        for (Money b : s.budgets) std::cout << '\t' << format_hundredths(s.acc_hundredths(m, b));
        std::cout << '\n';
    }
}

struct GenArgs {
    std::size_t count = 230;
    std::uint64_t seed = 0;
    std::string config;
    std::string out = "tasks.jsonl";
};

int cmd_gen(const GenArgs& a) {
    WeaverConfig cfg = config_or_default(a.config);
    auto tasks = SyntheticWorld::generate_tasks(a.seed, a.count, cfg.world);
    save_tasks(a.out, tasks);
    std::cout << "wrote " << tasks.size() << " tasks to " << a.out << '\n';
    return 0;
}

struct SelfPlayArgs {
    std::string tasks;
    int rounds = -1;
    std::uint64_t seed = 0;
    std::string backend = "sim";
    std::string config;
    std::string out = "selfplay";
    bool reflect = false;
};

int cmd_selfplay(const SelfPlayArgs& a) {
    WeaverConfig cfg = config_or_default(a.config);
    auto all = load_tasks(a.tasks);
    const std::size_t n = std::min(all.size(), cfg.selfplay.validation_size);
    std::vector<Task> tasks(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));

    SelfPlayOptions so;
    so.rounds = a.rounds > 0 ? a.rounds : cfg.selfplay.rounds;
    so.budget_per_task = cfg.selfplay.budget;
    so.t_max = cfg.orchestrator.t_max;
    so.meter_orchestrator_tokens = cfg.orchestrator.meter_orchestrator_tokens;
    so.miner.min_support = cfg.selfplay.min_support;
    so.miner.max_len = cfg.selfplay.max_len;
    so.miner.aggregator = default_aggregator(cfg.benchmark);
    so.parallel = cfg.parallelism.enabled;
    ModuleRegistry registry = make_registry(cfg.benchmark, true, cfg.models);

    std::optional<SelfPlayResult> result;
    std::optional<ChatClient> client;
    if (a.backend == "sim") {
        SyntheticWorld world(a.seed, cfg.world);
        world.add_tasks(all);
        const RulePolicyOptions base = rule_options_for(Method::ModulesBudgetUnaware, cfg.policy);
        PolicyFactory factory = [&world, base](const ModuleRegistry& reg) -> std::unique_ptr<Policy> {
            return std::make_unique<RulePolicy>(reg, world, nullptr, base);
        };
        result = run_selfplay(tasks, registry, world, cfg.prices, factory, so, a.seed);
    } else if (a.backend == "chat") {
        client.emplace(ChatEndpoint::from_env());
        auto workers = chat_workers(*client, cfg);
        const ChatPolicyOptions po = chat_policy_options(cfg);
        PolicyFactory factory = [&client, po](const ModuleRegistry& reg) -> std::unique_ptr<Policy> {
            return std::make_unique<ChatPolicy>(*client, reg, nullptr, po);
        };
        so.parallel = false;
        result = run_selfplay(tasks, registry, *workers, cfg.prices, factory, so, a.seed);
    } else {
        throw InvalidArgument("backend must be sim or chat");
    }

    fs::create_directories(a.out);
    result->store.save(fs::path(a.out) / "trajectories.jsonl");
    result->profile.save(fs::path(a.out) / "cost_profile.json");
    std::vector<CollaborationModule> modules = result->registry.modules();
    if (a.reflect) {
        if (!client) client.emplace(ChatEndpoint::from_env());
        ReflectOptions ro;
        ro.prompt_template = cfg.prompts.reflection;
        ro.model = cfg.policy.model;
        ro.default_aggregator = default_aggregator(cfg.benchmark);
        ReflectResult rr = llm_reflect(result->store, result->registry, *client, ro);
        for (const auto& d : rr.diagnostics) std::cerr << "reflect: " << d << '\n';
        for (auto& m : rr.modules) modules.push_back(std::move(m));
    }
    save_modules(fs::path(a.out) / "modules.json", modules);
    for (const auto& r : result->rounds)
        std::cout << "round " << r.round << ": solved " << r.solved << "/" << r.tasks
                  << (r.new_module ? ", new module " + *r.new_module : std::string(", no new module")) << '\n';
    std::cout << "store digest " << result->store.digest() << '\n';
    return 0;
}

struct RunArgs {
    std::string tasks;
    std::string method;
    std::string budget;
    std::uint64_t seed = 0;
    std::string backend = "sim";
    std::string config;
    std::string profile;
    std::string modules;
    std::string trajectories;
    std::string out = "run";
};

int cmd_run(const RunArgs& a) {
    WeaverConfig cfg = config_or_default(a.config);
    auto tasks = load_tasks(a.tasks);
    const Method method = parse_method(a.method);
    RunConfig rc;
    rc.method = method;
    rc.budget = Money::parse(a.budget);
    rc.t_max = cfg.orchestrator.t_max;
    rc.planner = cfg.planner;
    rc.meter_orchestrator_tokens = cfg.orchestrator.meter_orchestrator_tokens;
    rc.best_of_n = cfg.orchestrator.best_of_n;
    rc.max_refinements = cfg.orchestrator.max_refinements;
    rc.seed = a.seed;
    rc.validate();

    ModuleRegistry registry = make_registry(cfg.benchmark, true, cfg.models);
    if (!a.modules.empty())
        for (const auto& m : load_modules(a.modules))
            if (!registry.has_module(m.name)) registry.try_add_module(m);
    std::optional<CostProfile> profile;
    if (!a.profile.empty()) {
        profile = CostProfile::load(a.profile);
        fill_structural_estimates(*profile, registry);
    }
    if (needs_cost_profile(method) && !profile)
        throw MissingCostProfile(a.method + " needs --profile (run `weaver selfplay` first)");
    TrajectoryStore store;
    if (!a.trajectories.empty()) store = TrajectoryStore::load(a.trajectories);
    const TransitionPrior prior = fit_prior(store, registry, cfg.planner.smoothing);

    std::vector<RunResult> results(tasks.size());
    if (a.backend == "sim") {
        SyntheticWorld world(a.seed, cfg.world);
        world.add_tasks(tasks);
        SimMethodRunner runner(rc, registry, world, cfg.prices, profile ? &*profile : nullptr, &prior, cfg.policy);
        const auto n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic) if (cfg.parallelism.enabled)
        for (std::int64_t i = 0; i < n; ++i) results[static_cast<std::size_t>(i)] = runner.run(tasks[static_cast<std::size_t>(i)]);
    } else if (a.backend == "chat") {
        ChatClient client(ChatEndpoint::from_env());
        auto workers = chat_workers(client, cfg);
        const CostProfile* p = needs_cost_profile(method) ? &*profile : nullptr;
        ChatPolicy policy(client, registry, p, chat_policy_options(cfg));
        std::unique_ptr<ChatSpeculator> spec;
        if (method == Method::DualLevel && !rc.planner.uniform_h)
            spec = std::make_unique<ChatSpeculator>(client, registry, *profile, rc.planner.n_rollouts,
                                                    rc.planner.depth_limit, chat_policy_options(cfg));
        RunEnv env{registry, *workers, cfg.prices, policy, p, spec.get(), {}};
        for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = run_method(tasks[i], rc, env);
    } else {
        throw InvalidArgument("backend must be sim or chat");
    }

    fs::create_directories(fs::path(a.out) / "logs");
    {
        std::ofstream out(fs::path(a.out) / "logs" / log_file_name(method, rc.budget, a.seed), std::ios::binary);
        for (const auto& r : results) write_run_log(out, r);
    }
    SweepSummary s = summarize_logs(a.out, cfg.strict_grading);
    emit_reports(s, a.out);
    print_summary_table(s);
    return 0;
}

struct SweepArgs {
    std::string tasks;
    std::string methods = "react,react_best_of_n,react_iterative_verification,modules_budget_unaware,"
                          "modules_budget_prompt,dual_level";
    std::string budgets = "0.2,0.3,0.4,0.5";
    std::string seeds = "0";
    std::string config;
    std::string profile;
    std::string modules;
    std::string trajectories;
    std::string out = "sweep";
    bool serial = false;
};

int cmd_sweep(const SweepArgs& a) {
    WeaverConfig cfg = config_or_default(a.config);
    auto tasks = load_tasks(a.tasks);
    SweepSpec spec;
    for (const auto& m : split_csv(a.methods)) spec.methods.push_back(parse_method(m));
    for (const auto& b : split_csv(a.budgets)) spec.budgets.push_back(Money::parse(b));
    spec.seeds.clear();
    for (const auto& s : split_csv(a.seeds)) spec.seeds.push_back(std::stoull(s));
    if (!a.profile.empty()) spec.profile = CostProfile::load(a.profile);
    if (!a.modules.empty()) spec.modules = load_modules(a.modules);
    if (!a.trajectories.empty()) spec.store = TrajectoryStore::load(a.trajectories);

    SweepResult sweep = run_sweep(tasks, spec, cfg, a.serial ? ExecMode::Serial : ExecMode::Parallel);
    persist_sweep(sweep, a.out);
    SweepSummary s = summarize(sweep);
    emit_reports(s, a.out);
    print_summary_table(s);
    return 0;
}

struct ReportArgs {
    std::string in;
    std::string out;
    bool lenient = false;
};

int cmd_report(const ReportArgs& a) {
    SweepSummary s = summarize_logs(a.in, !a.lenient);
    emit_reports(s, a.out.empty() ? a.in : a.out);
    print_summary_table(s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-constrained multi-agent orchestration: self-play, runs, sweeps, reports"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen-tasks", "Generate a synthetic task file");
    g->add_option("--count", gen.count, "Number of tasks")->capture_default_str();
    g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    g->add_option("--config", gen.config, "Config file (world section)");
    g->add_option("--out", gen.out, "Output JSONL")->capture_default_str();

    SelfPlayArgs sp;
    auto* s = app.add_subcommand("selfplay", "Self-play on the validation slice; writes store, profile, modules");
    s->add_option("--tasks", sp.tasks, "Task file")->required();
    s->add_option("--rounds", sp.rounds, "Rounds (default: config)");
    s->add_option("--seed", sp.seed, "Seed")->capture_default_str();
    s->add_option("--backend", sp.backend, "sim or chat")->check(CLI::IsMember({"sim", "chat"}))->capture_default_str();
    s->add_option("--config", sp.config, "Config file");
    s->add_option("--out", sp.out, "Output directory")->capture_default_str();
    s->add_flag("--reflect", sp.reflect, "Also ask the chat model for modules");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Run one method at one budget over every task in the file");
    r->add_option("--tasks", run.tasks, "Task file")->required();
    r->add_option("--method", run.method, "Method")->required();
    r->add_option("--budget", run.budget, "Per-task budget in dollars")->required();
    r->add_option("--seed", run.seed, "Seed")->capture_default_str();
    r->add_option("--backend", run.backend, "sim or chat")->check(CLI::IsMember({"sim", "chat"}))->capture_default_str();
    r->add_option("--config", run.config, "Config file");
    r->add_option("--profile", run.profile, "Cost profile JSON");
    r->add_option("--modules", run.modules, "Module set JSON");
    r->add_option("--trajectories", run.trajectories, "Self-play store for the speculation prior");
    r->add_option("--out", run.out, "Output directory")->capture_default_str();

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Methods x budgets x seeds over the scored tasks");
    w->add_option("--tasks", sw.tasks, "Task file")->required();
    w->add_option("--methods", sw.methods, "Comma-separated methods")->capture_default_str();
    w->add_option("--budgets", sw.budgets, "Comma-separated budgets")->capture_default_str();
    w->add_option("--seeds", sw.seeds, "Comma-separated seeds")->capture_default_str();
    w->add_option("--config", sw.config, "Config file");
    w->add_option("--profile", sw.profile, "Cost profile JSON (with --modules, skips self-play)");
    w->add_option("--modules", sw.modules, "Module set JSON");
    w->add_option("--trajectories", sw.trajectories, "Self-play store for the speculation prior");
    w->add_option("--out", sw.out, "Output directory")->capture_default_str();
    w->add_flag("--serial", sw.serial, "Serial reference execution");

    ReportArgs rep;
    auto* p = app.add_subcommand("report", "Rebuild tables from persisted run logs");
    p->add_option("--in", rep.in, "Directory holding logs/")->required();
    p->add_option("--out", rep.out, "Output directory (default: --in)");
    p->add_flag("--lenient", rep.lenient, "Count overshoot runs that answered correctly");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*g) return cmd_gen(gen);
        if (*s) return cmd_selfplay(sp);
        if (*r) return cmd_run(run);
        if (*w) return cmd_sweep(sw);
        if (*p) return cmd_report(rep);
    } catch (const std::exception& e) {
        std::cerr << "weaver: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
