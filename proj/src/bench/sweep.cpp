#include "weaver/bench/sweep.hpp"

#include <fstream>
#include <memory>
#include <set>

#include <omp.h>

#include "weaver/bench/metrics.hpp"
#include "weaver/collab/module_json.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/method_setup.hpp"
#include "weaver/orchestrator/trajectory_log.hpp"

namespace weaver {

void SweepSpec::validate() const {
    if (methods.empty()) throw InvalidArgument("sweep needs at least one method");
    if (budgets.empty()) throw InvalidArgument("sweep needs at least one budget");
    if (seeds.empty()) throw InvalidArgument("sweep needs at least one seed");
    for (Money b : budgets)
        if (!b.is_positive()) throw InvalidArgument("sweep budgets must be positive");
    if (profile.has_value() != modules.has_value())
        throw InvalidArgument("supply the cost profile and the module set together");
    std::set<Method> m(methods.begin(), methods.end());
    std::set<Money> b(budgets.begin(), budgets.end());
    std::set<std::uint64_t> s(seeds.begin(), seeds.end());
    if (m.size() != methods.size() || b.size() != budgets.size() || s.size() != seeds.size())
        throw InvalidArgument("sweep methods, budgets, and seeds must not repeat");
}

std::string log_file_name(Method method, Money budget, std::uint64_t seed) {
    return std::string(to_string(method)) + "_b" + budget_label(budget) + "_s" + std::to_string(seed) + ".jsonl";
}

namespace {

RunConfig run_config(Method method, Money budget, std::uint64_t seed, const WeaverConfig& cfg, ExecMode mode) {
    RunConfig rc;
    rc.method = method;
    rc.budget = budget;
    rc.t_max = cfg.orchestrator.t_max;
    rc.planner = cfg.planner;
    rc.planner.mode = mode;
    rc.meter_orchestrator_tokens = cfg.orchestrator.meter_orchestrator_tokens;
    rc.best_of_n = cfg.orchestrator.best_of_n;
    rc.max_refinements = cfg.orchestrator.max_refinements;
    rc.seed = seed;
    return rc;
}

RunResult failed_run(const Task& task, const RunConfig& rc, const std::string& why) {
    RunResult r;
    r.task_id = task.id;
    r.method = rc.method;
    r.budget = rc.budget;
    r.seed = rc.seed;
    r.error = why;
    return r;
}

int thread_count(const WeaverConfig& cfg) {
    return cfg.parallelism.threads > 0 ? cfg.parallelism.threads : omp_get_max_threads();
}

}  // namespace

SweepResult run_sweep(const std::vector<Task>& tasks, const SweepSpec& spec, const WeaverConfig& config,
                      ExecMode mode) {
    spec.validate();
    if (!config.parallelism.enabled) mode = ExecMode::Serial;
    const std::size_t held = config.selfplay.validation_size;
    if (tasks.size() <= held)
        throw InvalidArgument("need more than " + std::to_string(held) + " tasks: the first " + std::to_string(held) +
                              " are the validation slice");

    SweepResult out;
    out.strict = config.strict_grading;
    const std::vector<Task> validation(tasks.begin(), tasks.begin() + static_cast<std::ptrdiff_t>(held));
    const std::vector<Task> scored(tasks.begin() + static_cast<std::ptrdiff_t>(held), tasks.end());
    for (const auto& t : validation) out.validation_ids.push_back(t.id);
    for (const auto& t : scored) out.scored_ids.push_back(t.id);

    bool needs_modules = false;
    for (Method m : spec.methods) needs_modules = needs_modules || uses_modules(m) || needs_cost_profile(m);

    for (std::uint64_t seed : spec.seeds) {
        SyntheticWorld world(seed, config.world);
        world.add_tasks(tasks);
        ModuleRegistry registry = make_registry(config.benchmark, true, config.models);
        SeedArtifacts art;
        art.seed = seed;
        CostProfile profile;
        TrajectoryStore store;

        if (needs_modules && spec.profile) {
            profile = *spec.profile;
            for (const auto& m : *spec.modules)
                if (!registry.has_module(m.name)) registry.try_add_module(m);
            if (spec.store) store = *spec.store;
            fill_structural_estimates(profile, registry);
        } else if (needs_modules) {
            SelfPlayOptions so;
            so.rounds = config.selfplay.rounds;
            so.budget_per_task = config.selfplay.budget;
            so.t_max = config.orchestrator.t_max;
            so.meter_orchestrator_tokens = config.orchestrator.meter_orchestrator_tokens;
            so.miner.min_support = config.selfplay.min_support;
            so.miner.max_len = config.selfplay.max_len;
            so.miner.aggregator = default_aggregator(config.benchmark);
            so.parallel = mode == ExecMode::Parallel;
            const RulePolicyOptions base = rule_options_for(Method::ModulesBudgetUnaware, config.policy);
            PolicyFactory factory = [&world, base](const ModuleRegistry& reg) -> std::unique_ptr<Policy> {
                return std::make_unique<RulePolicy>(reg, world, nullptr, base);
            };
            SelfPlayResult sp = run_selfplay(validation, registry, world, config.prices, factory, so, seed);
            registry = sp.registry;
            profile = sp.profile;
            store = sp.store;
            art.selfplay = std::move(sp);
        }
        for (const auto& m : registry.modules()) art.registry_modules.push_back(m.name);
        const TransitionPrior prior = fit_prior(store, registry, config.planner.smoothing);

        // One runner per (method, budget); construction errors fail the cell.
        struct Slot {
            std::unique_ptr<SimMethodRunner> runner;
            RunConfig rc;
            std::string error;
            std::size_t cell = 0;
        };
        std::vector<Slot> slots;
        for (Method m : spec.methods)
            for (Money b : spec.budgets) {
                Slot s;
                s.rc = run_config(m, b, seed, config, mode);
                try {
                    s.runner = std::make_unique<SimMethodRunner>(s.rc, registry, world, config.prices,
                                                                 needs_cost_profile(m) ? &profile : nullptr, &prior,
                                                                 config.policy);
                } catch (const Error& e) {
                    s.error = e.what();
                }
                s.cell = out.cells.size();
                out.cells.push_back(CellResult{m, b, seed, std::vector<RunResult>(scored.size())});
                slots.push_back(std::move(s));
            }

        const auto total = static_cast<std::int64_t>(slots.size() * scored.size());
        auto run_cell = [&](std::int64_t flat) {
            const Slot& s = slots[static_cast<std::size_t>(flat) / scored.size()];
            const std::size_t ti = static_cast<std::size_t>(flat) % scored.size();
            const Task& task = scored[ti];
            RunResult r;
            if (!s.runner) {
                r = failed_run(task, s.rc, s.error);
            } else {
                try {
                    r = s.runner->run(task);
                } catch (const std::exception& e) {
                    r = failed_run(task, s.rc, e.what());
                }
            }
            out.cells[s.cell].runs[ti] = std::move(r);
        };
        if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(config))
            for (std::int64_t i = 0; i < total; ++i) run_cell(i);
        } else {
            for (std::int64_t i = 0; i < total; ++i) run_cell(i);
        }
        out.seeds.push_back(std::move(art));
    }
    return out;
}

void persist_sweep(const SweepResult& sweep, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "logs");
    for (const auto& cell : sweep.cells) {
        const fs::path p = out_dir / "logs" / log_file_name(cell.method, cell.budget, cell.seed);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write " + p.string());
        for (const auto& r : cell.runs) write_run_log(out, r);
        if (!out) throw IoError("write failed for " + p.string());
    }
    for (const auto& art : sweep.seeds) {
        if (!art.selfplay) continue;
        const fs::path dir = out_dir / ("selfplay_s" + std::to_string(art.seed));
        fs::create_directories(dir);
        art.selfplay->store.save(dir / "trajectories.jsonl");
        art.selfplay->profile.save(dir / "cost_profile.json");
        save_modules(dir / "modules.json", art.selfplay->registry.modules());
    }
}

}  // namespace weaver
