#include "weaver/reflection/selfplay.hpp"

#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/run.hpp"

namespace weaver {

SelfPlayResult run_selfplay(std::span<const Task> tasks, const ModuleRegistry& registry, AgentBackend& backend,
                            const PriceSheet& prices, const PolicyFactory& make_policy,
                            const SelfPlayOptions& options, std::uint64_t seed) {
    if (options.rounds < 1) throw InvalidArgument("self-play needs at least one round");
    if (tasks.empty()) throw InvalidArgument("self-play needs tasks");
    if (!options.budget_per_task.is_positive()) throw InvalidArgument("self-play budget must be positive");
    if (!make_policy) throw InvalidArgument("self-play needs a policy factory");

    SelfPlayResult out;
    out.registry = registry;

    for (int round = 1; round <= options.rounds; ++round) {
        std::unique_ptr<Policy> policy = make_policy(out.registry);
        RunConfig cfg;
        cfg.method = Method::ModulesBudgetUnaware;
        cfg.budget = options.budget_per_task;
        cfg.t_max = options.t_max;
        cfg.meter_orchestrator_tokens = options.meter_orchestrator_tokens;
        cfg.seed = mix_keys(seed, static_cast<std::uint64_t>(round));
        cfg.validate();

        const auto n = static_cast<std::int64_t>(tasks.size());
        std::vector<RunResult> results(tasks.size());
        auto run_one = [&](std::int64_t i) {
            const Task& task = tasks[static_cast<std::size_t>(i)];
            RunEnv env{out.registry, backend, prices, *policy, nullptr, nullptr, {}};
            try {
                results[static_cast<std::size_t>(i)] = run_task(task, cfg, env);
            } catch (const std::exception& e) {
                RunResult r;
                r.task_id = task.id;
                r.error = e.what();
                results[static_cast<std::size_t>(i)] = std::move(r);
            }
        };
        if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
            for (std::int64_t i = 0; i < n; ++i) run_one(i);
        } else {
            for (std::int64_t i = 0; i < n; ++i) run_one(i);
        }

        SelfPlayRound summary;
        summary.round = round;
        summary.tasks = tasks.size();
        for (const auto& r : results) {
            summary.solved += r.solved ? 1 : 0;
            summary.failed += r.error ? 1 : 0;
            out.store.append(TrajectoryRecord::from_history(r.task_id, round, r.solved, r.trajectory));
        }

        MinerOptions miner = options.miner;
        std::vector<CollaborationModule> found = mine_modules(out.store, out.registry, miner);
        if (!found.empty()) {
            CollaborationModule m = std::move(found.front());
            if (out.registry.try_add_module(m)) {
                summary.new_module = m.name;
                out.new_modules.push_back(std::move(m));
            }
        }
        out.rounds.push_back(summary);
    }

    out.profile = estimate_costs(out.store);
    fill_structural_estimates(out.profile, out.registry);
    return out;
}

}  // namespace weaver
