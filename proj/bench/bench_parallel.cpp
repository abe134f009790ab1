// Serial reference vs OpenMP: speculation rollouts and sweep cells.
// Each pair is checked for identical output before its timings are shown.
//
//   weaver_bench [--tasks N] [--reps R]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "weaver/bench/sweep.hpp"
#include "weaver/collab/catalog.hpp"
#include "weaver/orchestrator/trajectory_log.hpp"
#include "weaver/planner/planner.hpp"

using namespace weaver;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double best_ms(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s %10.2f %10.2f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

std::string logs_of(const SweepResult& s) {
    std::ostringstream out;
    for (const auto& c : s.cells)
        for (const auto& r : c.runs) write_run_log(out, r);
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_tasks = 230;
    int reps = 3;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string a = argv[i];
        if (a == "--tasks") n_tasks = std::strtoul(argv[i + 1], nullptr, 10);
        else if (a == "--reps") reps = std::atoi(argv[i + 1]);
    }
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    // Speculation: many candidate sets against a fitted prior.
    ModuleRegistry reg = make_registry(BenchmarkKind::GaiaLike, true);
    auto space = reg.action_space();
    CostProfile profile;
    for (std::size_t i = 0; i < space.size(); ++i)
        profile.add(space[i], Money::from_micros(1000 + 250 * static_cast<std::int64_t>(i)));
    std::vector<std::vector<ActionId>> logs;
    for (std::size_t i = 0; i < 200; ++i) {
        std::vector<ActionId> t;
        for (std::size_t j = 0; j < 6; ++j) t.push_back(space[(i * 7 + j * 3) % (space.size() - 1)]);
        logs.push_back(t);
    }
    TransitionPrior prior = TransitionPrior::fit(space, logs, 1.0);
    CandidateSet cands;
    for (std::size_t i = 0; i < 8; ++i) cands.candidates.emplace_back(space[i % (space.size() - 1)], "x");

    const int sets = 400;
    std::vector<std::vector<std::vector<SpeculativeTrajectory>>> a(sets), b(sets);
    double ts = best_ms(reps, [&] {
        for (int k = 0; k < sets; ++k) a[k] = speculate_all(cands, prior, profile, 64, 12, k, ExecMode::Serial);
    });
    double tp = best_ms(reps, [&] {
        for (int k = 0; k < sets; ++k) b[k] = speculate_all(cands, prior, profile, 64, 12, k, ExecMode::Parallel);
    });
    row("speculate_all (8x64x12)", ts, tp, a == b);

    // Sweep cells.
    WeaverConfig cfg;
    auto tasks = SyntheticWorld::generate_tasks(1, n_tasks, cfg.world);
    SweepSpec spec;
    spec.methods = {Method::ReactPlain, Method::ModulesBudgetUnaware, Method::DualLevel};
    spec.budgets = {Money::parse("0.2"), Money::parse("0.3"), Money::parse("0.4"), Money::parse("0.5")};
    spec.seeds = {1};
    SweepResult rs, rp;
    double ss = best_ms(reps, [&] { rs = run_sweep(tasks, spec, cfg, ExecMode::Serial); });
    double sp = best_ms(reps, [&] { rp = run_sweep(tasks, spec, cfg, ExecMode::Parallel); });
    row("run_sweep (3 methods x 4 B)", ss, sp, logs_of(rs) == logs_of(rp));
    return logs_of(rs) == logs_of(rp) && a == b ? 0 : 1;
}
