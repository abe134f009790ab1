#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "weaver/bench/sweep.hpp"

namespace weaver {

/// Counts behind one (method, budget, seed) cell. Both a live sweep and a
/// directory of persisted logs reduce to this.
struct CellSummary {
    Method method = Method::ReactPlain;
    Money budget;
    std::uint64_t seed = 0;
    std::int64_t runs = 0;
    std::int64_t solved = 0;          // graded correct, overshoot or not
    std::int64_t overshoots = 0;
    std::int64_t solved_overshoot = 0;
    std::int64_t errors = 0;
    Money total_cost;
    std::vector<std::string> overshoot_tasks;

    std::int64_t counted(bool strict) const { return strict ? solved - solved_overshoot : solved; }
};

struct SweepSummary {
    bool strict = true;
    std::vector<Method> methods;
    std::vector<Money> budgets;
    std::vector<std::uint64_t> seeds;
    std::vector<CellSummary> cells;

    const CellSummary* find(Method m, Money b, std::uint64_t seed) const;
    // Pooled over seeds.
    std::int64_t acc_hundredths(Method m, Money b) const;
    std::int64_t acc_hundredths(Method m, Money b, std::uint64_t seed) const;
    std::int64_t utilization(Method m, Money b) const;  // ten-thousandths
    std::int64_t utilization(Method m, Money b, std::uint64_t seed) const;
    Money mean_cost(Method m, Money b) const;
};

SweepSummary summarize(const SweepResult& sweep);
// Rebuilds the summary from <dir>/logs/*.jsonl.
SweepSummary summarize_logs(const std::filesystem::path& dir, bool strict);

// accuracy.csv and accuracy.md (method x budget, pooled over seeds),
// accuracy_by_seed.csv, utilization.csv (budget, mean cost, utilization per
// method), summary.json. Byte-identical for identical summaries.
void emit_reports(const SweepSummary& summary, const std::filesystem::path& out_dir);

}  // namespace weaver
