#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "weaver/core/money.hpp"
#include "weaver/orchestrator/run.hpp"

namespace weaver {

struct Outcome {
    bool solved = false;
    bool overshoot = false;
    Money cost;
};

Outcome outcome_of(const RunResult& r);

// Acc@B in hundredths of a percent, rounded half up: 78 of 162 -> 4815.
// Strict mode counts an overshoot run as unsolved. EmptyResults on no runs.
std::int64_t acc_at_b_hundredths(std::span<const Outcome> outcomes, bool strict = true);
// Same from counts: `counted` successes out of `runs`.
std::int64_t acc_hundredths(std::int64_t counted, std::int64_t runs);
double acc_at_b(std::span<const RunResult> results, bool strict = true);

// 4815 -> "48.15".
std::string format_hundredths(std::int64_t v);

// Mean cost over budget in ten-thousandths, rounded half up: 0.4567 -> 4567.
std::int64_t utilization_ten_thousandths(Money total_cost, std::int64_t runs, Money budget);
// 4567 -> "0.4567".
std::string format_ten_thousandths(std::int64_t v);

// "0.2" for 0.2000, "0.35" for 0.35; used in file names and headers.
std::string budget_label(Money budget);

}  // namespace weaver
