#include "weaver/bench/metrics.hpp"

#include <vector>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace {
__extension__ typedef __int128 wide_int;

std::int64_t ratio_half_up(wide_int num, wide_int den) { return static_cast<std::int64_t>((2 * num + den) / (2 * den)); }

std::string fixed(std::int64_t v, int digits) {
    std::string sign = v < 0 ? "-" : "";
    if (v < 0) v = -v;
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits + 1 - static_cast<int>(s.size())), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    return sign + s;
}
}  // namespace

Outcome outcome_of(const RunResult& r) { return {r.solved, r.overshoot, r.total_cost}; }

std::int64_t acc_at_b_hundredths(std::span<const Outcome> outcomes, bool strict) {
    if (outcomes.empty()) throw EmptyResults("Acc@B over no results");
    std::int64_t solved = 0;
    for (const auto& o : outcomes)
        if (o.solved && !(strict && o.overshoot)) ++solved;
    return acc_hundredths(solved, static_cast<std::int64_t>(outcomes.size()));
}

std::int64_t acc_hundredths(std::int64_t counted, std::int64_t runs) {
    if (runs < 1) throw EmptyResults("Acc@B over no results");
    if (counted < 0 || counted > runs) throw InvalidArgument("solved count out of range");
    return ratio_half_up(static_cast<wide_int>(counted) * 10000, runs);
}

double acc_at_b(std::span<const RunResult> results, bool strict) {
    std::vector<Outcome> o;
    o.reserve(results.size());
    for (const auto& r : results) o.push_back(outcome_of(r));
    return static_cast<double>(acc_at_b_hundredths(o, strict)) / 100.0;
}

std::string format_hundredths(std::int64_t v) { return fixed(v, 2); }

std::int64_t utilization_ten_thousandths(Money total_cost, std::int64_t runs, Money budget) {
    if (runs < 1) throw EmptyResults("utilization over no runs");
    if (!budget.is_positive()) throw InvalidArgument("utilization needs a positive budget");
    if (total_cost.is_negative()) throw InvalidArgument("negative total cost");
    return ratio_half_up(static_cast<wide_int>(total_cost.nanos()) * 10000,
                         static_cast<wide_int>(runs) * budget.nanos());
}

std::string format_ten_thousandths(std::int64_t v) { return fixed(v, 4); }

std::string budget_label(Money budget) {
    std::string s = budget.str();
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

}  // namespace weaver
