#pragma once

#include <cstddef>
#include <mutex>
#include <vector>

#include "weaver/core/money.hpp"
#include "weaver/core/types.hpp"

namespace weaver {

struct ChargeReceipt {
    std::size_t index = 0;
    Money remaining_after;
    bool overshoot = false;
};

/// Append-only spend record against a fixed budget.
///
/// Charging past zero is allowed; stopping is the orchestrator's job. All
/// members are safe to call from concurrent ensemble branches.
class CostLedger {
public:
    explicit CostLedger(Money budget);

    CostLedger(const CostLedger& other);
    CostLedger& operator=(const CostLedger& other);

    ChargeReceipt charge(const CostRecord& record);

    Money budget() const { return budget_; }
    Money total() const;
    Money remaining() const;
    bool overshoot() const;
    std::size_t size() const;
    std::vector<CostRecord> entries() const;

    // Same charges against budget * k and prices * k.
    CostLedger scaled(std::int64_t k) const;

private:
    mutable std::mutex mutex_;
    Money budget_;
    Money total_;
    std::vector<CostRecord> entries_;
};

}  // namespace weaver
