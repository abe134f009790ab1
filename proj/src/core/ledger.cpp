#include "weaver/core/ledger.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

CostLedger::CostLedger(Money budget) : budget_(budget) {}

CostLedger::CostLedger(const CostLedger& other) {
    std::lock_guard lock(other.mutex_);
    budget_ = other.budget_;
    total_ = other.total_;
    entries_ = other.entries_;
}

CostLedger& CostLedger::operator=(const CostLedger& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    budget_ = other.budget_;
    total_ = other.total_;
    entries_ = other.entries_;
    return *this;
}

ChargeReceipt CostLedger::charge(const CostRecord& record) {
    if (record.dollars.is_negative()) throw InvalidArgument("ledger: negative charge");
    std::lock_guard lock(mutex_);
    entries_.push_back(record);
    total_ += record.dollars;
    Money remaining = budget_ - total_;
    return {entries_.size() - 1, remaining, total_ > budget_};
}

Money CostLedger::total() const {
    std::lock_guard lock(mutex_);
    return total_;
}

Money CostLedger::remaining() const {
    std::lock_guard lock(mutex_);
    return budget_ - total_;
}

bool CostLedger::overshoot() const {
    std::lock_guard lock(mutex_);
    return total_ > budget_;
}

std::size_t CostLedger::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<CostRecord> CostLedger::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

CostLedger CostLedger::scaled(std::int64_t k) const {
    if (k <= 0) throw InvalidArgument("ledger scale must be positive");
    std::lock_guard lock(mutex_);
    CostLedger out(budget_ * k);
    for (const auto& e : entries_) {
        CostRecord r = e;
        r.dollars = r.dollars * k;
        out.entries_.push_back(r);
        out.total_ += r.dollars;
    }
    return out;
}

}  // namespace weaver
