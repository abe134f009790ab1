#pragma once

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "weaver/core/types.hpp"

namespace weaver {

struct StepRecord {
    ActionId id;
    std::string subtask;  // empty after a load; only the digest is persisted
    std::string subtask_digest;
    std::string output_digest;
    CostRecord cost;  // action spend plus the orchestrator call that chose it
};

struct TrajectoryRecord {
    std::string task_id;
    int round = 0;
    bool success = false;
    std::vector<StepRecord> steps;

    static TrajectoryRecord from_history(std::string task_id, int round, bool success,
                                         std::span<const HistoryEntry> history);
    std::vector<ActionId> action_ids() const;
};

/// Append-only log of self-play trajectories.
///
/// Persisted as JSON lines, one per step:
///   {"task_id","round","step","action_kind","action_name","subtask_digest",
///    "output_digest","model","input_tokens","output_tokens","dollars"}
/// followed by one trailer per trajectory:
///   {"task_id","round","end":true,"success","steps"}
class TrajectoryStore {
public:
    TrajectoryStore() = default;
    TrajectoryStore(const TrajectoryStore& other);
    TrajectoryStore& operator=(const TrajectoryStore& other);

    void append(TrajectoryRecord record);
    void append_all(const TrajectoryStore& other);

    const std::vector<TrajectoryRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::vector<std::vector<ActionId>> sequences(bool successful_only) const;

    void write_jsonl(std::ostream& out) const;
    static TrajectoryStore read_jsonl(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static TrajectoryStore load(const std::filesystem::path& path);

    // Hex digest of the JSONL form.
    std::string digest() const;

private:
    mutable std::mutex mutex_;
    std::vector<TrajectoryRecord> records_;
};

}  // namespace weaver
