#include "weaver/reflection/trajectory_store.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "weaver/core/errors.hpp"
#include "weaver/core/random.hpp"

namespace weaver {

using nlohmann::json;
using nlohmann::ordered_json;

TrajectoryRecord TrajectoryRecord::from_history(std::string task_id, int round, bool success,
                                                std::span<const HistoryEntry> history) {
    TrajectoryRecord rec;
    rec.task_id = std::move(task_id);
    rec.round = round;
    rec.success = success;
    for (const auto& h : history) {
        StepRecord s;
        s.id = h.action.id;
        s.subtask = h.action.subtask;
        s.subtask_digest = digest_hex(h.action.subtask);
        s.output_digest = digest_hex(h.output);
        s.cost = h.cost;
        s.cost += h.planning;
        rec.steps.push_back(std::move(s));
    }
    return rec;
}

std::vector<ActionId> TrajectoryRecord::action_ids() const {
    std::vector<ActionId> ids;
    ids.reserve(steps.size());
    for (const auto& s : steps) ids.push_back(s.id);
    return ids;
}

TrajectoryStore::TrajectoryStore(const TrajectoryStore& other) {
    std::lock_guard lock(other.mutex_);
    records_ = other.records_;
}

TrajectoryStore& TrajectoryStore::operator=(const TrajectoryStore& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    records_ = other.records_;
    return *this;
}

void TrajectoryStore::append(TrajectoryRecord record) {
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(record));
}

void TrajectoryStore::append_all(const TrajectoryStore& other) {
    TrajectoryStore copy(other);
    std::lock_guard lock(mutex_);
    for (auto& r : copy.records_) records_.push_back(std::move(r));
}

std::vector<std::vector<ActionId>> TrajectoryStore::sequences(bool successful_only) const {
    std::vector<std::vector<ActionId>> out;
    for (const auto& r : records_)
        if (!successful_only || r.success) out.push_back(r.action_ids());
    return out;
}

void TrajectoryStore::write_jsonl(std::ostream& out) const {
    for (const auto& r : records_) {
        for (std::size_t i = 0; i < r.steps.size(); ++i) {
            const auto& s = r.steps[i];
            ordered_json j;
            j["task_id"] = r.task_id;
            j["round"] = r.round;
            j["step"] = i;
            j["action_kind"] = std::string(to_string(s.id.kind));
            j["action_name"] = s.id.name;
            j["subtask_digest"] = s.subtask_digest;
            j["output_digest"] = s.output_digest;
            j["model"] = s.cost.model;
            j["input_tokens"] = s.cost.usage.input_tokens;
            j["output_tokens"] = s.cost.usage.output_tokens;
            j["dollars"] = s.cost.dollars.str();
            out << j.dump() << '\n';
        }
        ordered_json end;
        end["task_id"] = r.task_id;
        end["round"] = r.round;
        end["end"] = true;
        end["success"] = r.success;
        end["steps"] = r.steps.size();
        out << end.dump() << '\n';
    }
}

TrajectoryStore TrajectoryStore::read_jsonl(std::istream& in) {
    TrajectoryStore store;
    TrajectoryRecord pending;
    bool open = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseFailure("store line " + std::to_string(lineno) + " is not JSON");
        try {
            std::string task = j.at("task_id").get<std::string>();
            int round = j.at("round").get<int>();
            if (open && (task != pending.task_id || round != pending.round))
                throw ParseFailure("store line " + std::to_string(lineno) + " interleaves trajectories");
            if (!open) {
                pending = TrajectoryRecord{};
                pending.task_id = task;
                pending.round = round;
                open = true;
            }
            if (j.value("end", false)) {
                pending.success = j.at("success").get<bool>();
                if (j.at("steps").get<std::size_t>() != pending.steps.size())
                    throw ParseFailure("store trailer for " + task + " disagrees with its step count");
                store.records_.push_back(std::move(pending));
                open = false;
                continue;
            }
            StepRecord s;
            s.id = {parse_action_kind(j.at("action_kind").get<std::string>()), j.at("action_name").get<std::string>()};
            s.subtask_digest = j.value("subtask_digest", std::string());
            s.output_digest = j.value("output_digest", std::string());
            s.cost.model = j.value("model", std::string());
            s.cost.usage.input_tokens = j.at("input_tokens").get<std::int64_t>();
            s.cost.usage.output_tokens = j.at("output_tokens").get<std::int64_t>();
            s.cost.dollars = Money::parse(j.at("dollars").get<std::string>());
            pending.steps.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ParseFailure("store line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (open) throw ParseFailure("store ends inside trajectory " + pending.task_id);
    return store;
}

void TrajectoryStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    std::lock_guard lock(mutex_);
    write_jsonl(out);
}

TrajectoryStore TrajectoryStore::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_jsonl(in);
}

std::string TrajectoryStore::digest() const {
    std::ostringstream s;
    std::lock_guard lock(mutex_);
    write_jsonl(s);
    return digest_hex(s.str());
}

}  // namespace weaver
