#include "weaver/orchestrator/trajectory_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "weaver/core/errors.hpp"
#include "weaver/core/random.hpp"

namespace weaver {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json header(const RunResult& run) {
    ordered_json j;
    j["task_id"] = run.task_id;
    j["method"] = std::string(to_string(run.method));
    j["budget"] = run.budget.str();
    j["seed"] = run.seed;
    return j;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

void write_run_log(std::ostream& out, const RunResult& run) {
    std::size_t plan_index = 0;
    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
        const HistoryEntry& e = run.trajectory[i];
        const bool best_effort = static_cast<std::int64_t>(i) == run.best_effort_index;
        ordered_json j = header(run);
        j["step"] = e.step;
        j["action_kind"] = std::string(to_string(e.action.id.kind));
        j["action_name"] = e.action.id.name;
        j["subtask"] = e.action.subtask;
        j["output_digest"] = digest_hex(e.output);
        j["input_tokens"] = e.cost.usage.input_tokens;
        j["output_tokens"] = e.cost.usage.output_tokens;
        j["dollars"] = e.cost.dollars.str();
        j["remaining_after"] = e.remaining_after.str();
        j["planner_input_tokens"] = e.planning.usage.input_tokens;
        j["planner_output_tokens"] = e.planning.usage.output_tokens;
        j["planner_dollars"] = e.planning.dollars.str();
        j["best_effort"] = best_effort;
        if (plan_index < run.plans.size() && run.plans[plan_index].step == e.step && !best_effort) {
            const PlanTrace& p = run.plans[plan_index++];
            ordered_json plan;
            plan["candidates"] = ordered_json::array();
            for (const auto& c : p.candidates) plan["candidates"].push_back(c.name);
            plan["g"] = p.g;
            plan["h"] = p.h;
            plan["f"] = p.f;
            plan["speculated"] = p.speculated;
            plan["feasible"] = p.feasible;
            plan["chosen"] = p.chosen;
            j["plan"] = std::move(plan);
        }
        out << j.dump() << '\n';
    }
    ordered_json t = header(run);
    t["trailer"] = true;
    t["final_answer"] = run.final_answer ? ordered_json(*run.final_answer) : ordered_json(nullptr);
    t["solved"] = run.solved;
    t["total_cost"] = run.total_cost.str();
    t["overshoot"] = run.overshoot;
    t["steps"] = run.steps;
    t["error"] = run.error ? ordered_json(*run.error) : ordered_json(nullptr);
    out << t.dump() << '\n';
}

Money LoggedRun::step_sum() const {
    Money s;
    for (const auto& st : steps) s += st.cost.dollars + st.planning.dollars;
    return s;
}

std::vector<LoggedRun> read_run_log(std::istream& in) {
    std::vector<LoggedRun> runs;
    LoggedRun pending;
    bool open = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseFailure("log line " + std::to_string(lineno) + " is not JSON");
        try {
            if (!open) {
                pending = LoggedRun{};
                pending.task_id = j.at("task_id").get<std::string>();
                pending.method = parse_method(j.at("method").get<std::string>());
                pending.budget = Money::parse(j.at("budget").get<std::string>());
                pending.seed = j.at("seed").get<std::uint64_t>();
                open = true;
            } else if (j.at("task_id").get<std::string>() != pending.task_id) {
                throw ParseFailure("log line " + std::to_string(lineno) + " starts a run before the previous trailer");
            }
            if (j.value("trailer", false)) {
                pending.final_answer = optional_string(j, "final_answer");
                pending.solved = j.at("solved").get<bool>();
                pending.total_cost = Money::parse(j.at("total_cost").get<std::string>());
                pending.overshoot = j.at("overshoot").get<bool>();
                pending.executed_steps = j.at("steps").get<std::int64_t>();
                pending.error = optional_string(j, "error");
                runs.push_back(std::move(pending));
                open = false;
                continue;
            }
            LoggedStep s;
            s.step = j.at("step").get<std::int64_t>();
            s.action = {parse_action_kind(j.at("action_kind").get<std::string>()), j.at("action_name").get<std::string>()};
            s.subtask = j.at("subtask").get<std::string>();
            s.output_digest = j.at("output_digest").get<std::string>();
            s.cost.usage = {j.at("input_tokens").get<std::int64_t>(), j.at("output_tokens").get<std::int64_t>()};
            s.cost.dollars = Money::parse(j.at("dollars").get<std::string>());
            s.planning.usage = {j.at("planner_input_tokens").get<std::int64_t>(),
                                j.at("planner_output_tokens").get<std::int64_t>()};
            s.planning.dollars = Money::parse(j.at("planner_dollars").get<std::string>());
            s.remaining_after = Money::parse(j.at("remaining_after").get<std::string>());
            s.best_effort = j.value("best_effort", false);
            pending.steps.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ParseFailure("log line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (open) throw ParseFailure("log ends inside the run for " + pending.task_id);
    return runs;
}

std::vector<LoggedRun> read_run_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_run_log(in);
}

}  // namespace weaver
