#include "weaver/bench/task_file.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "weaver/core/errors.hpp"

namespace weaver {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<Task> read_tasks(std::istream& in) {
    std::vector<Task> tasks;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "task line " + std::to_string(lineno);
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ParseFailure(where + " is not a JSON object");
        Task t;
        try {
            t.id = j.at("id").get<std::string>();
            t.question = j.at("question").get<std::string>();
            t.answer = j.at("answer").get<std::string>();
            if (j.contains("meta") && !j.at("meta").is_null())
                for (const auto& [k, v] : j.at("meta").items()) t.meta[k] = v.get<std::string>();
        } catch (const json::exception& e) {
            throw ParseFailure(where + ": " + e.what());
        }
        if (t.id.empty()) throw ParseFailure(where + ": empty id");
        if (t.answer.empty()) throw ParseFailure(where + ": empty answer for " + t.id);
        if (!ids.insert(t.id).second) throw ParseFailure(where + ": duplicate id " + t.id);
        tasks.push_back(std::move(t));
    }
    return tasks;
}

std::vector<Task> load_tasks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_tasks(in);
}

void write_tasks(std::ostream& out, const std::vector<Task>& tasks) {
    for (const auto& t : tasks) {
        ordered_json j;
        j["id"] = t.id;
        j["question"] = t.question;
        j["answer"] = t.answer;
        if (!t.meta.empty()) j["meta"] = t.meta;
        out << j.dump() << '\n';
    }
}

void save_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_tasks(out, tasks);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace weaver
