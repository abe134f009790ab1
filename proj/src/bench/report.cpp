#include "weaver/bench/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include <json.hpp>

#include "weaver/bench/metrics.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/trajectory_log.hpp"

namespace weaver {

using nlohmann::ordered_json;

namespace {

void add_run(CellSummary& c, const std::string& task_id, bool solved, bool overshoot, Money cost, bool error) {
    ++c.runs;
    c.solved += solved ? 1 : 0;
    c.overshoots += overshoot ? 1 : 0;
    c.solved_overshoot += (solved && overshoot) ? 1 : 0;
    c.errors += error ? 1 : 0;
    c.total_cost += cost;
    if (overshoot) c.overshoot_tasks.push_back(task_id);
}

template <typename F>
void write_file(const std::filesystem::path& p, F&& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    body(out);
    if (!out) throw IoError("write failed for " + p.string());
}

void sort_axes(SweepSummary& s) {
    std::sort(s.budgets.begin(), s.budgets.end());
    std::sort(s.seeds.begin(), s.seeds.end());
    std::sort(s.methods.begin(), s.methods.end());
    std::sort(s.cells.begin(), s.cells.end(), [](const CellSummary& a, const CellSummary& b) {
        return std::tie(a.seed, a.method, a.budget) < std::tie(b.seed, b.method, b.budget);
    });
}

}  // namespace

const CellSummary* SweepSummary::find(Method m, Money b, std::uint64_t seed) const {
    for (const auto& c : cells)
        if (c.method == m && c.budget == b && c.seed == seed) return &c;
    return nullptr;
}

std::int64_t SweepSummary::acc_hundredths(Method m, Money b, std::uint64_t seed) const {
    const CellSummary* c = find(m, b, seed);
    if (c == nullptr) throw EmptyResults("no runs for this cell");
    return weaver::acc_hundredths(c->counted(strict), c->runs);
}

std::int64_t SweepSummary::acc_hundredths(Method m, Money b) const {
    std::int64_t runs = 0, counted = 0;
    for (const auto& c : cells)
        if (c.method == m && c.budget == b) {
            runs += c.runs;
            counted += c.counted(strict);
        }
    return weaver::acc_hundredths(counted, runs);
}

std::int64_t SweepSummary::utilization(Method m, Money b, std::uint64_t seed) const {
    const CellSummary* c = find(m, b, seed);
    if (c == nullptr) throw EmptyResults("no runs for this cell");
    return utilization_ten_thousandths(c->total_cost, c->runs, b);
}

std::int64_t SweepSummary::utilization(Method m, Money b) const {
    std::int64_t runs = 0;
    Money total;
    for (const auto& c : cells)
        if (c.method == m && c.budget == b) {
            runs += c.runs;
            total += c.total_cost;
        }
    return utilization_ten_thousandths(total, runs, b);
}

Money SweepSummary::mean_cost(Method m, Money b) const {
    std::int64_t runs = 0;
    Money total;
    for (const auto& c : cells)
        if (c.method == m && c.budget == b) {
            runs += c.runs;
            total += c.total_cost;
        }
    if (runs == 0) throw EmptyResults("no runs for this cell");
    return divide_rounded(total, runs);
}

SweepSummary summarize(const SweepResult& sweep) {
    SweepSummary s;
    s.strict = sweep.strict;
    for (const auto& cell : sweep.cells) {
        CellSummary c;
        c.method = cell.method;
        c.budget = cell.budget;
        c.seed = cell.seed;
        for (const auto& r : cell.runs) add_run(c, r.task_id, r.solved, r.overshoot, r.total_cost, r.error.has_value());
        s.cells.push_back(std::move(c));
        if (std::find(s.methods.begin(), s.methods.end(), cell.method) == s.methods.end())
            s.methods.push_back(cell.method);
        if (std::find(s.budgets.begin(), s.budgets.end(), cell.budget) == s.budgets.end())
            s.budgets.push_back(cell.budget);
        if (std::find(s.seeds.begin(), s.seeds.end(), cell.seed) == s.seeds.end()) s.seeds.push_back(cell.seed);
    }
    sort_axes(s);
    return s;
}

SweepSummary summarize_logs(const std::filesystem::path& dir, bool strict) {
    namespace fs = std::filesystem;
    const fs::path logs = dir / "logs";
    if (!fs::is_directory(logs)) throw IoError("no logs directory under " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(logs))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw EmptyResults("no run logs under " + logs.string());

    std::map<std::tuple<std::uint64_t, Method, Money>, CellSummary> cells;
    for (const auto& f : files)
        for (const auto& run : read_run_log(f)) {
            auto& c = cells[{run.seed, run.method, run.budget}];
            c.method = run.method;
            c.budget = run.budget;
            c.seed = run.seed;
            add_run(c, run.task_id, run.solved, run.overshoot, run.total_cost, run.error.has_value());
        }
    SweepSummary s;
    s.strict = strict;
    for (auto& [key, c] : cells) {
        if (std::find(s.methods.begin(), s.methods.end(), c.method) == s.methods.end()) s.methods.push_back(c.method);
        if (std::find(s.budgets.begin(), s.budgets.end(), c.budget) == s.budgets.end()) s.budgets.push_back(c.budget);
        if (std::find(s.seeds.begin(), s.seeds.end(), c.seed) == s.seeds.end()) s.seeds.push_back(c.seed);
        s.cells.push_back(std::move(c));
    }
    sort_axes(s);
    return s;
}

void emit_reports(const SweepSummary& s, const std::filesystem::path& out_dir) {
    if (s.cells.empty()) throw EmptyResults("nothing to report");
    std::filesystem::create_directories(out_dir);

    write_file(out_dir / "accuracy.csv", [&](std::ostream& out) {
        out << "method";
        for (Money b : s.budgets) out << ",acc@" << budget_label(b);
        out << '\n';
        for (Method m : s.methods) {
            out << to_string(m);
            for (Money b : s.budgets) out << ',' << format_hundredths(s.acc_hundredths(m, b));
            out << '\n';
        }
    });

    write_file(out_dir / "accuracy.md", [&](std::ostream& out) {
        out << "| method |";
        for (Money b : s.budgets) out << " $" << budget_label(b) << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < s.budgets.size(); ++i) out << "---:|";
        out << '\n';
        for (Method m : s.methods) {
            out << "| " << to_string(m) << " |";
            for (Money b : s.budgets) out << ' ' << format_hundredths(s.acc_hundredths(m, b)) << " |";
            out << '\n';
        }
    });

    write_file(out_dir / "accuracy_by_seed.csv", [&](std::ostream& out) {
        out << "method,seed";
        for (Money b : s.budgets) out << ",acc@" << budget_label(b);
        out << '\n';
        for (Method m : s.methods)
            for (std::uint64_t seed : s.seeds) {
                out << to_string(m) << ',' << seed;
                for (Money b : s.budgets) out << ',' << format_hundredths(s.acc_hundredths(m, b, seed));
                out << '\n';
            }
    });

    write_file(out_dir / "utilization.csv", [&](std::ostream& out) {
        out << "method,budget,mean_cost,utilization,overshoots\n";
        for (Method m : s.methods)
            for (Money b : s.budgets) {
                std::int64_t over = 0;
                for (const auto& c : s.cells)
                    if (c.method == m && c.budget == b) over += c.overshoots;
                out << to_string(m) << ',' << budget_label(b) << ',' << s.mean_cost(m, b).str() << ','
                    << format_ten_thousandths(s.utilization(m, b)) << ',' << over << '\n';
            }
    });

    write_file(out_dir / "summary.json", [&](std::ostream& out) {
        ordered_json j;
        j["strict"] = s.strict;
        j["methods"] = ordered_json::array();
        for (Method m : s.methods) j["methods"].push_back(std::string(to_string(m)));
        j["budgets"] = ordered_json::array();
        for (Money b : s.budgets) j["budgets"].push_back(b.str());
        j["seeds"] = s.seeds;
        j["cells"] = ordered_json::array();
        for (const auto& c : s.cells) {
            ordered_json cj;
            cj["method"] = std::string(to_string(c.method));
            cj["budget"] = c.budget.str();
            cj["seed"] = c.seed;
            cj["runs"] = c.runs;
            cj["solved"] = c.solved;
            cj["acc"] = format_hundredths(s.acc_hundredths(c.method, c.budget, c.seed));
            cj["total_cost"] = c.total_cost.str();
            cj["mean_cost"] = divide_rounded(c.total_cost, c.runs).str();
            cj["utilization"] = format_ten_thousandths(s.utilization(c.method, c.budget, c.seed));
            cj["overshoots"] = c.overshoots;
            cj["overshoot_tasks"] = c.overshoot_tasks;
            cj["errors"] = c.errors;
            j["cells"].push_back(std::move(cj));
        }
        out << j.dump(2) << '\n';
    });
}

}  // namespace weaver
