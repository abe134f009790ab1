#include "weaver/reflection/cost_profile.hpp"

#include <cmath>
#include <fstream>

#include "weaver/collab/module.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/reflection/trajectory_store.hpp"

namespace weaver {

using nlohmann::json;
using nlohmann::ordered_json;

namespace sn = strategy_node;

Money CostStats::mean() const {
    if (count <= 0) throw MissingCostProfile("cost entry without samples");
    return divide_rounded(sum, count);
}

double CostStats::stddev() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1));
}

void CostProfile::add(const ActionId& id, Money dollars) {
    CostStats& s = stats_[id];
    if (s.estimated) s = CostStats{};
    s.sum += dollars;
    ++s.count;
    double x = dollars.to_double();
    double delta = x - s.running_mean;
    s.running_mean += delta / static_cast<double>(s.count);
    s.m2 += delta * (x - s.running_mean);
}

void CostProfile::set_mean(const ActionId& id, Money mean, bool estimated) {
    CostStats s;
    s.sum = mean;
    s.count = 1;
    s.estimated = estimated;
    s.running_mean = mean.to_double();
    stats_[id] = s;
}

const CostStats& CostProfile::at(const ActionId& id) const {
    auto it = stats_.find(id);
    if (it == stats_.end())
        throw MissingCostProfile("no learned cost for " + std::string(to_string(id.kind)) + " '" + id.name + "'");
    return it->second;
}

std::optional<Money> CostProfile::find_mean(const ActionId& id) const {
    auto it = stats_.find(id);
    if (it == stats_.end()) return std::nullopt;
    return it->second.mean();
}

CostProfile CostProfile::scaled(std::int64_t k) const {
    if (k <= 0) throw InvalidArgument("profile scale factor must be positive");
    CostProfile out;
    for (const auto& [id, s] : stats_) {
        CostStats t = s;
        t.sum = s.sum * k;
        t.running_mean = s.running_mean * static_cast<double>(k);
        t.m2 = s.m2 * static_cast<double>(k) * static_cast<double>(k);
        out.stats_[id] = t;
    }
    return out;
}

ordered_json CostProfile::to_json() const {
    ordered_json arr = ordered_json::array();
    for (const auto& [id, s] : stats_) {
        ordered_json j;
        j["action_kind"] = std::string(to_string(id.kind));
        j["action_name"] = id.name;
        j["mean_dollars"] = s.mean().str();
        j["sample_count"] = s.count;
        j["sum_dollars"] = s.sum.str();
        j["stddev_dollars"] = s.stddev();
        j["estimated"] = s.estimated;
        arr.push_back(std::move(j));
    }
    return arr;
}

CostProfile CostProfile::from_json(const json& j) {
    CostProfile p;
    const json& arr = j.is_array() ? j : j.at("entries");
    try {
        for (const auto& e : arr) {
            ActionId id{parse_action_kind(e.at("action_kind").get<std::string>()), e.at("action_name").get<std::string>()};
            CostStats s;
            s.count = e.at("sample_count").get<std::int64_t>();
            if (s.count < 1) throw ParseFailure("profile entry '" + id.name + "' has no samples");
            s.sum = e.contains("sum_dollars") ? Money::parse(e.at("sum_dollars").get<std::string>())
                                              : Money::parse(e.at("mean_dollars").get<std::string>()) * s.count;
            s.estimated = e.value("estimated", false);
            s.running_mean = s.sum.to_double() / static_cast<double>(s.count);
            double sd = e.value("stddev_dollars", 0.0);
            s.m2 = sd * sd * static_cast<double>(s.count - 1);
            p.stats_[id] = s;
        }
    } catch (const json::exception& ex) {
        throw ParseFailure(std::string("malformed cost profile: ") + ex.what());
    }
    return p;
}

void CostProfile::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

CostProfile CostProfile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseFailure(path.string() + " is not valid JSON");
    return from_json(j);
}

CostProfile estimate_costs(const TrajectoryStore& store) {
    if (store.empty()) throw EmptyStore("cannot estimate costs from an empty trajectory store");
    CostProfile p;
    for (const auto& r : store.records())
        for (const auto& s : r.steps) p.add(s.id, s.cost.dollars);
    return p;
}

namespace {

struct LeafCounter {
    std::map<std::string, std::int64_t> calls;

    void walk(const Strategy& s, std::int64_t times) {
        const auto& node = s.node();
        if (auto* x = std::get_if<sn::Single>(&node)) {
            calls[x->agent] += times;
        } else if (auto* p = std::get_if<sn::Pipeline>(&node)) {
            for (const auto& c : p->children) walk(c, times);
        } else if (auto* i = std::get_if<sn::Interactive>(&node)) {
            walk(*i->left, times * i->max_rounds);
            walk(*i->right, times * i->max_rounds);
        } else {
            const auto& e = std::get<sn::Ensemble>(node);
            walk(*e.child, times * e.n);
            if (e.aggregator.kind == Aggregator::Kind::Agent) calls[e.aggregator.agent] += times;
        }
    }
};

}  // namespace

void fill_structural_estimates(CostProfile& profile, const ModuleRegistry& registry) {
    const Money orchestration = profile.find_mean(ActionId::finish()).value_or(Money{});

    Money known_sum;
    std::int64_t known = 0;
    for (const auto& a : registry.agents())
        if (auto m = profile.find_mean(a.id)) {
            known_sum += *m;
            ++known;
        }
    for (const auto& a : registry.agents())
        if (!profile.contains(a.id)) profile.set_mean(a.id, known ? divide_rounded(known_sum, known) : Money{}, true);

    for (const auto& m : registry.modules()) {
        if (profile.contains(m.id)) continue;
        LeafCounter counter;
        counter.walk(m.strategy, 1);
        Money total = orchestration;
        for (const auto& [agent, calls] : counter.calls) {
            Money worker = profile.mean(ActionId::agent(agent)) - orchestration;
            if (worker.is_negative()) worker = Money{};
            total += worker * calls;
        }
        profile.set_mean(m.id, total, true);
    }
    if (!profile.contains(ActionId::finish())) profile.set_mean(ActionId::finish(), Money{}, true);
}

}  // namespace weaver
