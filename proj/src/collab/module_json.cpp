#include "weaver/collab/module_json.hpp"

#include <fstream>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace sn = strategy_node;
using nlohmann::json;
using nlohmann::ordered_json;

ordered_json strategy_to_json(const Strategy& strategy) {
    const auto& node = strategy.node();
    ordered_json j;
    if (auto* s = std::get_if<sn::Single>(&node)) {
        j["type"] = "single";
        j["agent"] = s->agent;
    } else if (auto* p = std::get_if<sn::Pipeline>(&node)) {
        j["type"] = "pipeline";
        j["children"] = ordered_json::array();
        for (const auto& c : p->children) j["children"].push_back(strategy_to_json(c));
    } else if (auto* i = std::get_if<sn::Interactive>(&node)) {
        j["type"] = "interactive";
        j["left"] = strategy_to_json(*i->left);
        j["right"] = strategy_to_json(*i->right);
        j["max_rounds"] = i->max_rounds;
    } else {
        const auto& e = std::get<sn::Ensemble>(node);
        j["type"] = "ensemble";
        j["n"] = e.n;
        j["child"] = strategy_to_json(*e.child);
        j["aggregator"] = e.aggregator.kind == Aggregator::Kind::Vote ? std::string("vote") : e.aggregator.agent;
    }
    return j;
}

Strategy strategy_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "single") return Strategy::single(j.at("agent").get<std::string>());
        if (type == "pipeline") {
            std::vector<Strategy> children;
            for (const auto& c : j.at("children")) children.push_back(strategy_from_json(c));
            return Strategy::pipeline(std::move(children));
        }
        if (type == "interactive")
            return Strategy::interactive(strategy_from_json(j.at("left")), strategy_from_json(j.at("right")),
                                         j.value("max_rounds", kDefaultInteractiveRounds));
        if (type == "ensemble") {
            std::string agg = j.at("aggregator").get<std::string>();
            return Strategy::ensemble(j.at("n").get<int>(), strategy_from_json(j.at("child")),
                                      agg == "vote" ? Aggregator::vote() : Aggregator::by(agg));
        }
        throw ParseFailure("unknown strategy type '" + type + "'");
    } catch (const json::exception& e) {
        throw ParseFailure(std::string("malformed strategy record: ") + e.what());
    }
}

ordered_json module_to_json(const CollaborationModule& module) {
    ordered_json j;
    j["name"] = module.name;
    j["provenance"] = std::string(to_string(module.provenance));
    j["members"] = ordered_json::array();
    for (const auto& m : module.members) j["members"].push_back(m);
    j["strategy"] = strategy_to_json(module.strategy);
    return j;
}

CollaborationModule module_from_json(const json& j) {
    try {
        auto m = CollaborationModule::make(j.at("name").get<std::string>(), strategy_from_json(j.at("strategy")),
                                           parse_provenance(j.value("provenance", std::string("builtin"))));
        if (j.contains("members")) {
            std::set<std::string> listed;
            for (const auto& x : j.at("members")) listed.insert(x.get<std::string>());
            if (listed != m.members)
                throw ParseFailure("module '" + m.name + "' lists members that differ from its strategy leaves");
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseFailure(std::string("malformed module record: ") + e.what());
    }
}

void save_modules(const std::filesystem::path& path, const std::vector<CollaborationModule>& modules) {
    ordered_json doc;
    doc["modules"] = ordered_json::array();
    for (const auto& m : modules) doc["modules"].push_back(module_to_json(m));
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::vector<CollaborationModule> load_modules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ParseFailure(path.string() + " is not valid JSON");
    const json& list = doc.is_array() ? doc : doc.at("modules");
    std::vector<CollaborationModule> out;
    for (const auto& m : list) out.push_back(module_from_json(m));
    return out;
}

}  // namespace weaver
