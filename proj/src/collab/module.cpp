#include "weaver/collab/module.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Builtin: return "builtin";
        case Provenance::Mined: return "mined";
        case Provenance::Reflected: return "reflected";
    }
    return "builtin";
}

Provenance parse_provenance(std::string_view text) {
    if (text == "builtin") return Provenance::Builtin;
    if (text == "mined") return Provenance::Mined;
    if (text == "reflected") return Provenance::Reflected;
    throw InvalidArgument("unknown provenance '" + std::string(text) + "'");
}

CollaborationModule CollaborationModule::make(std::string name, Strategy strategy, Provenance provenance) {
    if (name.empty()) throw InvalidArgument("module needs a name");
    CollaborationModule m{ActionId::module(name), name, strategy.agents(), std::move(strategy), provenance};
    return m;
}

std::string structural_signature(const Strategy& strategy) { return strategy.signature(); }

void ModuleRegistry::check_name_free(const std::string& name) const {
    if (name == kFinishName) throw DuplicateAction("'finish' is reserved");
    if (agent_index_.count(name) || module_index_.count(name))
        throw DuplicateAction("action name '" + name + "' is already registered");
}

void ModuleRegistry::add_agent(WorkerAgent agent) {
    if (agent.id.kind != ActionKind::Agent) throw InvalidArgument("worker agents need an Agent id");
    check_name_free(agent.id.name);
    agent_index_.emplace(agent.id.name, agents_.size());
    agents_.push_back(std::move(agent));
}

void ModuleRegistry::add_module(CollaborationModule module) {
    if (module.id.kind != ActionKind::Module || module.id.name != module.name)
        throw InvalidArgument("module id must be a Module id equal to its name");
    if (module.members != module.strategy.agents())
        throw InvalidArgument("module '" + module.name + "' members differ from its strategy leaves");
    for (const auto& m : module.members)
        if (!agent_index_.count(m))
            throw UnknownAction("module '" + module.name + "' uses unregistered agent '" + m + "'");
    check_name_free(module.name);
    std::string sig = structural_signature(module.strategy);
    if (auto it = signatures_.find(sig); it != signatures_.end())
        throw DuplicateAction("module '" + module.name + "' duplicates the structure of '" + it->second + "'");
    signatures_.emplace(sig, module.name);
    module_index_.emplace(module.name, modules_.size());
    modules_.push_back(std::move(module));
}

bool ModuleRegistry::try_add_module(CollaborationModule module) {
    if (has_signature(structural_signature(module.strategy))) return false;
    add_module(std::move(module));
    return true;
}

bool ModuleRegistry::has_signature(std::string_view signature) const { return signatures_.count(signature) != 0; }

std::optional<std::string> ModuleRegistry::module_with_signature(std::string_view signature) const {
    auto it = signatures_.find(signature);
    if (it == signatures_.end()) return std::nullopt;
    return it->second;
}

bool ModuleRegistry::contains(const ActionId& id) const {
    switch (id.kind) {
        case ActionKind::Agent: return has_agent(id.name);
        case ActionKind::Module: return has_module(id.name);
        case ActionKind::Finish: return id.name == kFinishName;
    }
    return false;
}

bool ModuleRegistry::has_agent(std::string_view name) const { return agent_index_.count(name) != 0; }
bool ModuleRegistry::has_module(std::string_view name) const { return module_index_.count(name) != 0; }

const WorkerAgent& ModuleRegistry::agent(std::string_view name) const {
    auto it = agent_index_.find(name);
    if (it == agent_index_.end()) throw UnknownAction("no agent named '" + std::string(name) + "'");
    return agents_[it->second];
}

const CollaborationModule& ModuleRegistry::module(std::string_view name) const {
    auto it = module_index_.find(name);
    if (it == module_index_.end()) throw UnknownAction("no module named '" + std::string(name) + "'");
    return modules_[it->second];
}

ActionId ModuleRegistry::resolve(std::string_view name) const {
    if (name == kFinishName) return ActionId::finish();
    if (has_agent(name)) return ActionId::agent(std::string(name));
    if (has_module(name)) return ActionId::module(std::string(name));
    throw UnknownAction("no action named '" + std::string(name) + "'");
}

std::vector<ActionId> ModuleRegistry::action_space() const {
    std::vector<ActionId> out;
    out.reserve(agents_.size() + modules_.size() + 1);
    for (const auto& a : agents_) out.push_back(a.id);
    for (const auto& m : modules_) out.push_back(m.id);
    out.push_back(ActionId::finish());
    return out;
}

}  // namespace weaver
