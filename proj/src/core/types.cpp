#include "weaver/core/types.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Agent: return "agent";
        case ActionKind::Module: return "module";
        case ActionKind::Finish: return "finish";
    }
    return "agent";
}

ActionKind parse_action_kind(std::string_view text) {
    if (text == "agent") return ActionKind::Agent;
    if (text == "module") return ActionKind::Module;
    if (text == "finish") return ActionKind::Finish;
    throw InvalidArgument("unknown action kind '" + std::string(text) + "'");
}

Action::Action(ActionId action_id, std::string sub) : id(std::move(action_id)), subtask(std::move(sub)) {
    if (subtask.empty()) throw InvalidArgument("action '" + id.name + "' has an empty subtask");
    if (id.kind == ActionKind::Finish && id.name != kFinishName)
        throw InvalidArgument("finish action must be named 'finish'");
}

CostRecord& CostRecord::operator+=(const CostRecord& o) {
    usage += o.usage;
    dollars += o.dollars;
    if (model.empty()) {
        model = o.model;
    } else if (!o.model.empty() && o.model != model) {
        model = std::string(kMixedModel);
    }
    return *this;
}

}  // namespace weaver
