#include "weaver/agents/agent.hpp"

#include "weaver/core/errors.hpp"
#include "weaver/core/random.hpp"

namespace weaver {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::Searcher: return "searcher";
        case Role::Reader: return "reader";
        case Role::Reasoner: return "reasoner";
        case Role::Critic: return "critic";
    }
    return "searcher";
}

Role parse_role(std::string_view text) {
    if (text == "searcher") return Role::Searcher;
    if (text == "reader") return Role::Reader;
    if (text == "reasoner") return Role::Reasoner;
    if (text == "critic") return Role::Critic;
    throw InvalidArgument("unknown agent role '" + std::string(text) + "'");
}

CallContext CallContext::child(std::uint64_t tag, std::uint64_t index) const {
    CallContext c = *this;
    c.path = mix_keys(path, tag, index);
    return c;
}

std::vector<std::string_view> CallContext::outputs() const {
    std::vector<std::string_view> out;
    out.reserve(history.size() + local.size());
    for (const auto& h : history) out.emplace_back(h.output);
    for (const auto& l : local) out.emplace_back(l);
    return out;
}

}  // namespace weaver
