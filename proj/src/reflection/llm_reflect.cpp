#include "weaver/reflection/llm_reflect.hpp"

#include <cctype>
#include <set>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

}  // namespace

std::string default_reflection_template() {
    return "Below are action sequences from runs that solved their task. Look for short stretches of agent "
           "calls that keep coming back across runs and turn each into a reusable module.\n\n"
           "Successful runs:\n{few_shot_demonstrations}\n"
           "Modules already available:\n{collected_collaboration_modules}\n"
           "Write one line per new module:\n"
           "MODULE <name>: <expression>\n"
           "where an expression is an agent name, pipeline(e1, e2, ...), interactive(e1, e2, rounds=N), or "
           "ensemble(N, e, agg=<agent>). Do not repeat an available module.\n";
}

std::string render_demonstrations(const TrajectoryStore& store, std::size_t limit) {
    std::string out;
    std::size_t n = 0;
    for (const auto& r : store.records()) {
        if (!r.success) continue;
        if (n == limit) break;
        out += std::to_string(++n) + ". ";
        std::string seq;
        for (const auto& s : r.steps) seq += (seq.empty() ? "" : " -> ") + s.id.name;
        out += seq + "\n";
    }
    if (n == 0) out = "(none)\n";
    return out;
}

std::string render_module_list(const ModuleRegistry& registry) {
    std::string out;
    for (const auto& m : registry.modules()) out += "- " + m.name + ": " + to_expression(m.strategy) + "\n";
    if (out.empty()) out = "(none)\n";
    return out;
}

std::string render_reflection_prompt(std::string_view tmpl, const TrajectoryStore& store,
                                     const ModuleRegistry& registry, std::size_t max_demonstrations) {
    std::string out(tmpl);
    replace_all(out, "{few_shot_demonstrations}", render_demonstrations(store, max_demonstrations));
    replace_all(out, "{collected_collaboration_modules}", render_module_list(registry));
    return out;
}

ReflectResult parse_reflection(std::string_view reply, const ModuleRegistry& registry,
                               std::string_view default_aggregator) {
    ReflectResult out;
    ModuleRegistry scratch = registry;
    std::size_t lineno = 0;
    bool any_directive = false;
    while (!reply.empty()) {
        auto nl = reply.find('\n');
        std::string_view line = trim(reply.substr(0, nl));
        reply.remove_prefix(nl == std::string_view::npos ? reply.size() : nl + 1);
        ++lineno;
        if (line.substr(0, 7) != "MODULE ") continue;
        any_directive = true;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        line.remove_prefix(7);
        auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            out.diagnostics.push_back(where + "missing ':' after the module name");
            continue;
        }
        std::string name(trim(line.substr(0, colon)));
        if (!valid_name(name)) {
            out.diagnostics.push_back(where + "bad module name '" + name + "'");
            continue;
        }
        try {
            Strategy s = parse_strategy(trim(line.substr(colon + 1)), default_aggregator);
            if (auto dup = scratch.module_with_signature(s.signature())) {
                out.diagnostics.push_back(where + "duplicates module " + *dup);
                continue;
            }
            if (scratch.has_module(name) || scratch.has_agent(name) || name == kFinishName) {
                out.diagnostics.push_back(where + "name '" + name + "' is taken");
                continue;
            }
            auto m = CollaborationModule::make(name, std::move(s), Provenance::Reflected);
            scratch.add_module(m);
            out.modules.push_back(std::move(m));
        } catch (const Error& e) {
            out.diagnostics.push_back(where + e.what());
        }
    }
    if (!any_directive) out.diagnostics.push_back("reply contains no MODULE lines");
    return out;
}

ReflectResult llm_reflect(const TrajectoryStore& store, const ModuleRegistry& registry, const ChatClient& client,
                          const ReflectOptions& options) {
    const std::string tmpl = options.prompt_template.empty() ? default_reflection_template() : options.prompt_template;
    ChatRequest req{options.model,
                    {{"user", render_reflection_prompt(tmpl, store, registry, options.max_demonstrations)}},
                    options.max_tokens};
    ChatResponse resp = client.complete(req);
    ReflectResult out = parse_reflection(resp.text, registry, options.default_aggregator);
    out.usage = resp.usage;
    return out;
}

}  // namespace weaver
