#include "weaver/orchestrator/chat_policy.hpp"

#include <algorithm>
#include <cctype>

#include "weaver/agents/facts.hpp"
#include "weaver/collab/strategy.hpp"
#include "weaver/core/errors.hpp"
#include "weaver/orchestrator/budget_prompt.hpp"

namespace weaver {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        auto nl = text.find('\n');
        out.push_back(trim(text.substr(0, nl)));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

bool strip_prefix(std::string_view& s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    s.remove_prefix(prefix.size());
    return true;
}

std::string action_catalog(const ModuleRegistry& registry) {
    std::string out = "Available actions:\n";
    for (const auto& a : registry.agents())
        out += "- " + a.id.name + " (agent, " + std::string(to_string(a.role)) + ")\n";
    for (const auto& m : registry.modules())
        out += "- " + m.name + " (module: " + to_expression(m.strategy) + ")\n";
    out += "- finish (subtask is the final answer)\n";
    return out;
}

std::optional<ActionId> lookup(const ModuleRegistry& registry, std::string_view name) {
    if (name == kFinishName || registry.has_agent(name) || registry.has_module(name))
        return registry.resolve(name);
    return std::nullopt;
}

}  // namespace

std::string default_orchestrator_prompt() {
    return "You coordinate a team of worker agents to answer a question. Each turn, pick the next action "
           "from the list and say what it should do. Reply with one line per proposal in the form\n"
           "ACTION <name>: <subtask>\n"
           "Use the finish action with the final answer as its subtask once the evidence supports it.";
}

std::vector<Action> parse_action_lines(std::string_view text, const ModuleRegistry& registry) {
    std::vector<Action> out;
    for (std::string_view line : lines_of(text)) {
        if (!strip_prefix(line, "ACTION")) continue;
        auto colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        auto id = lookup(registry, trim(line.substr(0, colon)));
        std::string_view sub = trim(line.substr(colon + 1));
        if (!id || sub.empty()) continue;
        out.emplace_back(*id, std::string(sub));
    }
    return out;
}

std::string parse_answer_line(std::string_view text) {
    std::string out;
    for (std::string_view line : lines_of(text))
        if (strip_prefix(line, "ANSWER:")) out = std::string(trim(line));
    return out;
}

ChatPolicy::ChatPolicy(const ChatClient& client, const ModuleRegistry& registry, const CostProfile* profile,
                       ChatPolicyOptions options)
    : client_(client), registry_(registry), profile_(profile), options_(std::move(options)) {
    if (options_.system_prompt.empty()) options_.system_prompt = default_orchestrator_prompt();
    if (options_.max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
}

std::string ChatPolicy::render_state(const PolicyView& view) const {
    std::string user = "Question: " + view.task->question + "\n\n" + action_catalog(registry_) + "\n";
    if (!view.history.empty()) {
        user += "History:\n";
        for (const auto& h : view.history)
            user += "[" + std::to_string(h.step) + "] " + h.action.id.name + ": " + h.action.subtask + "\n" + h.output +
                    "\n";
        user += '\n';
    }
    if (profile_ != nullptr) user += render_budget_prompt(view.remaining, *profile_) + "\n";
    if (!view.carried.empty()) {
        user += "Plans that fit the remaining budget:\n";
        for (const auto& t : view.carried) {
            std::string line;
            for (const auto& id : t.actions) line += (line.empty() ? "" : " -> ") + id.name;
            user += "  " + line + " ($" + t.estimated_cost.str() + ")\n";
        }
        user += '\n';
    }
    return user;
}

std::vector<ChatMessage> ChatPolicy::render(const PolicyView& view, int k) const {
    std::string user = render_state(view);
    user += "Propose " + std::to_string(k) + (k == 1 ? " next action." : " alternative next actions.");
    return {{"system", options_.system_prompt}, {"user", user}};
}

Proposal ChatPolicy::propose(const PolicyView& view, int k) {
    if (view.task == nullptr) throw InvalidArgument("policy needs a task");
    if (k < 1) throw InvalidArgument("K must be >= 1");
    Proposal p;
    const ChatRequest req{options_.model, render(view, k), options_.max_tokens};
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        ChatResponse resp = client_.complete(req);
        p.usage += resp.usage;
        for (auto& a : parse_action_lines(resp.text, registry_)) {
            if (static_cast<int>(p.candidates.size()) == k) break;
            p.candidates.push_back(std::move(a));
        }
        if (static_cast<int>(p.candidates.size()) == k) return p;
    }
    throw PolicyFailure("orchestrator produced " + std::to_string(p.candidates.size()) + " of " + std::to_string(k) +
                        " parseable actions");
}

AnswerProposal ChatPolicy::answer(const PolicyView& view) {
    if (view.task == nullptr) throw InvalidArgument("policy needs a task");
    AnswerProposal a;
    if (!view.remaining.is_positive()) {
        for (const auto& h : view.history) {
            facts::WorldFacts f = facts::scan(h.output);
            if (!f.answers.empty()) a.answer = f.answers.back();
        }
        return a;
    }
    std::string user = render_state(view) + "Give your final answer now as one line: ANSWER: <answer>";
    ChatResponse resp = client_.complete({options_.model, {{"system", options_.system_prompt}, {"user", user}},
                                          options_.max_tokens});
    a.usage = resp.usage;
    a.answer = parse_answer_line(resp.text);
    return a;
}

std::vector<std::vector<SpeculativeTrajectory>> parse_rollout_lines(std::string_view text,
                                                                    const CandidateSet& candidates,
                                                                    const ModuleRegistry& registry,
                                                                    const CostProfile& profile, int depth_limit) {
    if (depth_limit < 1) throw InvalidArgument("depth_limit must be >= 1");
    std::vector<std::vector<SpeculativeTrajectory>> out(candidates.k());
    auto price = [&](const ActionId& id) {
        if (id.is_finish()) return profile.find_mean(id).value_or(Money{});
        return profile.mean(id);
    };
    for (std::string_view line : lines_of(text)) {
        if (!strip_prefix(line, "ROLLOUT")) continue;
        auto colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string_view idx = trim(line.substr(0, colon));
        if (idx.empty() || !std::all_of(idx.begin(), idx.end(), [](char c) { return c >= '0' && c <= '9'; }))
            continue;
        const std::size_t i = std::stoul(std::string(idx));
        if (i >= candidates.k()) continue;

        std::vector<ActionId> ids;
        bool ok = true;
        std::string_view rest = line.substr(colon + 1);
        while (ok) {
            auto arrow = rest.find("->");
            std::string_view name = trim(rest.substr(0, arrow));
            auto id = lookup(registry, name);
            if (!id) ok = false;
            else ids.push_back(*id);
            if (arrow == std::string_view::npos) break;
            rest.remove_prefix(arrow + 2);
        }
        if (!ok || ids.empty()) continue;

        const ActionId& first = candidates.candidates[i].id;
        if (ids.front() != first) ids.insert(ids.begin(), first);
        SpeculativeTrajectory t;
        for (const auto& id : ids) {
            if (id.is_finish()) break;
            if (static_cast<int>(t.actions.size()) == depth_limit) break;
            t.actions.push_back(id);
            t.estimated_cost += price(id);
        }
        if (t.actions.empty()) {
            // A finish candidate: its rollout is the finish call alone.
            t.actions.push_back(first);
            t.estimated_cost = price(first);
        }
        out[i].push_back(std::move(t));
    }
    return out;
}

ChatSpeculator::ChatSpeculator(const ChatClient& client, const ModuleRegistry& registry, const CostProfile& profile,
                               int n_rollouts, int depth_limit, ChatPolicyOptions options)
    : client_(client),
      registry_(registry),
      profile_(profile),
      n_rollouts_(n_rollouts),
      depth_limit_(depth_limit),
      options_(std::move(options)) {
    if (n_rollouts_ < 1 || depth_limit_ < 1) throw InvalidArgument("speculator needs n_rollouts, depth_limit >= 1");
}

std::vector<std::vector<SpeculativeTrajectory>> ChatSpeculator::rollouts(const CandidateSet& candidates,
                                                                         std::uint64_t) {
    std::string user = action_catalog(registry_) + "\nCandidate next actions:\n";
    for (std::size_t i = 0; i < candidates.k(); ++i)
        user += std::to_string(i) + ". " + candidates.candidates[i].id.name + "\n";
    user += "\nFor each candidate, imagine " + std::to_string(n_rollouts_) +
            " plausible ways the rest of the work could go, at most " + std::to_string(depth_limit_) +
            " actions each. Do not solve the task. One line per continuation:\n"
            "ROLLOUT <candidate number>: <action> -> <action> -> ... -> finish";
    ChatResponse resp = client_.complete({options_.model, {{"user", user}}, options_.max_tokens});
    last_usage_ = resp.usage;
    auto out = parse_rollout_lines(resp.text, candidates, registry_, profile_, depth_limit_);
    for (auto& r : out)
        if (static_cast<int>(r.size()) > n_rollouts_) r.resize(static_cast<std::size_t>(n_rollouts_));
    return out;
}

}  // namespace weaver
