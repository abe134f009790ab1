#include "weaver/bench/config.hpp"

#include <fstream>

#include "weaver/core/errors.hpp"

namespace weaver {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError("config section '" + std::string(section) + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in config section '" + std::string(section) + "'");
    }
}

Money money_of(const json& v) {
    if (v.is_string()) return Money::parse(v.get<std::string>());
    if (v.is_number()) return Money::from_double(v.get<double>());
    throw ConfigError("dollar amounts must be strings or numbers");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_spec(const json& j, const char* key, LogNormalSpec& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("token spec '") + key + "' must be [mu, sigma]");
    out.mu = v[0].get<double>();
    out.sigma = v[1].get<double>();
}

void read_tokens(const json& j, RoleTokenModel& tm, std::string_view name) {
    check_keys(j, name, {"input", "output", "per_context_item"});
    read_spec(j, "input", tm.input);
    read_spec(j, "output", tm.output);
    read(j, "per_context_item", tm.input_per_context_item);
}

ordered_json tokens_json(const RoleTokenModel& tm) {
    ordered_json j;
    j["input"] = {tm.input.mu, tm.input.sigma};
    j["output"] = {tm.output.mu, tm.output.sigma};
    j["per_context_item"] = tm.input_per_context_item;
    return j;
}

const std::pair<const char*, RoleTokenModel WorldParams::*> kTokenFields[] = {
    {"searcher", &WorldParams::searcher}, {"reader", &WorldParams::reader},
    {"reasoner", &WorldParams::reasoner}, {"critic", &WorldParams::critic},
    {"orchestrator", &WorldParams::orchestrator},
};

}  // namespace

WeaverConfig config_from_json(const json& j) {
    WeaverConfig c;
    check_keys(j, "top level",
               {"benchmark", "prices", "models", "planner", "world", "policy", "selfplay", "orchestrator", "prompts",
                "grading", "parallelism"});
    try {
        if (j.contains("benchmark")) c.benchmark = parse_benchmark(j.at("benchmark").get<std::string>());
        if (j.contains("prices")) {
            const json& p = j.at("prices");
            if (!p.is_object()) throw ConfigError("prices must be an object keyed by model");
            for (const auto& [model, v] : p.items()) {
                check_keys(v, "prices." + model, {"input_per_1k", "output_per_1k"});
                c.prices.set(model, {money_of(v.at("input_per_1k")), money_of(v.at("output_per_1k"))});
            }
        }
        if (j.contains("models")) {
            const json& m = j.at("models");
            check_keys(m, "models", {"light", "heavy"});
            read(m, "light", c.models.light);
            read(m, "heavy", c.models.heavy);
        }
        if (j.contains("planner")) {
            const json& p = j.at("planner");
            check_keys(p, "planner",
                       {"k", "n_rollouts", "depth_limit", "smoothing", "weight_g", "weight_h", "carry_boost",
                        "uniform_h"});
            read(p, "k", c.planner.k);
            read(p, "n_rollouts", c.planner.n_rollouts);
            read(p, "depth_limit", c.planner.depth_limit);
            read(p, "smoothing", c.planner.smoothing);
            read(p, "weight_g", c.planner.weights.g);
            read(p, "weight_h", c.planner.weights.h);
            read(p, "carry_boost", c.planner.carry_boost);
            read(p, "uniform_h", c.planner.uniform_h);
        }
        if (j.contains("world")) {
            const json& w = j.at("world");
            check_keys(w, "world",
                       {"p_hit", "p_reason", "p_orchestrator_answer", "critic_search_exponent", "num_docs",
                        "min_hops", "max_hops", "top_k", "tokens"});
            read(w, "p_hit", c.world.p_hit);
            read(w, "p_reason", c.world.p_reason);
            read(w, "p_orchestrator_answer", c.world.p_orchestrator_answer);
            read(w, "critic_search_exponent", c.world.critic_search_exponent);
            read(w, "num_docs", c.world.num_docs);
            read(w, "min_hops", c.world.min_hops);
            read(w, "max_hops", c.world.max_hops);
            read(w, "top_k", c.world.top_k);
            if (w.contains("tokens")) {
                const json& t = w.at("tokens");
                check_keys(t, "world.tokens", {"searcher", "reader", "reasoner", "critic", "orchestrator"});
                for (const auto& [name, field] : kTokenFields)
                    if (t.contains(name)) read_tokens(t.at(name), c.world.*field, name);
            }
        }
        if (j.contains("policy")) {
            const json& p = j.at("policy");
            check_keys(p, "policy",
                       {"patience", "gamma", "unaffordable_weight", "module_weight", "finish_weight", "carry_boost",
                        "model"});
            read(p, "patience", c.policy.patience);
            read(p, "gamma", c.policy.gamma);
            read(p, "unaffordable_weight", c.policy.unaffordable_weight);
            read(p, "module_weight", c.policy.module_weight);
            read(p, "finish_weight", c.policy.finish_weight);
            read(p, "carry_boost", c.policy.carry_boost);
            read(p, "model", c.policy.model);
        }
        if (j.contains("selfplay")) {
            const json& s = j.at("selfplay");
            check_keys(s, "selfplay", {"rounds", "budget", "validation_size", "min_support", "max_len"});
            read(s, "rounds", c.selfplay.rounds);
            if (s.contains("budget")) c.selfplay.budget = money_of(s.at("budget"));
            read(s, "validation_size", c.selfplay.validation_size);
            read(s, "min_support", c.selfplay.min_support);
            read(s, "max_len", c.selfplay.max_len);
        }
        if (j.contains("orchestrator")) {
            const json& o = j.at("orchestrator");
            check_keys(o, "orchestrator", {"t_max", "meter_orchestrator_tokens", "best_of_n", "max_refinements"});
            read(o, "t_max", c.orchestrator.t_max);
            read(o, "meter_orchestrator_tokens", c.orchestrator.meter_orchestrator_tokens);
            read(o, "best_of_n", c.orchestrator.best_of_n);
            read(o, "max_refinements", c.orchestrator.max_refinements);
        }
        if (j.contains("prompts")) {
            const json& p = j.at("prompts");
            check_keys(p, "prompts", {"orchestrator", "roles", "reflection"});
            read(p, "orchestrator", c.prompts.orchestrator);
            read(p, "reflection", c.prompts.reflection);
            if (p.contains("roles")) {
                if (!p.at("roles").is_object()) throw ConfigError("prompts.roles must be an object");
                for (const auto& [role, text] : p.at("roles").items())
                    c.prompts.roles[parse_role(role)] = text.get<std::string>();
            }
        }
        if (j.contains("grading")) {
            const json& g = j.at("grading");
            check_keys(g, "grading", {"strict"});
            read(g, "strict", c.strict_grading);
        }
        if (j.contains("parallelism")) {
            const json& p = j.at("parallelism");
            check_keys(p, "parallelism", {"enabled", "threads"});
            read(p, "enabled", c.parallelism.enabled);
            read(p, "threads", c.parallelism.threads);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.planner.mode = c.parallelism.enabled ? ExecMode::Parallel : ExecMode::Serial;
    return c;
}

ordered_json config_to_json(const WeaverConfig& c) {
    ordered_json j;
    j["benchmark"] = std::string(to_string(c.benchmark));
    for (const auto& [model, price] : c.prices.models())
        j["prices"][model] = {{"input_per_1k", price.input_per_1k.str()}, {"output_per_1k", price.output_per_1k.str()}};
    j["models"] = {{"light", c.models.light}, {"heavy", c.models.heavy}};
    j["planner"] = {{"k", c.planner.k},
                    {"n_rollouts", c.planner.n_rollouts},
                    {"depth_limit", c.planner.depth_limit},
                    {"smoothing", c.planner.smoothing},
                    {"weight_g", c.planner.weights.g},
                    {"weight_h", c.planner.weights.h},
                    {"carry_boost", c.planner.carry_boost},
                    {"uniform_h", c.planner.uniform_h}};
    ordered_json w;
    w["p_hit"] = c.world.p_hit;
    w["p_reason"] = c.world.p_reason;
    w["p_orchestrator_answer"] = c.world.p_orchestrator_answer;
    w["critic_search_exponent"] = c.world.critic_search_exponent;
    w["num_docs"] = c.world.num_docs;
    w["min_hops"] = c.world.min_hops;
    w["max_hops"] = c.world.max_hops;
    w["top_k"] = c.world.top_k;
    for (const auto& [name, field] : kTokenFields) w["tokens"][name] = tokens_json(c.world.*field);
    j["world"] = std::move(w);
    j["policy"] = {{"patience", c.policy.patience},
                   {"gamma", c.policy.gamma},
                   {"unaffordable_weight", c.policy.unaffordable_weight},
                   {"module_weight", c.policy.module_weight},
                   {"finish_weight", c.policy.finish_weight},
                   {"carry_boost", c.policy.carry_boost},
                   {"model", c.policy.model}};
    j["selfplay"] = {{"rounds", c.selfplay.rounds},
                     {"budget", c.selfplay.budget.str()},
                     {"validation_size", c.selfplay.validation_size},
                     {"min_support", c.selfplay.min_support},
                     {"max_len", c.selfplay.max_len}};
    j["orchestrator"] = {{"t_max", c.orchestrator.t_max},
                         {"meter_orchestrator_tokens", c.orchestrator.meter_orchestrator_tokens},
                         {"best_of_n", c.orchestrator.best_of_n},
                         {"max_refinements", c.orchestrator.max_refinements}};
    ordered_json prompts;
    prompts["orchestrator"] = c.prompts.orchestrator;
    prompts["roles"] = ordered_json::object();
    for (const auto& [role, text] : c.prompts.roles) prompts["roles"][std::string(to_string(role))] = text;
    prompts["reflection"] = c.prompts.reflection;
    j["prompts"] = std::move(prompts);
    j["grading"] = {{"strict", c.strict_grading}};
    j["parallelism"] = {{"enabled", c.parallelism.enabled}, {"threads", c.parallelism.threads}};
    return j;
}

WeaverConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
    return config_from_json(j);
}

}  // namespace weaver
