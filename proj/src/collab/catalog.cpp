#include "weaver/collab/catalog.hpp"

#include "weaver/core/errors.hpp"

namespace weaver {

std::string_view to_string(BenchmarkKind kind) {
    return kind == BenchmarkKind::GaiaLike ? "gaia_like" : "browse_like";
}

BenchmarkKind parse_benchmark(std::string_view text) {
    if (text == "gaia_like" || text == "gaia") return BenchmarkKind::GaiaLike;
    if (text == "browse_like" || text == "browse") return BenchmarkKind::BrowseLike;
    throw InvalidArgument("unknown benchmark '" + std::string(text) + "'");
}

std::vector<WorkerAgent> builtin_agents(BenchmarkKind kind, const CatalogModels& models) {
    if (kind == BenchmarkKind::GaiaLike) {
        return {WorkerAgent::make("search", Role::Searcher, models.light),
                WorkerAgent::make("browse", Role::Reader, models.light),
                WorkerAgent::make("reason", Role::Reasoner, models.heavy)};
    }
    return {WorkerAgent::make("search", Role::Searcher, models.light),
            WorkerAgent::make("read", Role::Reader, models.light),
            WorkerAgent::make("critic", Role::Critic, models.heavy)};
}

std::string default_aggregator(BenchmarkKind kind) { return kind == BenchmarkKind::GaiaLike ? "reason" : "critic"; }

std::vector<CollaborationModule> builtin_catalog(BenchmarkKind kind) {
    using S = Strategy;
    constexpr auto B = Provenance::Builtin;
    const int rounds = kDefaultInteractiveRounds;
    if (kind == BenchmarkKind::GaiaLike) {
        return {
            CollaborationModule::make("interactive_search_and_browse",
                                      S::interactive(S::single("search"), S::single("browse"), rounds), B),
            CollaborationModule::make("search_then_browse", S::pipeline({S::single("search"), S::single("browse")}), B),
            CollaborationModule::make("ensemble_search", S::ensemble(3, S::single("search"), Aggregator::by("search")), B),
            CollaborationModule::make("two_ensemble_reasoning",
                                      S::ensemble(2, S::single("reason"), Aggregator::by("reason")), B),
            CollaborationModule::make("three_ensemble_reasoning",
                                      S::ensemble(3, S::single("reason"), Aggregator::by("reason")), B),
        };
    }
    auto interactive_search = [&] { return S::interactive(S::single("search"), S::single("read"), rounds); };
    auto then_critic = [&] { return S::pipeline({interactive_search(), S::single("critic")}); };
    return {
        CollaborationModule::make("interactive_search", interactive_search(), B),
        CollaborationModule::make("ensemble_interactive_search",
                                  S::ensemble(3, interactive_search(), Aggregator::by("critic")), B),
        CollaborationModule::make("interactive_search_then_critic", then_critic(), B),
        CollaborationModule::make("ensemble_interactive_search_then_critic",
                                  S::ensemble(3, then_critic(), Aggregator::by("critic")), B),
    };
}

ModuleRegistry make_registry(BenchmarkKind kind, bool with_builtin_modules, const CatalogModels& models) {
    ModuleRegistry reg;
    for (auto& a : builtin_agents(kind, models)) reg.add_agent(std::move(a));
    if (with_builtin_modules)
        for (auto& m : builtin_catalog(kind)) reg.add_module(std::move(m));
    return reg;
}

}  // namespace weaver
