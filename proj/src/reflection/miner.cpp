#include "weaver/reflection/miner.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace sn = strategy_node;

namespace {

std::vector<ActionId> strip_finish(std::vector<ActionId> ids) {
    std::erase_if(ids, [](const ActionId& a) { return a.is_finish(); });
    return ids;
}

bool contains_window(const std::vector<ActionId>& seq, const std::vector<ActionId>& w) {
    if (w.empty() || w.size() > seq.size()) return false;
    return std::search(seq.begin(), seq.end(), w.begin(), w.end()) != seq.end();
}

Strategy leaf(const ActionId& id, const ModuleRegistry& registry) {
    if (id.kind == ActionKind::Module && registry.has_module(id.name)) return registry.module(id.name).strategy;
    return Strategy::single(id.name);
}

bool is_run(const std::vector<ActionId>& ids) {
    return std::all_of(ids.begin(), ids.end(), [&](const ActionId& a) { return a == ids.front(); });
}

bool is_alternation(const std::vector<ActionId>& ids) {
    if (ids.size() < 3 || ids[0] == ids[1]) return false;
    for (std::size_t i = 2; i < ids.size(); ++i)
        if (!(ids[i] == ids[i - 2])) return false;
    return true;
}

std::string slug(const Strategy& s) {
    const auto& node = s.node();
    if (auto* x = std::get_if<sn::Single>(&node)) return x->agent;
    if (auto* p = std::get_if<sn::Pipeline>(&node)) {
        std::string out;
        for (const auto& c : p->children) out += (out.empty() ? "" : "_then_") + slug(c);
        return out;
    }
    if (auto* i = std::get_if<sn::Interactive>(&node)) return "interactive_" + slug(*i->left) + "_" + slug(*i->right);
    const auto& e = std::get<sn::Ensemble>(node);
    return "ensemble" + std::to_string(e.n) + "_" + slug(*e.child);
}

}  // namespace

std::size_t count_support(const std::vector<std::vector<ActionId>>& trajectories, const std::vector<ActionId>& window) {
    std::size_t n = 0;
    for (const auto& t : trajectories)
        if (contains_window(t, window)) ++n;
    return n;
}

Strategy abstract_pattern(const std::vector<ActionId>& ids, const ModuleRegistry& registry, const MinerOptions& options) {
    if (ids.size() < 2) throw InvalidArgument("patterns need at least two actions");
    if (is_run(ids)) {
        if (options.aggregator.empty()) throw InvalidArgument("mined ensembles need an aggregator agent");
        return Strategy::ensemble(static_cast<int>(ids.size()), leaf(ids.front(), registry),
                                  Aggregator::by(options.aggregator));
    }
    if (is_alternation(ids))
        return Strategy::interactive(leaf(ids[0], registry), leaf(ids[1], registry), options.interactive_rounds);
    std::vector<Strategy> children;
    for (const auto& id : ids) children.push_back(leaf(id, registry));
    return Strategy::pipeline(std::move(children));
}

std::string mined_module_name(const Strategy& strategy, const ModuleRegistry& registry) {
    std::string base = "mined_" + slug(strategy);
    std::string name = base;
    for (int k = 2; registry.has_module(name) || registry.has_agent(name); ++k) name = base + "_" + std::to_string(k);
    return name;
}

MiningReport mine_patterns(const TrajectoryStore& store, const ModuleRegistry& registry, const MinerOptions& options) {
    if (!(options.min_support > 0.0 && options.min_support <= 1.0))
        throw InvalidArgument("min_support must lie in (0, 1]");
    if (options.max_len < 2) throw InvalidArgument("max_len must be at least 2");

    MiningReport report;
    std::vector<std::vector<ActionId>> seqs;
    for (const auto& r : store.records())
        if (r.success) seqs.push_back(strip_finish(r.action_ids()));
    report.successful = seqs.size();
    if (seqs.empty()) return report;

    std::map<std::vector<ActionId>, std::size_t> support;
    for (const auto& seq : seqs) {
        std::set<std::vector<ActionId>> seen;
        for (std::size_t len = 2; len <= static_cast<std::size_t>(options.max_len); ++len)
            for (std::size_t i = 0; i + len <= seq.size(); ++i)
                seen.emplace(seq.begin() + static_cast<std::ptrdiff_t>(i),
                             seq.begin() + static_cast<std::ptrdiff_t>(i + len));
        for (auto& w : seen) ++support[w];
    }

    const double total = static_cast<double>(seqs.size());
    for (const auto& [window, count] : support) {
        // Tolerance keeps 3 of 6 at min_support 0.5 from failing on rounding.
        if (static_cast<double>(count) < options.min_support * total - 1e-9) continue;
        Strategy s = abstract_pattern(window, registry, options);
        std::string sig = s.signature();
        report.frequent.push_back(
            MinedPattern{window, count, static_cast<double>(count) / total, std::move(s), std::move(sig), {}});
    }
    std::sort(report.frequent.begin(), report.frequent.end(), [](const MinedPattern& a, const MinedPattern& b) {
        if (a.score() != b.score()) return a.score() > b.score();
        if (a.trajectories != b.trajectories) return a.trajectories > b.trajectories;
        return a.signature < b.signature;
    });

    std::map<std::string, std::string> taken;
    ModuleRegistry scratch = registry;
    for (auto& p : report.frequent) {
        if (auto existing = registry.module_with_signature(p.signature)) {
            p.duplicate_of = *existing;
            continue;
        }
        if (auto it = taken.find(p.signature); it != taken.end()) {
            p.duplicate_of = it->second;
            continue;
        }
        auto module = CollaborationModule::make(mined_module_name(p.strategy, scratch), p.strategy, Provenance::Mined);
        bool runnable = std::all_of(module.members.begin(), module.members.end(),
                                    [&](const std::string& m) { return registry.has_agent(m); });
        if (!runnable) continue;
        taken[p.signature] = module.name;
        scratch.add_module(module);
        report.novel.push_back(std::move(module));
    }
    return report;
}

std::vector<CollaborationModule> mine_modules(const TrajectoryStore& store, const ModuleRegistry& registry,
                                              const MinerOptions& options) {
    return mine_patterns(store, registry, options).novel;
}

}  // namespace weaver
