#include "weaver/planner/planner.hpp"

#include <algorithm>
#include <limits>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace {

constexpr double kTieEpsilon = 1e-12;

}  // namespace

std::vector<ActionId> CandidateSet::ids() const {
    std::vector<ActionId> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(c.id);
    return out;
}

std::vector<double> short_term_gain(std::span<const ActionId> ids) {
    const double k = static_cast<double>(ids.size());
    std::map<ActionId, std::size_t> freq;
    for (const auto& id : ids) ++freq[id];
    std::vector<double> g;
    g.reserve(ids.size());
    for (const auto& id : ids) g.push_back(static_cast<double>(freq[id]) / k);
    return g;
}

std::vector<double> short_term_gain(const CandidateSet& candidates) {
    auto ids = candidates.ids();
    return short_term_gain(ids);
}

std::vector<double> long_term_gain(std::span<const std::size_t> feasible_counts) {
    const std::size_t k = feasible_counts.size();
    std::vector<double> h(k, k ? 1.0 / static_cast<double>(k) : 0.0);
    std::size_t total = 0;
    for (auto c : feasible_counts) total += c;
    if (total == 0) return h;
    for (std::size_t i = 0; i < k; ++i) h[i] = static_cast<double>(feasible_counts[i]) / static_cast<double>(total);
    return h;
}

std::vector<double> long_term_gain(const FeasibleSet& feasible) {
    std::vector<std::size_t> counts;
    counts.reserve(feasible.size());
    for (const auto& f : feasible) counts.push_back(f.size());
    return long_term_gain(counts);
}

std::vector<SpeculativeTrajectory> filter_feasible(std::span<const SpeculativeTrajectory> trajectories,
                                                   Money remaining) {
    std::vector<SpeculativeTrajectory> kept;
    for (const auto& t : trajectories)
        if (t.estimated_cost <= remaining) kept.push_back(t);
    return kept;
}

TransitionPrior::TransitionPrior(std::vector<ActionId> states, double smoothing)
    : states_(std::move(states)), smoothing_(smoothing) {
    if (smoothing_ < 0.0) throw InvalidArgument("smoothing must be non-negative");
    if (std::find(states_.begin(), states_.end(), ActionId::finish()) == states_.end())
        states_.push_back(ActionId::finish());
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (!index_.emplace(states_[i], i).second)
            throw DuplicateAction("transition prior lists '" + states_[i].name + "' twice");
    counts_.assign(states_.size(), std::vector<double>(states_.size(), 0.0));
}

TransitionPrior TransitionPrior::fit(std::vector<ActionId> states,
                                     const std::vector<std::vector<ActionId>>& trajectories, double smoothing) {
    TransitionPrior p(std::move(states), smoothing);
    for (const auto& t : trajectories) p.observe(t);
    return p;
}

void TransitionPrior::observe(std::span<const ActionId> trajectory) {
    const ActionId* prev = nullptr;
    for (const auto& id : trajectory) {
        if (!has_state(id)) {
            prev = nullptr;
            continue;
        }
        if (prev != nullptr && !prev->is_finish()) counts_[index_of(*prev)][index_of(id)] += 1.0;
        prev = &id;
        if (id.is_finish()) break;
    }
    if (prev != nullptr && !prev->is_finish()) counts_[index_of(*prev)][index_of(ActionId::finish())] += 1.0;
}

void TransitionPrior::set_row(const ActionId& from, const std::map<ActionId, double>& weights) {
    std::vector<double> row(states_.size(), 0.0);
    double total = 0.0;
    for (const auto& [to, w] : weights) {
        if (w < 0.0) throw InvalidArgument("transition weights must be non-negative");
        row[index_of(to)] += w;
        total += w;
    }
    if (total <= 0.0) throw InvalidArgument("transition row needs positive mass");
    for (auto& x : row) x /= total;
    explicit_rows_[index_of(from)] = std::move(row);
}

std::size_t TransitionPrior::index_of(const ActionId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownAction("'" + id.name + "' is not in the transition prior");
    return it->second;
}

std::vector<double> TransitionPrior::row(const ActionId& from) const {
    const std::size_t i = index_of(from);
    const std::size_t n = states_.size();
    if (from.is_finish()) {
        std::vector<double> r(n, 0.0);
        r[i] = 1.0;
        return r;
    }
    if (auto it = explicit_rows_.find(i); it != explicit_rows_.end()) return it->second;
    double total = 0.0;
    for (double c : counts_[i]) total += c;
    total += smoothing_ * static_cast<double>(n);
    std::vector<double> r(n, 1.0 / static_cast<double>(n));
    if (total <= 0.0) return r;
    for (std::size_t j = 0; j < n; ++j) r[j] = (counts_[i][j] + smoothing_) / total;
    return r;
}

double TransitionPrior::probability(const ActionId& from, const ActionId& to) const {
    return row(from)[index_of(to)];
}

ActionId TransitionPrior::sample_next(const ActionId& from, Rng& rng) const {
    auto r = row(from);
    return states_[rng.categorical(r)];
}

void require_costs(const TransitionPrior& prior, const CostProfile& profile) {
    for (const auto& s : prior.states())
        if (!s.is_finish() && !profile.contains(s))
            throw MissingCostProfile("no learned cost for '" + s.name + "'; speculation cannot price it");
}

namespace {

Money step_cost(const ActionId& id, const CostProfile& profile) {
    if (id.is_finish()) return profile.find_mean(id).value_or(Money{});
    return profile.mean(id);
}

SpeculativeTrajectory rollout(const Action& candidate, const TransitionPrior& prior, const CostProfile& profile,
                              int depth_limit, std::uint64_t key) {
    Rng rng(key);
    SpeculativeTrajectory t;
    t.actions.push_back(candidate.id);
    t.estimated_cost = step_cost(candidate.id, profile);
    ActionId cur = candidate.id;
    while (static_cast<int>(t.actions.size()) < depth_limit && !cur.is_finish()) {
        ActionId next = prior.sample_next(cur, rng);
        if (next.is_finish()) break;
        t.estimated_cost += step_cost(next, profile);
        t.actions.push_back(next);
        cur = std::move(next);
    }
    return t;
}

void check_rollout_args(const Action& candidate, const TransitionPrior& prior, int n_rollouts, int depth_limit) {
    if (n_rollouts < 1) throw InvalidArgument("n_rollouts must be >= 1");
    if (depth_limit < 1) throw InvalidArgument("depth_limit must be >= 1");
    if (!prior.has_state(candidate.id))
        throw UnknownAction("candidate '" + candidate.id.name + "' is outside the prior's action space");
}

}  // namespace

std::vector<SpeculativeTrajectory> speculate(const Action& candidate, const TransitionPrior& prior,
                                             const CostProfile& profile, int n_rollouts, int depth_limit,
                                             std::uint64_t seed) {
    check_rollout_args(candidate, prior, n_rollouts, depth_limit);
    require_costs(prior, profile);
    std::vector<SpeculativeTrajectory> out;
    out.reserve(static_cast<std::size_t>(n_rollouts));
    for (int r = 0; r < n_rollouts; ++r)
        out.push_back(rollout(candidate, prior, profile, depth_limit, mix_keys(seed, static_cast<std::uint64_t>(r))));
    return out;
}

std::vector<std::vector<SpeculativeTrajectory>> speculate_all(const CandidateSet& candidates,
                                                              const TransitionPrior& prior,
                                                              const CostProfile& profile, int n_rollouts,
                                                              int depth_limit, std::uint64_t key, ExecMode mode) {
    const std::size_t k = candidates.k();
    for (const auto& c : candidates.candidates) check_rollout_args(c, prior, n_rollouts, depth_limit);
    require_costs(prior, profile);

    const auto n = static_cast<std::size_t>(n_rollouts);
    std::vector<std::vector<SpeculativeTrajectory>> out(k, std::vector<SpeculativeTrajectory>(n));
    const auto total = static_cast<std::int64_t>(k * n);
    auto work = [&](std::int64_t cell) {
        auto i = static_cast<std::size_t>(cell) / n;
        auto r = static_cast<std::size_t>(cell) % n;
        out[i][r] = rollout(candidates.candidates[i], prior, profile, depth_limit, mix_keys(mix_keys(key, i), r));
    };
    if (mode == ExecMode::Parallel && total > 1) {
        // Each cell writes its own slot; no exception can escape the region
        // because every id was validated above.
#pragma omp parallel for schedule(static)
        for (std::int64_t cell = 0; cell < total; ++cell) work(cell);
    } else {
        for (std::int64_t cell = 0; cell < total; ++cell) work(cell);
    }
    return out;
}

Selection select_action(const CandidateSet& candidates, std::span<const double> g, std::span<const double> h,
                        const CostProfile& profile, const FeasibleSet& feasible, GainWeights weights) {
    const std::size_t k = candidates.k();
    if (k == 0) throw InvalidArgument("cannot select from an empty candidate set");
    if (g.size() != k || h.size() != k) throw InvalidArgument("gain vectors must have one score per candidate");

    Selection sel;
    sel.f.resize(k);
    for (std::size_t i = 0; i < k; ++i) sel.f[i] = weights.g * g[i] + weights.h * h[i];

    auto cost_of = [&](std::size_t i) {
        auto m = profile.find_mean(candidates.candidates[i].id);
        return m ? m->nanos() : std::numeric_limits<std::int64_t>::max();
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < k; ++i) {
        double diff = sel.f[i] - sel.f[best];
        if (diff > kTieEpsilon) {
            best = i;
        } else if (diff >= -kTieEpsilon && cost_of(i) < cost_of(best)) {
            best = i;
        }
    }
    sel.index = best;
    for (const auto& per : feasible)
        for (const auto& t : per) sel.carried.push_back(t);
    return sel;
}

MarkovSpeculator::MarkovSpeculator(const TransitionPrior& prior, const CostProfile& profile, int n_rollouts,
                                   int depth_limit, ExecMode mode)
    : prior_(prior), profile_(profile), n_rollouts_(n_rollouts), depth_limit_(depth_limit), mode_(mode) {
    require_costs(prior_, profile_);
}

std::vector<std::vector<SpeculativeTrajectory>> MarkovSpeculator::rollouts(const CandidateSet& candidates,
                                                                           std::uint64_t key) {
    return speculate_all(candidates, prior_, profile_, n_rollouts_, depth_limit_, key, mode_);
}

DualLevelPlanner::DualLevelPlanner(PlannerParams params, const CostProfile& profile, Speculator* speculator)
    : params_(params), profile_(profile), speculator_(speculator) {
    if (params_.k < 1) throw InvalidArgument("planner K must be >= 1");
    if (!params_.uniform_h && speculator_ == nullptr) throw InvalidArgument("planner needs a speculator");
}

PlanStep DualLevelPlanner::evaluate(CandidateSet candidates, Money remaining, std::uint64_t key) const {
    PlanStep step;
    step.candidates = std::move(candidates);
    const std::size_t k = step.candidates.k();
    if (k == 0) throw PolicyFailure("planner received no candidates");
    step.g = short_term_gain(step.candidates);
    if (params_.uniform_h) {
        step.feasible.assign(k, {});
        step.h.assign(k, 1.0 / static_cast<double>(k));
    } else {
        if (speculator_ == nullptr) throw InvalidArgument("speculative planning needs a speculator");
        step.speculated = speculator_->rollouts(step.candidates, key);
        if (step.speculated.size() != k) throw PolicyFailure("speculator returned the wrong number of rollout sets");
        step.feasible.reserve(k);
        for (const auto& ts : step.speculated) step.feasible.push_back(filter_feasible(ts, remaining));
        step.h = long_term_gain(step.feasible);
    }
    Selection sel = select_action(step.candidates, step.g, step.h, profile_, step.feasible, params_.weights);
    step.f = std::move(sel.f);
    step.chosen = sel.index;
    if (!params_.uniform_h) step.carried = std::move(sel.carried);
    return step;
}

}  // namespace weaver
