#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "weaver/core/random.hpp"
#include "weaver/core/types.hpp"
#include "weaver/reflection/cost_profile.hpp"

namespace weaver {

/// K sampled actions for one step, in sampling order.
struct CandidateSet {
    std::int64_t step = 0;
    std::vector<Action> candidates;

    std::size_t k() const { return candidates.size(); }
    std::vector<ActionId> ids() const;
};

/// A never-executed continuation priced from the cost profile.
struct SpeculativeTrajectory {
    std::vector<ActionId> actions;
    Money estimated_cost;

    friend bool operator==(const SpeculativeTrajectory&, const SpeculativeTrajectory&) = default;
};

// Feasible trajectories per candidate index.
using FeasibleSet = std::vector<std::vector<SpeculativeTrajectory>>;

// g(i) = |{k : id(k) = id(i)}| / K. Subtasks are ignored.
std::vector<double> short_term_gain(const CandidateSet& candidates);
std::vector<double> short_term_gain(std::span<const ActionId> ids);

// h(i) = n_i / sum n; uniform 1/K when every count is zero.
std::vector<double> long_term_gain(std::span<const std::size_t> feasible_counts);
std::vector<double> long_term_gain(const FeasibleSet& feasible);

// Trajectories with estimated_cost <= remaining, order kept.
std::vector<SpeculativeTrajectory> filter_feasible(std::span<const SpeculativeTrajectory> trajectories,
                                                   Money remaining);

/// First-order Markov model over the action space, fitted from logged
/// trajectories with additive smoothing. Finish is absorbing.
class TransitionPrior {
public:
    // `states` is the action space; finish is appended when missing.
    explicit TransitionPrior(std::vector<ActionId> states, double smoothing = 1.0);

    static TransitionPrior fit(std::vector<ActionId> states, const std::vector<std::vector<ActionId>>& trajectories,
                               double smoothing = 1.0);

    // Counts consecutive pairs; a trajectory that does not end in finish
    // gets an implicit final transition to it. Ids outside the state set
    // are skipped together with their transitions.
    void observe(std::span<const ActionId> trajectory);

    // Replaces one row with explicit (normalized) weights.
    void set_row(const ActionId& from, const std::map<ActionId, double>& weights);

    const std::vector<ActionId>& states() const { return states_; }
    bool has_state(const ActionId& id) const { return index_.count(id) != 0; }
    double smoothing() const { return smoothing_; }

    double probability(const ActionId& from, const ActionId& to) const;
    std::vector<double> row(const ActionId& from) const;
    ActionId sample_next(const ActionId& from, Rng& rng) const;

private:
    std::size_t index_of(const ActionId& id) const;

    std::vector<ActionId> states_;
    std::map<ActionId, std::size_t> index_;
    std::vector<std::vector<double>> counts_;
    std::map<std::size_t, std::vector<double>> explicit_rows_;
    double smoothing_;
};

// n_rollouts continuations starting at candidate.id, sampled from the prior
// until finish or depth_limit actions. The trailing finish is not listed.
// Rollout r draws from Rng(mix_keys(seed, r)). No worker is invoked.
std::vector<SpeculativeTrajectory> speculate(const Action& candidate, const TransitionPrior& prior,
                                             const CostProfile& profile, int n_rollouts, int depth_limit,
                                             std::uint64_t seed);

// MissingCostProfile unless every non-finish prior state has a cost entry.
void require_costs(const TransitionPrior& prior, const CostProfile& profile);

enum class ExecMode { Serial, Parallel };

// Rollouts for every candidate; candidate i is seeded with mix_keys(key, i).
// Parallel mode spreads (candidate, rollout) pairs over OpenMP threads and
// returns exactly what the serial reference returns.
std::vector<std::vector<SpeculativeTrajectory>> speculate_all(const CandidateSet& candidates,
                                                              const TransitionPrior& prior,
                                                              const CostProfile& profile, int n_rollouts,
                                                              int depth_limit, std::uint64_t key, ExecMode mode);

struct GainWeights {
    double g = 1.0;
    double h = 1.0;
};

struct Selection {
    std::size_t index = 0;
    std::vector<double> f;
    // Union of every candidate's feasible trajectories, by candidate index.
    std::vector<SpeculativeTrajectory> carried;
};

// argmax of f = w_g * g + w_h * h. Ties (within 1e-12) go to the lower
// profile mean of the candidate id, then to the lower index. Ids missing
// from the profile sort last on cost.
Selection select_action(const CandidateSet& candidates, std::span<const double> g, std::span<const double> h,
                        const CostProfile& profile, const FeasibleSet& feasible, GainWeights weights = {});

struct PlannerParams {
    int k = 3;
    int n_rollouts = 5;
    int depth_limit = 6;
    double smoothing = 1.0;
    GainWeights weights;
    // Sampling boost toward ids seen in carried trajectories.
    double carry_boost = 1.0;
    // Forces h = 1/K and skips speculation and carry-forward.
    bool uniform_h = false;
    ExecMode mode = ExecMode::Parallel;
};

struct PlanStep {
    CandidateSet candidates;
    std::vector<double> g;
    std::vector<double> h;
    std::vector<double> f;
    std::vector<std::vector<SpeculativeTrajectory>> speculated;
    FeasibleSet feasible;
    std::size_t chosen = 0;
    std::vector<SpeculativeTrajectory> carried;

    const Action& action() const { return candidates.candidates.at(chosen); }
};

/// Source of symbolic rollouts. The Markov speculator is the simulator
/// mode; a wire speculator asks the orchestrator model instead.
class Speculator {
public:
    virtual ~Speculator() = default;
    virtual std::vector<std::vector<SpeculativeTrajectory>> rollouts(const CandidateSet& candidates,
                                                                     std::uint64_t key) = 0;
    // Spend of the last rollouts() call; zero for the Markov speculator.
    virtual TokenUsage last_usage() const { return {}; }
};

class MarkovSpeculator final : public Speculator {
public:
    MarkovSpeculator(const TransitionPrior& prior, const CostProfile& profile, int n_rollouts, int depth_limit,
                     ExecMode mode);
    std::vector<std::vector<SpeculativeTrajectory>> rollouts(const CandidateSet& candidates,
                                                             std::uint64_t key) override;

private:
    const TransitionPrior& prior_;
    const CostProfile& profile_;
    int n_rollouts_;
    int depth_limit_;
    ExecMode mode_;
};

/// Scores a sampled candidate set: g from self-consistency, h from the share
/// of budget-feasible speculative trajectories, and picks argmax g + h.
class DualLevelPlanner {
public:
    DualLevelPlanner(PlannerParams params, const CostProfile& profile, Speculator* speculator);

    PlanStep evaluate(CandidateSet candidates, Money remaining, std::uint64_t key) const;

    const PlannerParams& params() const { return params_; }

private:
    PlannerParams params_;
    const CostProfile& profile_;
    Speculator* speculator_;
};

}  // namespace weaver
