#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace weaver {

/// How an ensemble combines its branches: one call to an agent over the
/// concatenated branch outputs, or a free majority vote.
struct Aggregator {
    enum class Kind { Agent, Vote };
    Kind kind = Kind::Agent;
    std::string agent;

    static Aggregator by(std::string agent_name) { return {Kind::Agent, std::move(agent_name)}; }
    static Aggregator vote() { return {Kind::Vote, {}}; }

    friend bool operator==(const Aggregator&, const Aggregator&) = default;
};

class Strategy;

namespace strategy_node {

struct Single {
    std::string agent;
};

struct Pipeline {
    std::vector<Strategy> children;
};

struct Interactive {
    std::shared_ptr<const Strategy> left;
    std::shared_ptr<const Strategy> right;
    int max_rounds = 4;
};

struct Ensemble {
    int n = 2;
    std::shared_ptr<const Strategy> child;
    Aggregator aggregator;
};

}  // namespace strategy_node

/// Immutable coordination-strategy tree.
class Strategy {
public:
    using Node = std::variant<strategy_node::Single, strategy_node::Pipeline, strategy_node::Interactive,
                              strategy_node::Ensemble>;

    static Strategy single(std::string agent);
    static Strategy pipeline(std::vector<Strategy> children);
    static Strategy interactive(Strategy left, Strategy right, int max_rounds);
    static Strategy ensemble(int n, Strategy child, Aggregator aggregator);

    const Node& node() const { return node_; }

    // Agents invoked anywhere in the tree, aggregators included.
    std::set<std::string> agents() const;
    // Agent called first when the strategy runs.
    const std::string& first_agent() const;
    int depth() const;
    // Upper bound on worker invocations for one execution.
    int max_invocations() const;

    // Canonical structural form; equal iff the trees are identical.
    std::string signature() const;

private:
    explicit Strategy(Node node) : node_(std::move(node)) {}
    Node node_;
};

inline constexpr int kDefaultInteractiveRounds = 4;

// Parses the compact expression form used in configs and reflection replies:
//   search
//   pipeline(search, browse)
//   interactive(search, browse, rounds=4)
//   ensemble(3, reason, agg=reason)      agg=vote for a free majority vote
Strategy parse_strategy(std::string_view text);
// Same, with the aggregator used when an ensemble omits agg=.
Strategy parse_strategy(std::string_view text, std::string_view default_aggregator);

// Inverse of parse_strategy.
std::string to_expression(const Strategy& strategy);

}  // namespace weaver
