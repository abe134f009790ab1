#include "weaver/collab/strategy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "weaver/core/errors.hpp"

namespace weaver {

namespace sn = strategy_node;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void collect_agents(const Strategy& s, std::set<std::string>& out) {
    std::visit(overloaded{
                   [&](const sn::Single& n) { out.insert(n.agent); },
                   [&](const sn::Pipeline& n) {
                       for (const auto& c : n.children) collect_agents(c, out);
                   },
                   [&](const sn::Interactive& n) {
                       collect_agents(*n.left, out);
                       collect_agents(*n.right, out);
                   },
                   [&](const sn::Ensemble& n) {
                       collect_agents(*n.child, out);
                       if (n.aggregator.kind == Aggregator::Kind::Agent) out.insert(n.aggregator.agent);
                   },
               },
               s.node());
}

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

class ExprParser {
public:
    ExprParser(std::string_view text, std::string_view default_agg) : text_(text), default_agg_(default_agg) {}

    Strategy parse_all() {
        Strategy s = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return s;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseFailure("strategy expression: " + why + " at offset " + std::to_string(pos_) + " in '" +
                           std::string(text_) + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
                ++pos_;
            } else {
                break;
            }
        }
        if (start == pos_) fail("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }

    int integer() {
        std::string tok = ident();
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) fail("expected an integer, got '" + tok + "'");
        return v;
    }

    // Parses `key=value` if the next token is `key`; returns empty otherwise.
    std::string keyword(std::string_view key) {
        skip_ws();
        std::size_t save = pos_;
        std::string name = ident();
        if (name != key || !peek('=')) {
            pos_ = save;
            return {};
        }
        ++pos_;
        return ident();
    }

    Strategy parse_expr() {
        std::string head = ident();
        if (!peek('(')) return Strategy::single(head);
        expect('(');
        if (head == "pipeline") {
            std::vector<Strategy> children;
            children.push_back(parse_expr());
            while (peek(',')) {
                ++pos_;
                children.push_back(parse_expr());
            }
            expect(')');
            return Strategy::pipeline(std::move(children));
        }
        if (head == "interactive") {
            Strategy left = parse_expr();
            expect(',');
            Strategy right = parse_expr();
            int rounds = kDefaultInteractiveRounds;
            if (peek(',')) {
                ++pos_;
                std::string r = keyword("rounds");
                if (r.empty()) fail("expected rounds=<n>");
                int v = 0;
                auto [p, ec] = std::from_chars(r.data(), r.data() + r.size(), v);
                if (ec != std::errc() || p != r.data() + r.size()) fail("bad rounds value '" + r + "'");
                rounds = v;
            }
            expect(')');
            return Strategy::interactive(std::move(left), std::move(right), rounds);
        }
        if (head == "ensemble") {
            int n = integer();
            expect(',');
            Strategy child = parse_expr();
            std::string agg(default_agg_);
            if (peek(',')) {
                ++pos_;
                agg = keyword("agg");
                if (agg.empty()) fail("expected agg=<agent|vote>");
            }
            if (agg.empty()) fail("ensemble needs an aggregator");
            expect(')');
            return Strategy::ensemble(n, std::move(child), agg == "vote" ? Aggregator::vote() : Aggregator::by(agg));
        }
        fail("unknown combinator '" + head + "'");
    }

    std::string_view text_;
    std::string_view default_agg_;
    std::size_t pos_ = 0;
};

}  // namespace

Strategy Strategy::single(std::string agent) {
    if (!valid_name(agent)) throw InvalidArgument("invalid agent name '" + agent + "' in strategy");
    return Strategy(sn::Single{std::move(agent)});
}

Strategy Strategy::pipeline(std::vector<Strategy> children) {
    if (children.empty()) throw InvalidArgument("pipeline needs at least one child");
    return Strategy(sn::Pipeline{std::move(children)});
}

Strategy Strategy::interactive(Strategy left, Strategy right, int max_rounds) {
    if (max_rounds < 1) throw InvalidArgument("interactive max_rounds must be >= 1");
    return Strategy(sn::Interactive{std::make_shared<const Strategy>(std::move(left)),
                                    std::make_shared<const Strategy>(std::move(right)), max_rounds});
}

Strategy Strategy::ensemble(int n, Strategy child, Aggregator aggregator) {
    if (n < 2) throw InvalidArgument("ensemble needs n >= 2");
    if (aggregator.kind == Aggregator::Kind::Agent && !valid_name(aggregator.agent))
        throw InvalidArgument("ensemble aggregator must name an agent");
    return Strategy(sn::Ensemble{n, std::make_shared<const Strategy>(std::move(child)), std::move(aggregator)});
}

std::set<std::string> Strategy::agents() const {
    std::set<std::string> out;
    collect_agents(*this, out);
    return out;
}

const std::string& Strategy::first_agent() const {
    return std::visit(overloaded{
                          [](const sn::Single& n) -> const std::string& { return n.agent; },
                          [](const sn::Pipeline& n) -> const std::string& { return n.children.front().first_agent(); },
                          [](const sn::Interactive& n) -> const std::string& { return n.left->first_agent(); },
                          [](const sn::Ensemble& n) -> const std::string& { return n.child->first_agent(); },
                      },
                      node_);
}

int Strategy::depth() const {
    return std::visit(overloaded{
                          [](const sn::Single&) { return 1; },
                          [](const sn::Pipeline& n) {
                              int d = 0;
                              for (const auto& c : n.children) d = std::max(d, c.depth());
                              return d + 1;
                          },
                          [](const sn::Interactive& n) { return 1 + std::max(n.left->depth(), n.right->depth()); },
                          [](const sn::Ensemble& n) { return 1 + n.child->depth(); },
                      },
                      node_);
}

int Strategy::max_invocations() const {
    return std::visit(overloaded{
                          [](const sn::Single&) { return 1; },
                          [](const sn::Pipeline& n) {
                              int total = 0;
                              for (const auto& c : n.children) total += c.max_invocations();
                              return total;
                          },
                          [](const sn::Interactive& n) {
                              return n.max_rounds * (n.left->max_invocations() + n.right->max_invocations());
                          },
                          [](const sn::Ensemble& n) {
                              return n.n * n.child->max_invocations() +
                                     (n.aggregator.kind == Aggregator::Kind::Agent ? 1 : 0);
                          },
                      },
                      node_);
}

std::string to_expression(const Strategy& strategy) {
    return std::visit(overloaded{
                          [](const sn::Single& n) { return n.agent; },
                          [](const sn::Pipeline& n) {
                              std::string s = "pipeline(";
                              for (std::size_t i = 0; i < n.children.size(); ++i) {
                                  if (i) s += ", ";
                                  s += to_expression(n.children[i]);
                              }
                              return s + ")";
                          },
                          [](const sn::Interactive& n) {
                              return "interactive(" + to_expression(*n.left) + ", " + to_expression(*n.right) +
                                     ", rounds=" + std::to_string(n.max_rounds) + ")";
                          },
                          [](const sn::Ensemble& n) {
                              std::string agg = n.aggregator.kind == Aggregator::Kind::Vote ? "vote" : n.aggregator.agent;
                              return "ensemble(" + std::to_string(n.n) + ", " + to_expression(*n.child) +
                                     ", agg=" + agg + ")";
                          },
                      },
                      strategy.node());
}

std::string Strategy::signature() const {
    // Tagged prefix form; a one-child pipeline is kept distinct from its child.
    return std::visit(overloaded{
                          [](const sn::Single& n) { return "S(" + n.agent + ")"; },
                          [](const sn::Pipeline& n) {
                              std::string s = "P(";
                              for (std::size_t i = 0; i < n.children.size(); ++i) {
                                  if (i) s += ',';
                                  s += n.children[i].signature();
                              }
                              return s + ")";
                          },
                          [](const sn::Interactive& n) {
                              return "I(" + n.left->signature() + "," + n.right->signature() + ",r" +
                                     std::to_string(n.max_rounds) + ")";
                          },
                          [](const sn::Ensemble& n) {
                              std::string agg = n.aggregator.kind == Aggregator::Kind::Vote ? "#vote" : n.aggregator.agent;
                              return "E(" + std::to_string(n.n) + "," + n.child->signature() + "," + agg + ")";
                          },
                      },
                      node_);
}

Strategy parse_strategy(std::string_view text) { return ExprParser(text, {}).parse_all(); }

Strategy parse_strategy(std::string_view text, std::string_view default_aggregator) {
    return ExprParser(text, default_aggregator).parse_all();
}

}  // namespace weaver
