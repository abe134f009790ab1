#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Line vocabulary spoken by the synthetic world. Workers emit these lines,
// the rule policies and aggregators read them back.
//
//   candidates: d12 d7 d301 d44 d9
//   doc d12 hop=1/3 next=e-5f1a
//   doc d9 hop=3/3 evidence=e-77c0
//   doc d44 irrelevant
//   answer: <text>
//   missing: hop=2
//   complete
//
// A worker output that starts with "[[DONE]]" ends an interactive exchange.

namespace weaver::facts {

inline constexpr std::string_view kDoneMarker = "[[DONE]]";
inline constexpr std::string_view kAggregatePrefix = "aggregate:";

struct WorldFacts {
    std::vector<std::vector<std::string>> candidate_lists;
    std::map<int, std::string> hop_docs;
    int total_hops = 0;
    std::set<std::string> docs_read;
    std::vector<std::string> answers;
    std::optional<int> missing_hop;
    bool critic_complete = false;

    // Number of chain hops found contiguously from the first.
    int progress() const;
    bool chain_complete() const { return total_hops > 0 && progress() >= total_hops; }
};

void scan_into(WorldFacts& facts, std::string_view text);
WorldFacts scan(std::span<const std::string_view> texts);
WorldFacts scan(std::string_view text);

std::string candidates_line(const std::vector<std::string>& docs);
std::string doc_line(const std::string& doc, int hop, int total, const std::string& payload);
std::string irrelevant_line(const std::string& doc);
std::string answer_line(const std::string& answer);
std::string missing_line(int hop);

// Document ids ("d<digits>") mentioned anywhere in text, in order, unique.
std::vector<std::string> doc_ids_in(std::string_view text);

bool starts_with_done(std::string_view text);

}  // namespace weaver::facts
