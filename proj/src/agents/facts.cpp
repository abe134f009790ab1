#include "weaver/agents/facts.hpp"

#include <charconv>

namespace weaver::facts {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_doc_id(std::string_view tok) {
    if (tok.size() < 2 || tok[0] != 'd') return false;
    for (std::size_t i = 1; i < tok.size(); ++i)
        if (tok[i] < '0' || tok[i] > '9') return false;
    return true;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

int to_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) return -1;
    return v;
}

void scan_line(WorldFacts& f, std::string_view line) {
    line = trim(line);
    if (line.starts_with(kDoneMarker)) line = trim(line.substr(kDoneMarker.size()));
    if (line.starts_with("candidates:")) {
        std::vector<std::string> docs;
        for (auto tok : split_ws(line.substr(11)))
            if (is_doc_id(tok)) docs.emplace_back(tok);
        f.candidate_lists.push_back(std::move(docs));
    } else if (line.starts_with("doc ")) {
        auto toks = split_ws(line.substr(4));
        if (toks.empty() || !is_doc_id(toks[0])) return;
        std::string doc(toks[0]);
        f.docs_read.insert(doc);
        for (std::size_t i = 1; i < toks.size(); ++i) {
            if (!toks[i].starts_with("hop=")) continue;
            auto spec = toks[i].substr(4);
            auto slash = spec.find('/');
            if (slash == std::string_view::npos) continue;
            int hop = to_int(spec.substr(0, slash));
            int total = to_int(spec.substr(slash + 1));
            if (hop <= 0 || total <= 0) continue;
            f.hop_docs.emplace(hop, doc);
            f.total_hops = total;
        }
    } else if (line.starts_with("answer:")) {
        auto a = trim(line.substr(7));
        if (!a.empty()) f.answers.emplace_back(a);
    } else if (line.starts_with("missing:")) {
        auto rest = trim(line.substr(8));
        if (rest.starts_with("hop=")) {
            int hop = to_int(rest.substr(4));
            if (hop > 0) f.missing_hop = hop;
        }
        f.critic_complete = false;
    } else if (line == "complete") {
        f.critic_complete = true;
        f.missing_hop.reset();
    }
}

}  // namespace

int WorldFacts::progress() const {
    int p = 0;
    while (hop_docs.count(p + 1) != 0) ++p;
    return p;
}

void scan_into(WorldFacts& facts, std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        scan_line(facts, text.substr(start, end - start));
        start = end + 1;
    }
}

WorldFacts scan(std::span<const std::string_view> texts) {
    WorldFacts f;
    for (auto t : texts) scan_into(f, t);
    return f;
}

WorldFacts scan(std::string_view text) {
    WorldFacts f;
    scan_into(f, text);
    return f;
}

std::string candidates_line(const std::vector<std::string>& docs) {
    std::string out = "candidates:";
    for (const auto& d : docs) {
        out += ' ';
        out += d;
    }
    return out;
}

std::string doc_line(const std::string& doc, int hop, int total, const std::string& payload) {
    return "doc " + doc + " hop=" + std::to_string(hop) + "/" + std::to_string(total) + " " + payload;
}

std::string irrelevant_line(const std::string& doc) { return "doc " + doc + " irrelevant"; }

std::string answer_line(const std::string& answer) { return "answer: " + answer; }

std::string missing_line(int hop) { return "missing: hop=" + std::to_string(hop); }

std::vector<std::string> doc_ids_in(std::string_view text) {
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        for (auto tok : split_ws(text.substr(start, end - start))) {
            if (is_doc_id(tok) && seen.insert(std::string(tok)).second) out.emplace_back(tok);
        }
        start = end + 1;
    }
    return out;
}

bool starts_with_done(std::string_view text) { return trim(text).starts_with(kDoneMarker); }

}  // namespace weaver::facts
