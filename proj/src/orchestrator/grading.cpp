#include "weaver/orchestrator/grading.hpp"

#include <cctype>

namespace weaver {

std::string normalize_answer(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (std::isspace(u)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(u));
    }
    auto terminal = [](char c) { return c == '.' || c == '!' || c == '?' || c == ';' || c == ':' || c == ','; };
    while (!out.empty() && (terminal(out.back()) || out.back() == ' ')) out.pop_back();
    return out;
}

bool answers_match(std::string_view answer, std::string_view gold) {
    std::string g = normalize_answer(gold);
    return !g.empty() && normalize_answer(answer) == g;
}

}  // namespace weaver
