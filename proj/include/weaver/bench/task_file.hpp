#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "weaver/core/types.hpp"

namespace weaver {

// One JSON object per line: {"id", "question", "answer", "meta"?}. meta
// values must be strings. Ids are unique and answers non-empty.
std::vector<Task> read_tasks(std::istream& in);
std::vector<Task> load_tasks(const std::filesystem::path& path);

void write_tasks(std::ostream& out, const std::vector<Task>& tasks);
void save_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks);

}  // namespace weaver
