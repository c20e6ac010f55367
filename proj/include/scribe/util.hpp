#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace scribe::util {

// Reads a JSONL file; malformed lines are skipped and counted in *skipped.
std::vector<nlohmann::json> read_jsonl(const std::string& path, std::size_t* skipped = nullptr);

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Runs fn(i) for i in [0, n) on at most `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

std::string trim(const std::string& s);
std::string lower(std::string s);

} // namespace scribe::util
