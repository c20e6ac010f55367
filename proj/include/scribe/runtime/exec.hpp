#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scribe/html/dom.hpp"
#include "scribe/metrics/triple.hpp"

namespace scribe::runtime {

struct ExtractionScript {
    std::string id;
    std::string source;
    // Command template; must contain {adapter}. {script} and {html} are
    // substituted when present, otherwise appended in that order.
    std::string interpreter;
    std::string created_from; // page id the script was generated from
};

enum class ExecStatus { Ok, Empty, Error, Timeout, MalformedOutput };

std::string to_string(ExecStatus s);

struct ExecutionResult {
    ExecStatus status = ExecStatus::Error;
    TripleList triples;                // non-empty only when status == Ok
    std::optional<int> exit_code;
    std::string stderr_tail;           // last 4 KiB
    std::chrono::milliseconds wall_time{0};
};

struct ExecutionLimits {
    std::chrono::milliseconds wall_timeout{30'000};
    std::int64_t max_output_bytes = 16ll * 1024 * 1024;
    int workers = 0; // 0 = logical CPU count
};

// Runs the script in an isolated child process (own process group, isolated
// temp working directory, killed at wall_timeout). The child runs a generated
// adapter that loads the script, calls its entry point with the page HTML via
// a file path, and prints one JSON line of 3-element string arrays on stdout.
// Throws InterpreterNotConfigured, SpawnFailure.
ExecutionResult execute_script(const ExtractionScript& script,
                               const html::RawHtmlDocument& page,
                               const ExecutionLimits& limits);

// One result per page, executed independently on a bounded worker pool.
// Throws EmptyInput on an empty group.
std::map<std::string, ExecutionResult> apply_to_group(
    const ExtractionScript& script,
    const std::vector<html::RawHtmlDocument>& group,
    const ExecutionLimits& limits);

} // namespace scribe::runtime
