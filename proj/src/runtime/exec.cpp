#include "scribe/runtime/exec.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"

#include "scribe/errors.hpp"
#include "scribe/util.hpp"

namespace scribe::runtime {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kStderrTailBytes = 4096;

// Adapter written next to the script: loads it, calls main(html) and prints
// one JSON line of stringified 3-element rows. All script logging must go to
// stderr; stdout is reserved for the result line.
constexpr const char* kPythonAdapter = R"PY(import json
import sys

def _run():
    with open(sys.argv[1], "r", encoding="utf-8", errors="replace") as f:
        source = f.read()
    with open(sys.argv[2], "r", encoding="utf-8", errors="replace") as f:
        html = f.read()
    scope = {"__name__": "__scribe_script__"}
    exec(compile(source, sys.argv[1], "exec"), scope)
    entry = scope.get("main")
    if entry is None:
        raise RuntimeError("script defines no main(html) entry point")
    rows = entry(html) or []
    out = []
    for row in rows:
        out.append([x if isinstance(x, str) else str(x) for x in row])
    sys.stdout.write(json.dumps(out) + "\n")

_run()
)PY";

struct ProcessOutput {
    int exit_code = -1;
    bool timed_out = false;
    bool truncated = false;
    std::string out;
    std::string stderr_tail;
    std::chrono::milliseconds wall_time{0};
};

void append_tail(std::string& tail, const char* data, std::size_t len) {
    tail.append(data, len);
    if (tail.size() > kStderrTailBytes) tail.erase(0, tail.size() - kStderrTailBytes);
}

ProcessOutput run_process(const std::vector<std::string>& argv, const std::string& cwd,
                          const ExecutionLimits& limits) {
    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
        throw SpawnFailure("pipe: " + std::string(std::strerror(errno)));
    }

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        throw SpawnFailure("fork: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        // Child: own process group so the whole tree can be killed on timeout.
        setpgid(0, 0);
        if (!cwd.empty()) {
            if (chdir(cwd.c_str()) != 0) _exit(127);
        }
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);

    ProcessOutput result;
    const auto deadline = start + limits.wall_timeout;
    bool out_open = true;
    bool err_open = true;
    char buffer[65536];

    auto kill_tree = [&] {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
    };

    while (out_open || err_open) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill_tree();
            break;
        }
        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
        const int remaining = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        int rv = poll(fds, nfds, std::max(1, std::min(remaining, 200)));
        if (rv < 0 && errno != EINTR) break;
        if (rv <= 0) continue;
        for (nfds_t i = 0; i < nfds; i++) {
            if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
            const bool is_out = fds[i].fd == out_pipe[0];
            ssize_t n = read(fds[i].fd, buffer, sizeof buffer);
            if (n <= 0) {
                if (is_out) out_open = false;
                else err_open = false;
                continue;
            }
            if (is_out) {
                result.out.append(buffer, static_cast<std::size_t>(n));
                if (static_cast<std::int64_t>(result.out.size()) > limits.max_output_bytes) {
                    result.truncated = true;
                    result.out.resize(static_cast<std::size_t>(limits.max_output_bytes));
                    kill_tree();
                    out_open = err_open = false;
                }
            } else {
                append_tail(result.stderr_tail, buffer, static_cast<std::size_t>(n));
            }
        }
    }
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    if (result.timed_out || result.truncated) {
        kill_tree();
        waitpid(pid, &status, 0);
        result.exit_code = -1;
    } else {
        waitpid(pid, &status, 0);
        if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
        else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
    }
    result.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return result;
}

std::vector<std::string> split_command(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> parts;
    std::string part;
    while (in >> part) parts.push_back(part);
    return parts;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "scribe-exec-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw SpawnFailure("mkdtemp failed");
        path = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::optional<TripleList> parse_output_line(const std::string& out) {
    std::istringstream in(out);
    std::string line;
    std::string payload;
    while (std::getline(in, line)) {
        if (!util::trim(line).empty()) {
            if (!payload.empty()) return std::nullopt; // more than one line
            payload = util::trim(line);
        }
    }
    if (payload.empty()) return std::nullopt;
    nlohmann::json parsed = nlohmann::json::parse(payload, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) return std::nullopt;
    TripleList triples;
    for (const auto& row : parsed) {
        if (!row.is_array() || row.size() != 3) return std::nullopt;
        for (const auto& cell : row) {
            if (!cell.is_string()) return std::nullopt;
        }
        triples.push_back({row[0].get<std::string>(), row[1].get<std::string>(),
                           row[2].get<std::string>()});
    }
    return triples;
}

} // namespace

std::string to_string(ExecStatus s) {
    switch (s) {
        case ExecStatus::Ok: return "ok";
        case ExecStatus::Empty: return "empty";
        case ExecStatus::Error: return "error";
        case ExecStatus::Timeout: return "timeout";
        case ExecStatus::MalformedOutput: return "malformed_output";
    }
    return "error";
}

ExecutionResult execute_script(const ExtractionScript& script,
                               const html::RawHtmlDocument& page,
                               const ExecutionLimits& limits) {
    if (script.interpreter.empty()) {
        throw InterpreterNotConfigured("no interpreter command configured");
    }
    if (script.interpreter.find("{adapter}") == std::string::npos) {
        throw InterpreterNotConfigured("interpreter command lacks {adapter} placeholder");
    }

    TempDir dir;
    const std::string adapter_path = (dir.path / "adapter.py").string();
    const std::string script_path = (dir.path / "script.py").string();
    const std::string html_path = (dir.path / "page.html").string();
    util::write_file(adapter_path, kPythonAdapter);
    util::write_file(script_path, script.source);
    util::write_file(html_path, page.html);

    std::string command = script.interpreter;
    replace_all(command, "{adapter}", adapter_path);
    const bool has_script = command.find("{script}") != std::string::npos;
    const bool has_html = command.find("{html}") != std::string::npos;
    replace_all(command, "{script}", script_path);
    replace_all(command, "{html}", html_path);
    std::vector<std::string> argv = split_command(command);
    if (argv.empty()) throw InterpreterNotConfigured("empty interpreter command");
    if (!has_script) argv.push_back(script_path);
    if (!has_html) argv.push_back(html_path);

    ProcessOutput out = run_process(argv, dir.path.string(), limits);

    ExecutionResult result;
    result.stderr_tail = out.stderr_tail;
    result.wall_time = out.wall_time;
    if (out.exit_code >= 0) result.exit_code = out.exit_code;

    if (out.timed_out) {
        result.status = ExecStatus::Timeout;
        return result;
    }
    if (out.truncated) {
        result.status = ExecStatus::MalformedOutput;
        return result;
    }
    if (out.exit_code != 0) {
        result.status = ExecStatus::Error;
        return result;
    }
    auto triples = parse_output_line(out.out);
    if (!triples) {
        result.status = ExecStatus::MalformedOutput;
        return result;
    }
    if (triples->empty()) {
        result.status = ExecStatus::Empty;
        return result;
    }
    result.status = ExecStatus::Ok;
    result.triples = std::move(*triples);
    return result;
}

std::map<std::string, ExecutionResult> apply_to_group(
    const ExtractionScript& script,
    const std::vector<html::RawHtmlDocument>& group,
    const ExecutionLimits& limits) {
    if (group.empty()) throw EmptyInput("apply_to_group on empty group");
    std::vector<ExecutionResult> results(group.size());
    util::parallel_for(group.size(), limits.workers, [&](std::size_t i) {
        try {
            results[i] = execute_script(script, group[i], limits);
        } catch (const Error& e) {
            ExecutionResult failed;
            failed.status = ExecStatus::Error;
            failed.stderr_tail = e.what();
            results[i] = failed;
        }
    });
    std::map<std::string, ExecutionResult> by_page;
    for (std::size_t i = 0; i < group.size(); i++) {
        by_page[group[i].url] = std::move(results[i]);
    }
    return by_page;
}

} // namespace scribe::runtime
