#include "scribe/util.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "scribe/errors.hpp"

namespace scribe::util {

std::vector<nlohmann::json> read_jsonl(const std::string& path, std::size_t* skipped) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<nlohmann::json> rows;
    std::string line;
    std::size_t bad = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            rows.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error&) {
            bad++;
        }
    }
    if (skipped) *skipped = bad;
    return rows;
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& row : rows) out << row.dump() << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < n; i++) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; t++) {
        threads.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace scribe::util
