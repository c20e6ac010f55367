#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "scribe/util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using scribe::util::read_file;
using scribe::util::write_file;

namespace {

const std::string kBin = SCRIBE_FORGE_BIN;

struct Workdir {
    fs::path path;
    Workdir() {
        path = fs::temp_directory_path() / ("scribe-cli-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~Workdir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        std::string p = (path / name).string();
        write_file(p, content);
        return p;
    }
    std::string out(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    int rc = std::system((kBin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("dedup subcommand prints deduped html and exits 0") {
    Workdir wd;
    std::string in = wd.file("page.html",
                             "<ul><li class=a>1</li><li class=a>2</li><li class=a>3</li>"
                             "<li class=a>4</li><li class=a>5</li></ul>");
    std::string out = wd.out("deduped.html");
    CHECK(run("dedup --in " + in + " --out " + out) == 0);
    std::string text = read_file(out);
    CHECK(text.find("<!-- ... 2 more <li class='a'> elements ... -->") != std::string::npos);
    // --z flag overrides the default
    CHECK(run("dedup --in " + in + " --z 1 --out " + out) == 0);
    CHECK(read_file(out).find(" ... 4 more ") != std::string::npos);
}

TEST_CASE("flatten subcommand strips markup") {
    Workdir wd;
    std::string in = wd.file("page.html", "<div><b>bold</b> and <script>x<y</script>plain</div>");
    std::string out = wd.out("flat.txt");
    CHECK(run("flatten --in " + in + " --out " + out) == 0);
    std::string text = read_file(out);
    CHECK(text.find('<') == std::string::npos);
    CHECK(text.find("bold and plain") != std::string::npos);
}

TEST_CASE("score on identical files reports perfect fuzzy PRF") {
    Workdir wd;
    std::string gold = wd.file("g.jsonl", "[\"a\",\"b\",\"c\"]\n[\"d\",\"e\",\"f\"]\n");
    std::string out = wd.out("report.json");
    CHECK(run("score --gold " + gold + " --pred " + gold + " --out " + out) == 0);
    json report = json::parse(read_file(out));
    CHECK(report["fuzzy"]["p"] == 1.0);
    CHECK(report["fuzzy"]["r"] == 1.0);
    CHECK(report["fuzzy"]["f1"] == 1.0);
    CHECK(report["gold_size"] == 2);
    CHECK(report["lm"].is_null());
    CHECK(report["extrapolated"] == false);
}

TEST_CASE("reward subcommand computes both formulas") {
    Workdir wd;
    std::string scores = wd.file(
        "scores.jsonl",
        "{\"anchor\": \"p\", \"scores\": {\"p\": 0.9, \"q\": 0.5, \"r\": 0.1}}\n");
    std::string out = wd.out("reward.jsonl");
    CHECK(run("reward --scores " + scores + " --out " + out) == 0);
    json row = json::parse(read_file(out));
    CHECK(row["formula"] == "scribes");
    CHECK(row["self"] == 0.9);
    CHECK(row["cross_mean"] == 0.3);
    CHECK(row["total"] == 0.5);
    CHECK(run("reward --scores " + scores + " --formula self-only --out " + out) == 0);
    row = json::parse(read_file(out));
    CHECK(row["total"] == 0.9);
}

TEST_CASE("eval subcommand builds a per-split report") {
    Workdir wd;
    std::string runs = wd.file(
        "runs.jsonl",
        "{\"anchor\":\"a\",\"url\":\"a\",\"gold\":[[\"s\",\"p\",\"o\"]],\"pred\":[[\"s\",\"p\",\"o\"]]}\n"
        "{\"anchor\":\"a\",\"url\":\"b\",\"gold\":[[\"s\",\"p\",\"o\"]],\"pred\":[]}\n");
    std::string out = wd.out("eval.json");
    CHECK(run("eval --runs " + runs + " --out " + out) == 0);
    json report = json::parse(read_file(out));
    CHECK(report["examples"] == 1);
    CHECK(report["holdout_examples"] == 1);
    CHECK(report["all"]["mean_p"] == 0.5);
    CHECK(report["example"]["mean_p"] == 1.0);
    CHECK(report["holdout"]["mean_p"] == 0.0);
    // Byte-determinism across runs.
    std::string out2 = wd.out("eval2.json");
    CHECK(run("eval --runs " + runs + " --out " + out2) == 0);
    CHECK(read_file(out) == read_file(out2));
}

TEST_CASE("speedup subcommand") {
    Workdir wd;
    std::string out = wd.out("speedup.json");
    CHECK(run("speedup --k 4 --dedup-tokens 8879 --flat-tokens 2399 --out " + out) == 0);
    json j = json::parse(read_file(out));
    CHECK(j["rho"].get<double>() == doctest::Approx(3.7011).epsilon(0.001));
    CHECK(j["speedup"].get<double>() >= 1.0);
}

TEST_CASE("exit codes distinguish usage and domain errors") {
    Workdir wd;
    CHECK(run("") == 2);                           // missing subcommand
    CHECK(run("score --gold missing.jsonl") == 2); // missing required --pred
    CHECK(run("score --gold /nonexistent --pred /nonexistent") == 1);
    CHECK(run("speedup --k 0 --dedup-tokens 1 --flat-tokens 1") == 1);
    std::string bad_cfg = wd.file("bad.json", "{\"mystery\": 1}");
    std::string page = wd.file("p.html", "<p>x</p>");
    CHECK(run("--config " + bad_cfg + " dedup --in " + page) == 2);
}

TEST_CASE("mock-backed generate runs end to end") {
    Workdir wd;
    std::string mock = wd.file(
        "gen.jsonl",
        json({{"match", ""},
              {"response", "```python\ndef main(html):\n    return [('s', 'p', 'o')]\n```"}})
                .dump() +
            "\n");
    json cfg = {
        {"profiles", {{"gen", {{"transport", "mock"}, {"mock_script", mock}}}}},
        {"limits", {{"interpreter_command", "python3 {adapter} {script} {html}"},
                    {"wall_timeout_secs", 8}}},
    };
    std::string cfg_path = wd.file("cfg.json", cfg.dump());
    std::string page = wd.file("page.html", "<table><tr><td>v</td></tr></table>");
    std::string out = wd.out("gen.json");
    CHECK(run("--config " + cfg_path + " generate --page " + page +
              " --generator gen --iters 3 --out " + out) == 0);
    json result = json::parse(read_file(out));
    CHECK(result["final_status"] == "ok");
    CHECK(result["iterations_used"] == 1);
    CHECK(result["script"].get<std::string>().find("def main") != std::string::npos);
}
