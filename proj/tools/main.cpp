// scribe-forge: command line front end for the extraction stack.
//
// Subcommands: dedup, flatten, score, reward, eval, run-script, generate,
// pipeline, qa, speedup. Exit codes: 0 success, 1 domain error, 2 usage
// error. All machine output goes to --out (or stdout); diagnostics to stderr.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scribe/errors.hpp"
#include "scribe/gateway/gateway.hpp"
#include "scribe/gateway/literal.hpp"
#include "scribe/gateway/templates.hpp"
#include "scribe/html/dedup.hpp"
#include "scribe/html/tokens.hpp"
#include "scribe/io.hpp"
#include "scribe/metrics/matching.hpp"
#include "scribe/metrics/prf.hpp"
#include "scribe/pipeline/pipeline.hpp"
#include "scribe/qa/qa.hpp"
#include "scribe/reward/reward.hpp"
#include "scribe/runtime/agentic.hpp"
#include "scribe/runtime/exec.hpp"
#include "scribe/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scribe;

namespace {

struct RunConfig {
    std::map<std::string, gateway::EndpointProfile> profiles;
    runtime::ExecutionLimits limits;
    std::string interpreter_command;
    pipeline::PipelineThresholds thresholds;
    html::DedupConfig dedup;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    std::string templates_dir;
};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
    }
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (!path.empty()) {
        json j = json::parse(util::read_file(path));
        reject_unknown(j, {"profiles", "limits", "thresholds", "dedup", "seed",
                           "output_dir", "templates_dir"}, "config root");
        if (j.contains("profiles")) {
            for (auto it = j["profiles"].begin(); it != j["profiles"].end(); ++it)
                cfg.profiles.emplace(it.key(), gateway::EndpointProfile::from_json(it.key(), it.value()));
        }
        if (j.contains("limits")) {
            const json& l = j["limits"];
            reject_unknown(l, {"interpreter_command", "wall_timeout_secs", "max_output_bytes", "workers"},
                           "limits");
            cfg.interpreter_command = l.value("interpreter_command", "");
            if (l.contains("wall_timeout_secs"))
                cfg.limits.wall_timeout = std::chrono::milliseconds(
                    static_cast<std::int64_t>(l["wall_timeout_secs"].get<double>() * 1000));
            if (l.contains("max_output_bytes")) cfg.limits.max_output_bytes = l["max_output_bytes"];
            if (l.contains("workers")) cfg.limits.workers = l["workers"];
        }
        if (j.contains("thresholds")) {
            const json& t = j["thresholds"];
            reject_unknown(t, {"n", "m", "k"}, "thresholds");
            cfg.thresholds.n = t.value("n", cfg.thresholds.n);
            cfg.thresholds.m = t.value("m", cfg.thresholds.m);
            cfg.thresholds.k = t.value("k", cfg.thresholds.k);
        }
        if (j.contains("dedup")) {
            const json& d = j["dedup"];
            reject_unknown(d, {"z", "normalize_whitespace"}, "dedup");
            cfg.dedup.z = d.value("z", cfg.dedup.z);
            cfg.dedup.normalize_whitespace = d.value("normalize_whitespace", true);
        }
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.output_dir = j.value("output_dir", ".");
        cfg.templates_dir = j.value("templates_dir", "");
    }
    // Env overrides sit between the file and the flags.
    if (const char* v = std::getenv("SCRIBE_SEED")) cfg.seed = std::stoull(v);
    if (const char* v = std::getenv("SCRIBE_OUTPUT_DIR")) cfg.output_dir = v;
    if (const char* v = std::getenv("SCRIBE_INTERPRETER_COMMAND")) cfg.interpreter_command = v;
    return cfg;
}

gateway::TemplateStore templates_of(const RunConfig& cfg) {
    return cfg.templates_dir.empty() ? gateway::TemplateStore::builtin()
                                     : gateway::TemplateStore::from_dir(cfg.templates_dir);
}

gateway::LlmHandle handle_of(const RunConfig& cfg, const std::string& profile) {
    auto it = cfg.profiles.find(profile);
    if (it == cfg.profiles.end()) throw ConfigError("no endpoint profile named '" + profile + "'");
    auto gw = std::make_shared<gateway::Gateway>(it->second);
    return [gw](const std::string& prompt) { return gw->complete(prompt).response_text; };
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        util::write_file(out_path, text.empty() || text.back() == '\n' ? text : text + "\n");
    }
}

void emit_json(const std::string& out_path, const json& j) { emit(out_path, j.dump(2)); }

TripleList read_triples_jsonl(const std::string& path) {
    std::size_t skipped = 0;
    auto rows = util::read_jsonl(path, &skipped);
    if (skipped) std::cerr << path << ": skipped " << skipped << " malformed lines\n";
    json arr = json::array();
    for (auto& r : rows) arr.push_back(std::move(r));
    return io::triples_from_json(arr);
}

html::RawHtmlDocument page_from_json(const json& row) {
    html::RawHtmlDocument page;
    page.url = row.value("url", "");
    page.html = row.value("html", "");
    if (row.contains("title") && row["title"].is_string())
        page.title = row["title"].get<std::string>();
    return page;
}

std::vector<html::RawHtmlDocument> read_pages(const std::string& path) {
    std::vector<html::RawHtmlDocument> pages;
    if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") {
        for (const auto& row : util::read_jsonl(path)) pages.push_back(page_from_json(row));
    } else {
        pages.push_back({path, util::read_file(path), std::nullopt});
    }
    return pages;
}

// --- pipeline record (de)serialization -------------------------------------

pipeline::PageRecord record_from_json(const json& row) {
    pipeline::PageRecord rec;
    rec.url = row.value("url", "");
    rec.html = row.value("html", "");
    if (row.contains("title") && row["title"].is_string()) rec.title = row["title"].get<std::string>();
    if (row.contains("language") && row["language"].is_string())
        rec.detected_language = row["language"].get<std::string>();
    rec.blacklist_flag = row.value("blacklisted", false);
    return rec;
}

json record_to_json(const pipeline::PageRecord& rec) {
    json j = {{"url", rec.url}, {"html", rec.html},
              {"title", rec.title ? json(*rec.title) : json(nullptr)}};
    if (rec.detected_language) j["language"] = *rec.detected_language;
    if (rec.blacklist_flag) j["blacklisted"] = true;
    return j;
}

json group_to_json(const pipeline::PageGroup& g) {
    json pages = json::array();
    for (const auto& p : g.pages) pages.push_back(record_to_json(p));
    json cls = json::object();
    for (const auto& [url, yes] : g.classified_semi_structured) cls[url] = yes;
    return {{"key", g.key}, {"pages", pages}, {"classified", cls}};
}

pipeline::PageGroup group_from_json(const json& row) {
    pipeline::PageGroup g;
    g.key = row.value("key", "");
    for (const auto& p : row["pages"]) g.pages.push_back(record_from_json(p));
    if (row.contains("classified")) {
        for (auto it = row["classified"].begin(); it != row["classified"].end(); ++it)
            g.classified_semi_structured[it.key()] = it.value().get<bool>();
    }
    return g;
}

json example_to_json(const pipeline::TrainingExample& ex) {
    json pages = json::array();
    for (const auto& p : ex.reward_pages) pages.push_back(record_to_json(p));
    json gold = json::object();
    for (const auto& [url, triples] : ex.synthetic_gold) gold[url] = io::triples_to_json(triples);
    return {{"anchor_url", ex.anchor.url},
            {"pages", pages},
            {"gold", gold},
            {"source", ex.source == pipeline::GoldSource::Synthetic ? "synthetic" : "annotated"}};
}

pipeline::TrainingExample example_from_json(const json& row) {
    pipeline::TrainingExample ex;
    for (const auto& p : row["pages"]) ex.reward_pages.push_back(record_from_json(p));
    const std::string anchor_url = row.value("anchor_url", "");
    for (const auto& p : ex.reward_pages)
        if (p.url == anchor_url) ex.anchor = p;
    if (ex.anchor.url.empty() && !ex.reward_pages.empty()) ex.anchor = ex.reward_pages.front();
    if (row.contains("gold")) {
        for (auto it = row["gold"].begin(); it != row["gold"].end(); ++it)
            ex.synthetic_gold[it.key()] = io::triples_from_json(it.value());
    }
    ex.source = row.value("source", "synthetic") == "annotated" ? pipeline::GoldSource::Annotated
                                                                : pipeline::GoldSource::Synthetic;
    return ex;
}

// --- subcommand bodies ------------------------------------------------------

int cmd_dedup(const RunConfig& cfg, const std::string& in, const std::string& out,
              const std::string& counter, bool flatten) {
    html::TokenCounterRegistry counters;
    std::string text;
    for (const auto& page : read_pages(in)) {
        std::string one = flatten ? html::flatten_html(page) : html::dedup_html(page, cfg.dedup);
        if (!counter.empty()) {
            auto tc = counters.count(one, counter);
            std::cerr << page.url << ": " << tc.count << " tokens (" << tc.counter_id << ")\n";
        }
        if (!text.empty()) text += "\n";
        text += one;
    }
    emit(out, text);
    return 0;
}

int cmd_score(const RunConfig& cfg, const std::string& gold_path, const std::string& pred_path,
              const std::string& judge_profile, int deadline_secs, bool greedy,
              const std::string& out) {
    TripleList gold = read_triples_jsonl(gold_path);
    TripleList pred = read_triples_jsonl(pred_path);
    metrics::Matching m = greedy
        ? metrics::match_greedy(gold, pred, std::chrono::seconds(deadline_secs))
        : metrics::match_exact(gold, pred);
    metrics::PrfScores fuzzy = metrics::fuzzy_prf(m);
    std::optional<metrics::PrfScores> lm;
    if (!judge_profile.empty()) {
        auto templates = templates_of(cfg);
        auto judge_llm = handle_of(cfg, judge_profile);
        metrics::JudgeHandle judge = [&](const Triple& g, const Triple& p) {
            std::string resp = judge_llm(templates.render(
                "judge", {{"tx", joined(g)}, {"ty", joined(p)}}));
            metrics::JudgeVerdict v;
            v.raw_response = resp;
            v.match = gateway::parse_binary(resp, "yes", "no");
            return v;
        };
        lm = metrics::lm_prf(m, gold, pred, judge, cfg.limits.workers > 0 ? cfg.limits.workers : 8);
    }
    emit_json(out, io::score_report_json(m, fuzzy, lm));
    return 0;
}

int cmd_reward(const std::string& scores_path, const std::string& formula, const std::string& out) {
    std::vector<json> rows_out;
    for (const auto& row : util::read_jsonl(scores_path)) {
        reward::GroupScores gs;
        gs.anchor_page = row.value("anchor", "");
        for (auto it = row["scores"].begin(); it != row["scores"].end(); ++it)
            gs.scores[it.key()] = it.value().get<double>();
        reward::RewardBreakdown b = formula == "self-only" ? reward::self_only_reward(gs)
                                                           : reward::scribes_reward(gs);
        rows_out.push_back(io::reward_row_json(gs, b));
    }
    std::string text;
    for (const auto& r : rows_out) text += r.dump() + "\n";
    emit(out, text);
    return 0;
}

// runs.jsonl rows: {"anchor", "url", "gold": [[s,p,o]..], "pred": [[s,p,o]..]}
// Pages whose run failed ship an empty pred and score 0.
int cmd_eval(const std::string& runs_path, const std::string& split, const std::string& out) {
    struct PageRun { std::string url; TripleList gold, pred; };
    std::map<std::string, std::vector<PageRun>> by_anchor;
    for (const auto& row : util::read_jsonl(runs_path)) {
        PageRun pr;
        pr.url = row.value("url", "");
        pr.gold = io::triples_from_json(row.value("gold", json::array()));
        pr.pred = io::triples_from_json(row.value("pred", json::array()));
        by_anchor[row.value("anchor", "")].push_back(std::move(pr));
    }
    std::vector<reward::SplitPrf> splits;
    for (const auto& [anchor, runs] : by_anchor) {
        double sum_p = 0, sum_r = 0, hold_p = 0, hold_r = 0;
        std::size_t holdout_n = 0;
        metrics::PrfScores anchor_prf;
        for (const auto& run : runs) {
            metrics::PrfScores s = metrics::fuzzy_prf(metrics::match_exact(run.gold, run.pred));
            sum_p += s.precision;
            sum_r += s.recall;
            if (run.url == anchor) {
                anchor_prf = s;
            } else {
                hold_p += s.precision;
                hold_r += s.recall;
                ++holdout_n;
            }
        }
        reward::SplitPrf sp;
        sp.all.precision = sum_p / runs.size();
        sp.all.recall = sum_r / runs.size();
        sp.all.f1 = metrics::f1_of(sp.all.precision, sp.all.recall);
        sp.example = anchor_prf;
        if (holdout_n) {
            metrics::PrfScores h;
            h.precision = hold_p / holdout_n;
            h.recall = hold_r / holdout_n;
            h.f1 = metrics::f1_of(h.precision, h.recall);
            sp.holdout = h;
        }
        splits.push_back(sp);
    }
    reward::EvalReport report = reward::benchmark_report(splits);
    json j = io::eval_report_json(report);
    if (split != "all-splits") {
        // Narrow the report to one split when asked.
        json narrowed = {{"examples", j["examples"]}, {"holdout_examples", j["holdout_examples"]}};
        narrowed[split] = j.contains(split) ? j[split] : json(nullptr);
        j = narrowed;
    }
    emit_json(out, j);
    return 0;
}

runtime::ExtractionScript script_of(const RunConfig& cfg, const std::string& id,
                                    const std::string& source) {
    if (cfg.interpreter_command.empty())
        throw InterpreterNotConfigured("limits.interpreter_command is not set");
    runtime::ExtractionScript s;
    s.id = id;
    s.source = source;
    s.interpreter = cfg.interpreter_command;
    return s;
}

int cmd_run_script(const RunConfig& cfg, const std::string& script_path,
                   const std::string& pages_path, const std::string& scripts_path,
                   const std::string& examples_path, const std::string& out) {
    std::vector<json> rows_out;
    if (!scripts_path.empty()) {
        // Batch mode: one script per training example, run over its reward pages.
        std::map<std::string, std::string> scripts;
        for (const auto& row : util::read_jsonl(scripts_path))
            scripts[row.value("anchor_url", "")] = row.value("script", "");
        for (const auto& row : util::read_jsonl(examples_path)) {
            pipeline::TrainingExample ex = example_from_json(row);
            auto sit = scripts.find(ex.anchor.url);
            if (sit == scripts.end()) throw MissingRun("no script for anchor " + ex.anchor.url);
            auto script = script_of(cfg, ex.anchor.url, sit->second);
            std::vector<html::RawHtmlDocument> group;
            for (const auto& p : ex.reward_pages) group.push_back({p.url, p.html, p.title});
            auto results = runtime::apply_to_group(script, group, cfg.limits);
            for (const auto& p : ex.reward_pages) {
                const auto& res = results.at(p.url);
                json gold = json::array();
                if (auto git = ex.synthetic_gold.find(p.url); git != ex.synthetic_gold.end())
                    gold = io::triples_to_json(git->second);
                rows_out.push_back({{"anchor", ex.anchor.url},
                                    {"url", p.url},
                                    {"status", runtime::to_string(res.status)},
                                    {"pred", io::triples_to_json(res.triples)},
                                    {"gold", gold}});
            }
        }
    } else {
        auto script = script_of(cfg, script_path, util::read_file(script_path));
        auto group = read_pages(pages_path);
        auto results = runtime::apply_to_group(script, group, cfg.limits);
        for (const auto& page : group) {
            const auto& res = results.at(page.url);
            rows_out.push_back({{"url", page.url},
                                {"status", runtime::to_string(res.status)},
                                {"pred", io::triples_to_json(res.triples)},
                                {"exit_code", res.exit_code ? json(*res.exit_code) : json(nullptr)},
                                {"stderr_tail", res.stderr_tail}});
        }
    }
    std::string text;
    for (const auto& r : rows_out) text += r.dump() + "\n";
    emit(out, text);
    return 0;
}

std::string shots_text(const TripleList& triples) {
    std::string s = "[";
    for (std::size_t i = 0; i < triples.size(); ++i) {
        if (i) s += ", ";
        s += json::array({triples[i].subject, triples[i].predicate, triples[i].object}).dump();
    }
    return s + "]";
}

int cmd_generate(const RunConfig& cfg, const std::string& page_path,
                 const std::string& examples_path, int iters, const std::string& shots_path,
                 const std::string& generator_profile, const std::string& out) {
    auto templates = templates_of(cfg);
    auto generator = handle_of(cfg, generator_profile);
    if (cfg.interpreter_command.empty())
        throw InterpreterNotConfigured("limits.interpreter_command is not set");

    std::vector<runtime::ShotExample> shots;
    if (!shots_path.empty()) {
        for (const auto& row : util::read_jsonl(shots_path))
            shots.push_back({row.value("html", ""),
                             shots_text(io::triples_from_json(row.value("triples", json::array())))});
    }

    if (!examples_path.empty()) {
        // Batch mode: one script per training example anchor; the model sees
        // the deduped anchor HTML, execution runs on the raw page.
        std::vector<json> rows_out;
        for (const auto& row : util::read_jsonl(examples_path)) {
            pipeline::TrainingExample ex = example_from_json(row);
            html::RawHtmlDocument page{ex.anchor.url, ex.anchor.html, ex.anchor.title};
            std::string deduped = html::dedup_html(page, cfg.dedup);
            auto transcript = runtime::agentic_generate(generator, page, iters, shots,
                                                        cfg.interpreter_command, cfg.limits,
                                                        templates, deduped);
            rows_out.push_back({{"anchor_url", ex.anchor.url},
                                {"script", transcript.final.source},
                                {"iterations_used", transcript.iterations_used},
                                {"final_status",
                                 runtime::to_string(transcript.attempts.back().result.status)}});
        }
        std::string text;
        for (const auto& r : rows_out) text += r.dump() + "\n";
        emit(out, text);
        return 0;
    }

    html::RawHtmlDocument page = read_pages(page_path).front();
    std::string deduped = html::dedup_html(page, cfg.dedup);
    auto transcript = runtime::agentic_generate(generator, page, iters, shots,
                                                cfg.interpreter_command, cfg.limits, templates,
                                                deduped);
    json attempts = json::array();
    for (const auto& a : transcript.attempts)
        attempts.push_back({{"status", runtime::to_string(a.result.status)},
                            {"feedback", a.feedback}});
    emit_json(out, {{"script", transcript.final.source},
                    {"iterations_used", transcript.iterations_used},
                    {"final_status",
                     runtime::to_string(transcript.attempts.back().result.status)},
                    {"attempts", attempts}});
    return 0;
}

int cmd_pipeline(const RunConfig& cfg, const std::string& in, const std::string& stage,
                 const std::string& classifier_profile, const std::string& extractor_profile,
                 const std::string& runs_path, const std::string& out_dir_flag) {
    auto templates = templates_of(cfg);
    fs::path out_dir = out_dir_flag.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir_flag);
    fs::create_directories(out_dir);
    auto groups_path = (out_dir / "groups.jsonl").string();
    auto examples_path = (out_dir / "examples.jsonl").string();
    auto gold_path = (out_dir / "synthetic_gold.jsonl").string();
    auto failures_path = (out_dir / "failures.jsonl").string();

    auto write_groups = [&](const std::vector<pipeline::PageGroup>& groups) {
        std::vector<json> rows;
        for (const auto& g : groups) rows.push_back(group_to_json(g));
        util::write_jsonl(groups_path, rows);
    };
    auto read_groups = [&]() {
        std::vector<pipeline::PageGroup> groups;
        for (const auto& row : util::read_jsonl(groups_path)) groups.push_back(group_from_json(row));
        return groups;
    };
    auto write_examples = [&](const std::vector<pipeline::TrainingExample>& examples,
                              const std::string& path) {
        std::vector<json> rows;
        for (const auto& ex : examples) rows.push_back(example_to_json(ex));
        util::write_jsonl(path, rows);
    };
    auto read_examples = [&](const std::string& path) {
        std::vector<pipeline::TrainingExample> examples;
        for (const auto& row : util::read_jsonl(path)) examples.push_back(example_from_json(row));
        return examples;
    };

    const bool all = stage == "all";
    std::vector<pipeline::PageGroup> groups;
    std::vector<pipeline::TrainingExample> examples;

    if (all || stage == "group") {
        std::vector<pipeline::PageRecord> records;
        for (const auto& row : util::read_jsonl(in)) records.push_back(record_from_json(row));
        groups = pipeline::filter_and_group(records, cfg.thresholds);
        write_groups(groups);
        std::cerr << "group: " << groups.size() << " groups\n";
    }
    if (all || stage == "classify") {
        if (!all) groups = read_groups();
        groups = pipeline::classify_groups(groups, handle_of(cfg, classifier_profile),
                                           cfg.thresholds, templates, cfg.dedup);
        write_groups(groups);
        std::cerr << "classify: " << groups.size() << " groups kept\n";
    }
    if (all || stage == "sample") {
        if (!all) groups = read_groups();
        examples = pipeline::sample_examples(groups, cfg.thresholds, cfg.seed);
        write_examples(examples, examples_path);
        std::cerr << "sample: " << examples.size() << " examples\n";
    }
    if (all || stage == "synthesize") {
        if (!all) examples = read_examples(examples_path);
        examples = pipeline::synthesize_gold(examples, handle_of(cfg, extractor_profile), templates);
        write_examples(examples, examples_path);
        // Flat per-page gold dump alongside the examples.
        std::vector<json> rows;
        for (const auto& ex : examples)
            for (const auto& [url, triples] : ex.synthetic_gold)
                rows.push_back({{"anchor_url", ex.anchor.url}, {"url", url},
                                {"triples", io::triples_to_json(triples)}});
        util::write_jsonl(gold_path, rows);
        std::cerr << "synthesize: " << examples.size() << " examples kept\n";
    }
    if (stage == "failures") {
        examples = read_examples(examples_path);
        std::map<std::string, runtime::ExecutionResult> runs;
        for (const auto& row : util::read_jsonl(runs_path)) {
            if (row.value("anchor", "") != row.value("url", "")) continue;
            runtime::ExecutionResult res;
            const std::string st = row.value("status", "error");
            res.status = st == "ok" ? runtime::ExecStatus::Ok
                       : st == "empty" ? runtime::ExecStatus::Empty
                       : st == "timeout" ? runtime::ExecStatus::Timeout
                       : st == "malformed_output" ? runtime::ExecStatus::MalformedOutput
                                                  : runtime::ExecStatus::Error;
            runs[row.value("url", "")] = std::move(res);
        }
        auto failures = pipeline::failure_case_subset(examples, runs);
        write_examples(failures, failures_path);
        std::cerr << "failures: " << failures.size() << " examples\n";
    }
    return 0;
}

int cmd_qa(const RunConfig& cfg, const std::string& items_path, const std::string& pages_path,
           const std::string& mode, const std::string& triples_path,
           const std::string& backbone_profile, const std::string& judge_profile,
           const std::string& out) {
    auto templates = templates_of(cfg);
    std::map<std::string, html::RawHtmlDocument> pages;
    for (const auto& p : read_pages(pages_path)) pages[p.url] = p;
    std::map<std::string, TripleList> triples_by_url;
    if (!triples_path.empty()) {
        for (const auto& row : util::read_jsonl(triples_path))
            triples_by_url[row.value("url", "")] =
                io::triples_from_json(row.value("triples", json::array()));
    }
    qa::ReferenceMode ref_mode = mode == "predicted" ? qa::ReferenceMode::FlattenPlusPredicted
                               : mode == "gold" ? qa::ReferenceMode::FlattenPlusGold
                                                : qa::ReferenceMode::FlattenOnly;
    std::vector<qa::QaItem> items;
    std::vector<std::string> references;
    for (const auto& row : util::read_jsonl(items_path)) {
        qa::QaItem item;
        item.question = row.value("question", "");
        item.gold_answer = row.value("gold_answer", "");
        item.page_url = row.value("page_url", "");
        item.reference_mode = ref_mode;
        auto pit = pages.find(item.page_url);
        if (pit == pages.end()) throw EmptyInput("no page record for " + item.page_url);
        std::optional<TripleList> triples;
        if (auto tit = triples_by_url.find(item.page_url); tit != triples_by_url.end())
            triples = tit->second;
        references.push_back(qa::build_reference(item, pit->second, triples));
        items.push_back(std::move(item));
    }
    qa::QaRun run = qa::run_qa(items, references, handle_of(cfg, backbone_profile),
                               handle_of(cfg, judge_profile), templates, judge_profile);
    json results = json::array();
    for (std::size_t i = 0; i < run.results.size(); ++i) {
        const auto& r = run.results[i];
        results.push_back({{"question", items[i].question},
                           {"answer", r.answer},
                           {"verdict", r.verdict == qa::Verdict::Correct ? "correct"
                                     : r.verdict == qa::Verdict::Incorrect ? "incorrect"
                                                                           : "unjudged"}});
    }
    emit_json(out, {{"mode", mode},
                    {"accuracy", io::round_metric(run.accuracy)},
                    {"judged", run.judged},
                    {"unjudged", run.unjudged},
                    {"results", results}});
    return 0;
}

int cmd_speedup(int k, double dedup_tokens, double flat_tokens, const std::string& out) {
    auto est = reward::estimate_speedup(k, dedup_tokens, flat_tokens);
    emit_json(out, {{"k", k},
                    {"rho", io::round_metric(est.rho)},
                    {"speedup", io::round_metric(est.speedup)}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scribe-forge: HTML dedup, script execution, and triple-extraction scoring"};
    app.require_subcommand(1);

    std::string config_path, out, in;
    app.add_option("--config", config_path, "Run config JSON file")->envname("SCRIBE_CONFIG");

    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out, "Output path (default stdout)"); };

    auto* dedup = app.add_subcommand("dedup", "Structure-preserving HTML deduplication");
    int z_flag = -1;
    bool no_norm = false;
    std::string counter;
    dedup->add_option("--in", in, "HTML file or pages JSONL")->required();
    dedup->add_option("--z", z_flag, "Siblings kept per signature group");
    dedup->add_flag("--no-normalize-whitespace", no_norm, "Keep original whitespace");
    dedup->add_option("--counter", counter, "Report token count with this counter id");
    add_out(dedup);

    auto* flatten = app.add_subcommand("flatten", "Markup-free page text");
    flatten->add_option("--in", in, "HTML file or pages JSONL")->required();
    flatten->add_option("--counter", counter, "Report token count with this counter id");
    add_out(flatten);

    auto* score = app.add_subcommand("score", "Score predicted triples against gold");
    std::string gold_path, pred_path, judge_profile;
    int deadline_secs = 60;
    bool greedy = false;
    score->add_option("--gold", gold_path, "Gold triples JSONL")->required();
    score->add_option("--pred", pred_path, "Predicted triples JSONL")->required();
    score->add_option("--judge", judge_profile, "Endpoint profile for LM judging");
    score->add_option("--deadline-secs", deadline_secs, "Greedy matching deadline");
    score->add_flag("--greedy", greedy, "Use deadline-bounded greedy matching");
    add_out(score);

    auto* reward_cmd = app.add_subcommand("reward", "Group reward breakdowns");
    std::string scores_path, formula = "scribes";
    reward_cmd->add_option("--scores", scores_path, "Group scores JSONL")->required();
    reward_cmd->add_option("--formula", formula, "scribes | self-only")
        ->check(CLI::IsMember({"scribes", "self-only"}));
    add_out(reward_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "Benchmark report over run records");
    std::string runs_path, split = "all-splits";
    eval_cmd->add_option("--runs", runs_path, "Run records JSONL")->required();
    eval_cmd->add_option("--split", split, "all | example | holdout (default: every split)")
        ->check(CLI::IsMember({"all", "example", "holdout", "all-splits"}));
    add_out(eval_cmd);

    auto* run_script = app.add_subcommand("run-script", "Execute an extraction script over pages");
    std::string script_path, pages_path, scripts_path, examples_path;
    run_script->add_option("--script", script_path, "Script source file");
    run_script->add_option("--pages", pages_path, "Pages JSONL or HTML file");
    run_script->add_option("--scripts", scripts_path, "Generated scripts JSONL (batch mode)");
    run_script->add_option("--examples", examples_path, "Training examples JSONL (batch mode)");
    add_out(run_script);

    auto* generate = app.add_subcommand("generate", "Agentic script generation");
    std::string page_path, shots_path, generator_profile;
    int iters = 3;
    generate->add_option("--page", page_path, "Anchor page HTML file or JSONL");
    generate->add_option("--examples", examples_path, "Training examples JSONL (batch mode)");
    generate->add_option("--iters", iters, "Max generation attempts");
    generate->add_option("--shots", shots_path, "Few-shot examples JSONL {html, triples}");
    generate->add_option("--generator", generator_profile, "Endpoint profile")->required();
    add_out(generate);

    auto* pipe = app.add_subcommand("pipeline", "Corpus group construction");
    std::string stage = "all", classifier_profile, extractor_profile, pipe_runs, out_dir_flag;
    int n_flag = -1, m_flag = -1, k_flag = -1;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;
    pipe->add_option("--in", in, "Page records JSONL");
    pipe->add_option("--n", n_flag, "Min group size");
    pipe->add_option("--m", m_flag, "Min semi-structured share, percent");
    pipe->add_option("--k", k_flag, "Max reward pages per example");
    pipe->add_option("--seed", seed_flag, "Sampling seed")->each([&](const std::string&) { seed_set = true; });
    pipe->add_option("--classifier", classifier_profile, "Endpoint profile for classification");
    pipe->add_option("--extractor", extractor_profile, "Endpoint profile for synthetic gold");
    pipe->add_option("--stage", stage, "all | group | classify | sample | synthesize | failures")
        ->check(CLI::IsMember({"all", "group", "classify", "sample", "synthesize", "failures"}));
    pipe->add_option("--runs", pipe_runs, "Run records JSONL (failures stage)");
    pipe->add_option("--out-dir", out_dir_flag, "Output directory (default: config output_dir)");

    auto* qa_cmd = app.add_subcommand("qa", "QA benchmark over flattened/augmented references");
    std::string items_path, qa_pages, qa_mode = "flatten", triples_path, backbone_profile;
    qa_cmd->add_option("--items", items_path, "QA items JSONL")->required();
    qa_cmd->add_option("--pages", qa_pages, "Pages JSONL")->required();
    qa_cmd->add_option("--mode", qa_mode, "flatten | predicted | gold")
        ->check(CLI::IsMember({"flatten", "predicted", "gold"}));
    qa_cmd->add_option("--triples", triples_path, "Per-page triples JSONL for augmented modes");
    qa_cmd->add_option("--backbone", backbone_profile, "Endpoint profile")->required();
    qa_cmd->add_option("--judge", judge_profile, "Endpoint profile")->required();
    add_out(qa_cmd);

    auto* speedup = app.add_subcommand("speedup", "Script-reuse efficiency estimate");
    int k_pages = 0;
    double dedup_tokens = 0, flat_tokens = 0;
    speedup->add_option("--k", k_pages, "Structurally similar pages per script")->required();
    speedup->add_option("--dedup-tokens", dedup_tokens, "Tokens per deduped page")->required();
    speedup->add_option("--flat-tokens", flat_tokens, "Tokens per flattened page")->required();
    add_out(speedup);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (z_flag >= 0) cfg.dedup.z = z_flag;
        if (no_norm) cfg.dedup.normalize_whitespace = false;
        if (n_flag >= 0) cfg.thresholds.n = n_flag;
        if (m_flag >= 0) cfg.thresholds.m = m_flag;
        if (k_flag >= 0) cfg.thresholds.k = k_flag;
        if (seed_set) cfg.seed = seed_flag;

        if (*dedup) return cmd_dedup(cfg, in, out, counter, false);
        if (*flatten) return cmd_dedup(cfg, in, out, counter, true);
        if (*score) return cmd_score(cfg, gold_path, pred_path, judge_profile, deadline_secs, greedy, out);
        if (*reward_cmd) return cmd_reward(scores_path, formula, out);
        if (*eval_cmd) return cmd_eval(runs_path, split, out);
        if (*run_script) return cmd_run_script(cfg, script_path, pages_path, scripts_path, examples_path, out);
        if (*generate) return cmd_generate(cfg, page_path, examples_path, iters, shots_path, generator_profile, out);
        if (*pipe) return cmd_pipeline(cfg, in, stage, classifier_profile, extractor_profile, pipe_runs, out_dir_flag);
        if (*qa_cmd) return cmd_qa(cfg, items_path, qa_pages, qa_mode, triples_path, backbone_profile, judge_profile, out);
        if (*speedup) return cmd_speedup(k_pages, dedup_tokens, flat_tokens, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
