#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "scribe/errors.hpp"
#include "scribe/gateway/gateway.hpp"
#include "scribe/gateway/literal.hpp"
#include "scribe/gateway/templates.hpp"
#include "scribe/util.hpp"

using namespace scribe;
using namespace scribe::gateway;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string temp_jsonl(const std::string& name, const std::vector<json>& rows) {
    fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    for (const auto& r : rows) out << r.dump() << "\n";
    return path.string();
}

} // namespace

TEST_CASE("template engine: variables, filters, conditionals, loops") {
    CHECK(render_template("hello {{ name }}", {{"name", "world"}}) == "hello world");
    CHECK(render_template("{{ items|length }}", {{"items", json::array({1, 2, 3})}}) == "3");
    CHECK(render_template("{% if flag %}yes{% endif %}", {{"flag", true}}) == "yes");
    CHECK(render_template("{% if flag %}yes{% endif %}", {{"flag", false}}) == "");
    CHECK(render_template("{% if missing %}yes{% endif %}", json::object()) == "");
    CHECK(render_template("{% for x in xs %}{{ loop.index0 }}:{{ x }};{% endfor %}",
                          {{"xs", json::array({"a", "b"})}}) == "0:a;1:b;");
    CHECK_THROWS_AS(render_template("{{ nope }}", json::object()), MissingVariable);
}

TEST_CASE("template engine: loop variables shadow outer scope") {
    json vars = {{"x", "outer"}, {"xs", json::array({"inner"})}};
    CHECK(render_template("{% for x in xs %}{{ x }}{% endfor %}{{ x }}", vars) == "innerouter");
}

TEST_CASE("builtin template store carries all six prompts") {
    TemplateStore store = TemplateStore::builtin();
    for (const char* name : {"classifier", "direct_extract", "judge", "qa", "script_gen", "qa_eval"}) {
        CAPTURE(name);
        CHECK_FALSE(store.get(name).body.empty());
    }
    CHECK_THROWS(store.get("nonexistent"));
    CHECK_THROWS_AS(store.render("judge", {{"tx", "only one side"}}), MissingVariable);
    std::string judged = store.render("judge", {{"tx", "a | b | c"}, {"ty", "d | e | f"}});
    CHECK(judged.find("a | b | c") != std::string::npos);
    CHECK(judged.find("d | e | f") != std::string::npos);
}

TEST_CASE("on-disk templates override the builtins") {
    fs::path dir = fs::temp_directory_path() / "scribe-tmpl-test";
    fs::create_directories(dir);
    util::write_file((dir / "judge.tmpl").string(), "custom {{ tx }} vs {{ ty }}");
    TemplateStore store = TemplateStore::from_dir(dir.string());
    CHECK(store.render("judge", {{"tx", "A"}, {"ty", "B"}}) == "custom A vs B");
    CHECK_FALSE(store.get("classifier").body.empty()); // builtin still there
    fs::remove_all(dir);
}

TEST_CASE("mock transport replays rules first-match with once consumption") {
    std::string rules = temp_jsonl("scribe-mock-rules.jsonl",
                                   {{{"match", "alpha"}, {"response", "first"}, {"once", true}},
                                    {{"match", "alpha"}, {"response", "second"}},
                                    {{"match", ""}, {"response", "fallback"}}});
    EndpointProfile profile;
    profile.name = "m";
    profile.transport = Transport::Mock;
    profile.mock_script = rules;
    Gateway gw(profile);
    CHECK(gw.complete("ask about alpha").response_text == "first");
    CHECK(gw.complete("ask about alpha").response_text == "second");
    CHECK(gw.complete("something else").response_text == "fallback");
}

TEST_CASE("mock transport with no matching rule fails loudly") {
    std::string rules = temp_jsonl("scribe-mock-none.jsonl", {{{"match", "zzz"}, {"response", "x"}}});
    EndpointProfile profile;
    profile.name = "m";
    profile.transport = Transport::Mock;
    profile.mock_script = rules;
    Gateway gw(profile);
    CHECK_THROWS_AS(gw.complete("no match here"), EndpointUnavailable);
}

TEST_CASE("profile parsing rejects unknown keys and incomplete mocks") {
    CHECK_THROWS_AS(EndpointProfile::from_json("p", {{"mystery_key", 1}}), ConfigError);
    CHECK_THROWS_AS(EndpointProfile::from_json("p", {{"transport", "mock"}}), ConfigError);
    CHECK_THROWS_AS(EndpointProfile::from_json("p", {{"transport", "carrier-pigeon"}}), ConfigError);
    EndpointProfile p = EndpointProfile::from_json(
        "p", {{"transport", "http"}, {"base_url", "http://x"}, {"model_name", "m"},
              {"max_tokens", 64}, {"temperature", 0.5}, {"timeout_secs", 2}, {"max_attempts", 2}});
    CHECK(p.base_url == "http://x");
    CHECK(p.max_tokens == 64);
}

TEST_CASE("http transport round trip with retry and usage capture") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (hits.fetch_add(1) == 0) {
            res.status = 500; // first attempt fails, client must retry
            return;
        }
        json body = json::parse(req.body);
        json reply = {
            {"choices", json::array({{{"message", {{"content", std::string("echo: ") +
                                                     body["messages"][0]["content"].get<std::string>()}}}}})},
            {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 5}}},
        };
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    EndpointProfile profile;
    profile.name = "live";
    profile.transport = Transport::Http;
    profile.base_url = "http://127.0.0.1:" + std::to_string(port);
    profile.model_name = "test-model";
    profile.max_attempts = 3;
    Gateway gw(profile);
    ChatExchange ex = gw.complete("ping");
    CHECK(ex.response_text == "echo: ping");
    REQUIRE(ex.token_usage.has_value());
    CHECK(ex.token_usage->first == 12);
    CHECK(ex.token_usage->second == 5);
    CHECK(hits.load() == 2);

    server.stop();
    th.join();
}

TEST_CASE("auth failures are fail-fast") {
    unsetenv("SCRIBE_TEST_MISSING_KEY");
    EndpointProfile profile;
    profile.name = "live";
    profile.transport = Transport::Http;
    profile.base_url = "http://127.0.0.1:1"; // never reached
    profile.auth_env = "SCRIBE_TEST_MISSING_KEY";
    Gateway gw(profile);
    CHECK_THROWS_AS(gw.complete("x"), AuthFailure);
}

TEST_CASE("classifier verdicts parse from prose-wrapped JSON") {
    ClassifierVerdict v = parse_classifier(
        "Sure, here is my verdict:\n{\"reason\": \"tabular layout\", \"decision\": \"Yes\"}\nThanks!");
    CHECK(v.decision == "Yes");
    CHECK(v.reason == "tabular layout");
    CHECK(parse_classifier("{\"decision\": \"exclude\"}").decision == "Exclude");
    CHECK(parse_classifier("{\"decision\": \" NO \"}").decision == "No");
    CHECK_THROWS_AS(parse_classifier("no json here"), UnparseableVerdict);
    CHECK_THROWS_AS(parse_classifier("{\"reason\": \"but no decision\"}"), UnparseableVerdict);
    CHECK_THROWS_AS(parse_classifier("{\"decision\": \"maybe\"}"), UnparseableVerdict);
}

TEST_CASE("binary verdicts handle prefix-overlapping vocabularies") {
    CHECK(parse_binary("Yes, equivalent.", "yes", "no"));
    CHECK_FALSE(parse_binary("No.", "yes", "no"));
    CHECK(parse_binary("  CORRECT  ", "correct", "incorrect"));
    CHECK_FALSE(parse_binary("incorrect, the answer differs", "correct", "incorrect"));
    CHECK_THROWS_AS(parse_binary("maybe", "yes", "no"), UnparseableVerdict);
}

TEST_CASE("literal parser extracts plain list-of-lists") {
    TripleList t = parse_triples_literal(
        "Here you go:\n[[\"Acme\", \"founded\", \"1990\"], [\"Acme\", \"hq\", \"Berlin\"]]");
    REQUIRE(t.size() == 2);
    CHECK(t[0] == Triple{"Acme", "founded", "1990"});
    CHECK(t[1].object == "Berlin");
}

TEST_CASE("literal parser tolerates trailing commas and drops bad rows") {
    std::vector<std::string> warnings;
    TripleList t = parse_triples_literal(
        "[['a', 'b', 'c',], ['too', 'short'], ['x', 'y', 'z', 'extra'], ['d', 'e', 'f']]",
        &warnings);
    REQUIRE(t.size() == 2);
    CHECK(t[0] == Triple{"a", "b", "c"});
    CHECK(t[1] == Triple{"d", "e", "f"});
    CHECK(warnings.size() == 2);
}

TEST_CASE("literal parser handles escapes and both quote styles") {
    TripleList t = parse_triples_literal(R"([["quote \" here", 'single', "mix'd"]])");
    REQUIRE(t.size() == 1);
    CHECK(t[0].subject == "quote \" here");
    CHECK(t[0].predicate == "single");
    CHECK(t[0].object == "mix'd");
}

TEST_CASE("literal parser never evaluates code-like responses") {
    const char* adversarial[] = {
        "__import__('os').system('true')",
        "[[open('/etc/passwd').read(), 'a', 'b']]",
        "[[exec('x=1'), 'a', 'b']]",
        "eval(\"[['a','b','c']]\")",
        "[['a'.upper(), 'b', 'c']]",
        "[[f\"{x}\", 'b', 'c']]",
        "[1, 2, 3]",
        "[[1, 2, 3]]",
        "no brackets at all",
    };
    for (const char* text : adversarial) {
        CAPTURE(text);
        try {
            TripleList t = parse_triples_literal(text);
            // Anything returned must be literal strings present in the input.
            for (const auto& triple : t) {
                CHECK(std::string(text).find(triple.subject) != std::string::npos);
            }
        } catch (const NoLiteralFound&) {
            // equally acceptable
        }
    }
    // A literal list later in an adversarial response is still found.
    TripleList t = parse_triples_literal("ignore os.system('x'); [['s', 'p', 'o']]");
    REQUIRE(t.size() == 1);
    CHECK(t[0] == Triple{"s", "p", "o"});
}
