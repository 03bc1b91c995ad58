#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "llmbda/harness.hpp"

using namespace llmbda;
using namespace llmbda::test;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) : path(std::string("/tmp/llmbda_test_") + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("constant and echo backends") {
    auto constant = make_constant_backend("42");
    CHECK(constant->complete("", "anything") == "42");
    CHECK(constant->complete("history", "other") == "42");
    CHECK(constant->is_formal());

    auto echo = make_echo_backend();
    CHECK(echo->complete("", "\"hi\"") == "\"hi\"");
}

TEST_CASE("transcript matching is ordered, first hit wins") {
    Transcript t;
    t.rules.push_back({TranscriptRule::Matcher::Substring, "Extract:", 0, "\"SW1A 2AA\"", false});
    t.rules.push_back({TranscriptRule::Matcher::Substring, "Extract", 0, "\"shadowed\"", false});
    t.rules.push_back({TranscriptRule::Matcher::Index, "", 3, "\"third\"", false});
    t.rules.push_back({TranscriptRule::Matcher::Always, "", 0, "()", false});

    auto backend = make_transcript_backend(t, true);
    CHECK(backend->complete("", "Extract: 10 Downing Street SW1A2AA") == "\"SW1A 2AA\"");
    CHECK(backend->complete("", "nothing matches") == "()");
    CHECK(backend->complete("", "Extract without colon") == "\"shadowed\"");
    CHECK(backend->complete("", "whatever") == "\"third\"");  // call ordinal 3
}

TEST_CASE("strict transcripts reject unmatched prompts; lax ones return prose") {
    Transcript t;
    t.rules.push_back({TranscriptRule::Matcher::Exact, "only", 0, "1", false});
    auto strict = make_transcript_backend(t, true);
    CHECK_THROWS_AS(strict->complete("", "something else"), ModelError);
    auto lax = make_transcript_backend(t, false);
    std::string fallback = lax->complete("", "something else");
    PreludeDefs empty;
    ExprPtr parsed = parse_response(fallback, us(), empty);
    CHECK(equal(nodep<ArrayNode>(parsed)->elements[0], bool_lit(false)));
}

TEST_CASE("once-rules fire a single time until reset") {
    Transcript t;
    t.rules.push_back({TranscriptRule::Matcher::Exact, "q", 0, "1", true});
    t.rules.push_back({TranscriptRule::Matcher::Exact, "q", 0, "2", true});
    t.rules.push_back({TranscriptRule::Matcher::Always, "", 0, "3", false});
    auto backend = make_transcript_backend(t, true);
    CHECK(backend->complete("", "q") == "1");
    CHECK(backend->complete("", "q") == "2");
    CHECK(backend->complete("", "q") == "3");
    backend->reset();
    CHECK(backend->complete("", "q") == "1");
}

TEST_CASE("non-live backends are referentially transparent") {
    Transcript t;
    t.rules.push_back({TranscriptRule::Matcher::Substring, "a", 0, "1", false});
    t.rules.push_back({TranscriptRule::Matcher::Always, "", 0, "0", false});
    auto backend = make_transcript_backend(t, false);
    for (int i = 0; i < 5; ++i) {
        CHECK(backend->complete("h", "a") == "1");
        CHECK(backend->complete("h", "b") == "0");
    }
}

TEST_CASE("transcript files round-trip byte-for-byte") {
    const char* text =
        "# llmbda transcript\n"
        "rule substring \"Extract:\" => \"\\\"SW1A 2AA\\\"\"\n"
        "rule exact \"()\" once => \"[true, 1]\"\n"
        "rule index 3 => \"line\\nbreak\"\n"
        "rule always => \"0\"\n";
    Transcript t = Transcript::parse(text, "<test>");
    REQUIRE(t.rules.size() == 4);
    CHECK(t.rules[0].matcher == TranscriptRule::Matcher::Substring);
    CHECK(t.rules[1].consume_once);
    CHECK(t.rules[2].response == "line\nbreak");
    CHECK(t.save() == text);
    CHECK(Transcript::parse(t.save(), "<again>").save() == t.save());

    CHECK_THROWS_AS(Transcript::parse("rule bogus \"x\" => \"y\"\n", "<t>"), ModelError);
    CHECK_THROWS_AS(Transcript::parse("rule exact \"x\" \"y\"\n", "<t>"), ModelError);
    CHECK_THROWS_AS(Transcript::parse("rule exact \"x\" => \"y\" junk\n", "<t>"), ModelError);
}

TEST_CASE("recording wraps a backend and the capture replays the session") {
    TempFile capture("record.transcript");
    {
        auto inner = make_constant_backend("\"fixed\"");
        auto recorder = make_recording_backend(inner, capture.path);
        CHECK(recorder->complete("", "\"one\"") == "\"fixed\"");
        CHECK(recorder->complete("\"one\"\"fixed\"", "\"two\"") == "\"fixed\"");
    }
    Transcript captured = Transcript::load(capture.path);
    REQUIRE(captured.rules.size() == 2);
    CHECK(captured.rules[0].matcher == TranscriptRule::Matcher::Exact);
    CHECK(captured.rules[0].pattern == "\"one\"");
    CHECK(captured.rules[0].consume_once);

    auto cfg_live = config(us(), make_constant_backend("\"fixed\""));
    auto cfg_replay = config(us(), make_transcript_backend(captured, true));
    EvalSuccess a = ok(run("[@'one', @'two']", cfg_live));
    EvalSuccess b = ok(run("[@'one', @'two']", cfg_replay));
    CHECK(a.conv == b.conv);
    CHECK(pretty(a.value, us()) == pretty(b.value, us()));

    auto cfg_mut = config(us(), make_transcript_backend(captured, true));
    EvalFailure f = fail_of(run("@'mutated'", cfg_mut));
    CHECK(f.kind == ErrorKind::ModelError);
}

TEST_CASE("the harness refuses non-formal backends") {
    auto fine = make_echo_backend();
    CHECK_NOTHROW(require_formal_backend(*fine));
    LiveConfig cfg;
    cfg.endpoint = "https://example.invalid";
    cfg.model_name = "m";
    cfg.credential_env = "LLMBDA_TEST_NO_SUCH_ENV_VAR";
    CHECK_THROWS_AS(make_live_backend(cfg), ModelError);
}

TEST_CASE("backend flags parse") {
    CHECK(make_backend_from_flag("echo", std::nullopt, false)->describe() == "echo");
    CHECK(make_backend_from_flag("constant:7", std::nullopt, false)->complete("", "") == "7");
    CHECK_THROWS_AS(make_backend_from_flag("scripted", std::nullopt, false), ModelError);
    CHECK_THROWS_AS(make_backend_from_flag("mystery", std::nullopt, false), ModelError);
    CHECK_THROWS_AS(make_backend_from_flag("live:no-slash", std::nullopt, false), ModelError);
}
