#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "llmbda/progen.hpp"
#include "llmbda/util.hpp"

using namespace llmbda;
using namespace llmbda::test;

TEST_CASE("programs parse into let bindings and bare expressions") {
    auto items = parse_program("let id = \\x.x", us());
    REQUIRE(items.size() == 1);
    CHECK(items[0].let_name == "id");
    CHECK(as<LambdaNode>(items[0].expr) != nullptr);

    items = parse_program("@'hi'", us());
    REQUIRE(items.size() == 1);
    CHECK_FALSE(items[0].let_name.has_value());
    const auto* prompt = as<PromptNode>(items[0].expr);
    REQUIRE(prompt != nullptr);
    const auto* lit = as<LitNode>(prompt->arg);
    REQUIRE(lit != nullptr);
    CHECK(std::get<std::string>(lit->value) == "hi");

    items = parse_program("let r = fork @\"Extract: {addr}\" in r", us());
    REQUIRE(items.size() == 1);
    CHECK_FALSE(items[0].let_name.has_value());  // let-in is an expression
    const auto* let = as<LetNode>(items[0].expr);
    REQUIRE(let != nullptr);
    const auto* fork = as<ForkNode>(let->bound);
    REQUIRE(fork != nullptr);
    REQUIRE(as<PromptNode>(fork->body) != nullptr);
    CHECK(as<InterpNode>(as<PromptNode>(fork->body)->arg) != nullptr);
}

TEST_CASE("adjacent items are split by the offside rule") {
    auto items = parse_program("let y = f 42\n[ y, 1 ]\n", us());
    REQUIRE(items.size() == 2);
    CHECK(items[0].let_name == "y");
    CHECK(as<ArrayNode>(items[1].expr) != nullptr);

    // Indented continuation lines still belong to the item.
    items = parse_program("let s = agent\n  [1, 2]\n  'task'\nlet t = 1", us());
    REQUIRE(items.size() == 2);
    const auto* outer = as<AppNode>(items[0].expr);
    REQUIRE(outer != nullptr);
    CHECK(as<LitNode>(outer->arg) != nullptr);
}

TEST_CASE("operator precedence and label forms") {
    // label binds tighter than binary operators
    CHECK(equal(parse1("{U}:1 + 2"), parse1("({U}:1) + 2")));
    // test and label nest: {S}?{U}:42
    const auto* test = nodep<TestNode>(parse1("{S}?{U}:42"));
    REQUIRE(test != nullptr);
    CHECK(as<LabeledNode>(test->body) != nullptr);
    // arithmetic precedence
    CHECK(equal(parse1("1 + 2 * 3"), parse1("1 + (2 * 3)")));
    CHECK(equal(parse1("1 - 2 - 3"), parse1("(1 - 2) - 3")));
    CHECK(equal(parse1("a && b || c == d"), parse1("(a && b) || (c == d)")));
    // application binds tighter than operators, @ takes the smallest atom
    CHECK(equal(parse1("f x + 1"), parse1("(f x) + 1")));
    const auto* app_over_prompt = nodep<AppNode>(parse1("f (@p)"));
    REQUIRE(app_over_prompt != nullptr);
    // postfix chains
    CHECK(nodep<IndexNode>(parse1("r.[0]")) != nullptr);
    CHECK(nodep<FieldNode>(parse1("r.a.b")) != nullptr);
    const auto* upd = nodep<FieldUpdateNode>(parse1("s.queue := s.queue + [1]"));
    REQUIRE(upd != nullptr);
    CHECK(upd->name == "queue");
    CHECK(as<BinOpNode>(upd->value) != nullptr);
}

TEST_CASE("string forms: escapes, raw strings, interpolation") {
    const auto* s = nodep<LitNode>(parse1("\"a\\nb\\\"c\\\\d\\{e\""));
    REQUIRE(s != nullptr);
    CHECK(std::get<std::string>(s->value) == "a\nb\"c\\d{e");

    const auto* raw = nodep<LitNode>(parse1("'no {interp} \\n here'"));
    REQUIRE(raw != nullptr);
    CHECK(std::get<std::string>(raw->value) == "no {interp} \\n here");

    const auto* interp = nodep<InterpNode>(parse1("\"got {r0} & {r1} end\""));
    REQUIRE(interp != nullptr);
    REQUIRE(interp->parts.size() == 3);
    CHECK(interp->parts[0].text == "got ");
    CHECK(as<VarNode>(interp->parts[0].expr) != nullptr);
    CHECK(interp->parts[1].text == " & ");
    CHECK(interp->parts[2].text == " end");
    CHECK_FALSE(interp->parts[2].expr);

    CHECK_THROWS_AS(parse1("\"unterminated"), ParseError);
    CHECK_THROWS_AS(parse1("\"bad \\q escape\""), ParseError);
    CHECK_THROWS_AS(parse1("\"line\nbreak\""), ParseError);
}

TEST_CASE("parse errors carry positions and hints") {
    try {
        parse_program("let = 3", us());
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.loc.line == 1);
        CHECK(std::string(e.what()).find("expected a name") != std::string::npos);
    }
    try {
        parse_program("{x: 1", us());
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.at_eof);
    }
    CHECK_THROWS_AS(parse1("{}"), ParseError);          // bare empty braces
    CHECK_THROWS_AS(parse1("{a: 1, a: 2}"), ParseError);  // duplicate field
    CHECK_THROWS_AS(parse1("{Z}:1"), ParseError);         // unknown tag
}

TEST_CASE("substitute replaces free occurrences only") {
    ExprPtr one = int_lit(1);
    CHECK(equal(substitute(var("x"), "x", one), one));
    ExprPtr shadowed = parse1("\\x.x");
    CHECK(equal(substitute(shadowed, "x", one), shadowed));
    ExprPtr twice = parse1("x (\\y.x)");
    ExprPtr expect = parse1("2 (\\y.2)");
    CHECK(equal(substitute(twice, "x", int_lit(2)), expect));
    // let binds its body, not the bound expression
    ExprPtr let = parse1("let x = x in x");
    ExprPtr substituted = substitute(let, "x", one);
    const auto* sub = as<LetNode>(substituted);
    REQUIRE(sub != nullptr);
    CHECK(equal(sub->bound, one));
    CHECK(as<VarNode>(sub->body) != nullptr);
}

TEST_CASE("free variable sets") {
    CHECK(free_vars(parse1("\\x.x")).empty());
    CHECK(free_vars(parse1("f x")) == std::set<std::string>{"f", "x"});
    CHECK(free_vars(parse1("let x = y in x")) == std::set<std::string>{"y"});
    CHECK(free_vars(parse1("\"v={a}.\"")) == std::set<std::string>{"a"});
}

TEST_CASE("erasure follows the inductive definition") {
    Label u = lbl("{U}");
    // over-threshold labels become unit and drop the subtree
    CHECK(equal(erase(us(), u, parse1("{U,S}:42")), unit_lit()));
    // under-threshold labels are stripped
    CHECK(equal(erase(us(), u, parse1("{U}:42")), int_lit(42)));
    // tests erase to their subject
    CHECK(equal(erase(us(), lbl("{}"), parse1("{U}?true")), bool_lit(true)));
    // homomorphic elsewhere, including under binders
    CHECK(equal(erase(us(), u, parse1("\\x.{U,S}:x")), parse1("\\x.()")));
    CHECK(equal(erase(us(), u, parse1("[{U}:1, {S}:2]")), parse1("[1, ()]")));
}

TEST_CASE("erasure is idempotent on generated terms") {
    util::SplitMix64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        ExprPtr v = gen_labelled_value_expr(us(), rng.next());
        for (std::size_t k = 0; k < us().size(); ++k) {
            Label n = us().element(k);
            ExprPtr once = erase(us(), n, v);
            CHECK(equal(erase(us(), n, once), once));
        }
    }
}

TEST_CASE("serialization is canonical") {
    CHECK(serialize(parse1("{ready: true}"), us()) == "{ready: true}");
    CHECK(serialize(parse1("\\p.p.x"), us()) == "\\p.p.x");
    CHECK(serialize(parse1("[1, \"a\"]"), us()) == "[1, \"a\"]");
    CHECK(serialize(parse1("()"), us()) == "()");
    CHECK(serialize(parse1("\\n. n * 2"), us()) == "\\n.n * 2");
    CHECK_THROWS(serialize(parse1("1 + 2"), us()));      // not a value form
    CHECK_THROWS(serialize(parse1("{U}:1"), us()));      // not label-free
}

TEST_CASE("parse_response yields ok/error pairs") {
    PreludeDefs empty;
    ExprPtr ok1 = parse_response("{ready: true}", us(), empty);
    CHECK(equal(ok1, parse1("[true, {ready: true}]")));

    ExprPtr ok2 = parse_response("\\n. n * 2", us(), empty);
    const auto* arr = as<ArrayNode>(ok2);
    REQUIRE(arr != nullptr);
    CHECK(equal(arr->elements[0], bool_lit(true)));
    CHECK(equal(arr->elements[1], parse1("\\n. n * 2")));

    ExprPtr bad = parse_response("this is prose, not a term", us(), empty);
    const auto* barr = as<ArrayNode>(bad);
    REQUIRE(barr != nullptr);
    CHECK(equal(barr->elements[0], bool_lit(false)));
    CHECK(as<LitNode>(barr->elements[1]) != nullptr);

    // whitespace tolerated; exactly one value form required
    CHECK(equal(parse_response("  42  ", us(), empty), parse1("[true, 42]")));
    CHECK(equal(nodep<ArrayNode>(parse_response("1 2", us(), empty))->elements[0], bool_lit(false)));
    // expressions needing computation are rejected
    CHECK(equal(nodep<ArrayNode>(parse_response("1 + 2", us(), empty))->elements[0], bool_lit(false)));
    // labels are rejected in responses
    CHECK(equal(nodep<ArrayNode>(parse_response("{U}:1", us(), empty))->elements[0], bool_lit(false)));
    // negative integers round-trip even though programs write 0 - n
    CHECK(equal(parse_response("-5", us(), empty), parse1("[true, (0 - 5)]")) ==
          false);  // shapes differ: literal vs subtraction
    const auto* neg = nodep<ArrayNode>(parse_response("-5", us(), empty));
    REQUIRE(neg != nullptr);
    CHECK(std::get<std::int64_t>(as<LitNode>(neg->elements[1])->value) == -5);
}

TEST_CASE("parse_response expands prelude constants to closed definitions") {
    PreludeDefs prelude;
    prelude["double"] = parse1("\\n.n * 2");
    ExprPtr out = parse_response("double", us(), prelude);
    CHECK(equal(out, make_expr(ArrayNode{{bool_lit(true), prelude["double"]}})));

    // free identifiers inside lambda bodies expand too
    out = parse_response("\\x. double x", us(), prelude);
    const auto* arr = as<ArrayNode>(out);
    REQUIRE(arr != nullptr);
    CHECK(is_closed(arr->elements[1]));

    // unknown identifiers fail the parse
    out = parse_response("\\x. mystery x", us(), prelude);
    CHECK(equal(as<ArrayNode>(out)->elements[0], bool_lit(false)));
}

TEST_CASE("serialize/parse round-trip on generated label-free values") {
    PreludeDefs empty;
    util::SplitMix64 rng(77);
    int done = 0;
    for (int i = 0; done < 300; ++i) {
        ExprPtr v = erase(us(), us().top(), gen_labelled_value_expr(us(), rng.next()));
        std::string text = serialize(v, us());
        ExprPtr back = parse_response(text, us(), empty);
        const auto* arr = as<ArrayNode>(back);
        REQUIRE(arr != nullptr);
        REQUIRE(equal(arr->elements[0], bool_lit(true)));
        CHECK(equal(arr->elements[1], v));
        ++done;
    }
}

TEST_CASE("pretty printing is parsimonious and labels prefix values") {
    auto cfg = config();
    CHECK(show(run("{U}:[1, 2]", cfg)).substr(0, 5) == "{U}:[");
    CHECK(show(run("3", cfg)) == "3");
    EvalSuccess res = ok(run("\\x.x", cfg));
    CHECK(pretty_binding(res.value, us()) == "fn");
    CHECK(pretty(res.value, us()) == "\\x.x");
}

TEST_CASE("printed expressions re-parse to equal trees") {
    util::SplitMix64 rng(31337);
    for (int i = 0; i < 200; ++i) {
        ExprPtr program = gen_core_program(us(), rng.next());
        std::string text = print_expr(program, us());
        CAPTURE(text);
        ExprPtr back = parse1(text);
        CHECK(equal(back, program));
    }
    for (int i = 0; i < 200; ++i) {
        ExprPtr program = gen_program(
            GenConfig{&us(), Sublanguage::Unrestricted, us().top(), us().bot(), 40, true}, rng.next());
        std::string text = print_expr(program, us());
        CAPTURE(text);
        ExprPtr back = parse1(text);
        CHECK(equal(back, program));
    }
}
