#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "llmbda/lattice.hpp"

using namespace llmbda;

namespace {

void check_lattice_laws(const LatticeSpec& spec) {
    const std::size_t n = spec.size();
    for (std::size_t i = 0; i < n; ++i) {
        Label a = spec.element(i);
        CHECK(spec.join(a, spec.bot()) == a);
        CHECK(spec.join(a, spec.top()) == spec.top());
        CHECK(spec.join(a, a) == a);
        CHECK(spec.leq(spec.bot(), a));
        CHECK(spec.leq(a, spec.top()));
        CHECK(spec.leq(a, a));
        for (std::size_t j = 0; j < n; ++j) {
            Label b = spec.element(j);
            CHECK(spec.join(a, b) == spec.join(b, a));
            if (spec.leq(a, b) && spec.leq(b, a)) CHECK(a == b);
            for (std::size_t k = 0; k < n; ++k) {
                Label c = spec.element(k);
                CHECK(spec.join(spec.join(a, b), c) == spec.join(a, spec.join(b, c)));
                if (spec.leq(a, b) && spec.leq(b, c)) CHECK(spec.leq(a, c));
            }
        }
    }
}

}  // namespace

TEST_CASE("join and leq laws hold exhaustively for the built-in lattices") {
    check_lattice_laws(LatticeSpec::powerset_us());
    check_lattice_laws(LatticeSpec::two_point());
    check_lattice_laws(LatticeSpec::chain3());
}

TEST_CASE("powerset joins are set unions") {
    const auto& us = LatticeSpec::powerset_us();
    Label u = *us.parse_label("{U}");
    Label s = *us.parse_label("{S}");
    CHECK(us.join(u, s) == *us.parse_label("{U,S}"));
    CHECK(us.join(u, us.bot()) == u);
    CHECK(us.leq(u, *us.parse_label("{U,S}")));
    CHECK_FALSE(us.leq(u, s));
    CHECK(us.leq(us.bot(), s));
}

TEST_CASE("chain joins are maxima") {
    const auto& c3 = LatticeSpec::chain3();
    Label m = *c3.parse_label("{M}");
    Label h = *c3.parse_label("{H}");
    CHECK(c3.join(m, h) == h);
    CHECK(c3.leq(m, h));
    CHECK_FALSE(c3.leq(h, m));
    CHECK(c3.bot() == *c3.parse_label("{L}"));
}

TEST_CASE("label literals parse and render canonically") {
    const auto& us = LatticeSpec::powerset_us();
    CHECK(*us.parse_label("{U,S}") == us.top());
    CHECK(*us.parse_label("{}") == us.bot());
    CHECK(*us.parse_label("{S}") == us.element(2));
    CHECK(*us.parse_label(" { S , U } ") == us.top());
    CHECK(us.show(*us.parse_label("{U,S}")) == "{U,S}");
    CHECK(us.show(us.bot()) == "{}");
    CHECK(us.show_or_bot(us.bot()) == "bot");

    CHECK_FALSE(us.parse_label("{X}").has_value());
    CHECK_FALSE(us.parse_label("{U,}").has_value());
    CHECK_FALSE(us.parse_label("U").has_value());

    const auto& c3 = LatticeSpec::chain3();
    CHECK(c3.show(*c3.parse_label("{M}")) == "{M}");
    CHECK_FALSE(c3.parse_label("{M,H}").has_value());
}

TEST_CASE("lattice files load from elements and covers") {
    const char* text =
        "# diamond\n"
        "lattice diamond\n"
        "elements bot left right top\n"
        "cover bot left\n"
        "cover bot right\n"
        "cover left top\n"
        "cover right top\n";
    LatticeSpec d = LatticeSpec::parse_spec_text(text, "<test>");
    CHECK(d.size() == 4);
    Label left = *d.parse_label("{left}");
    Label right = *d.parse_label("{right}");
    CHECK(d.join(left, right) == d.top());
    CHECK_FALSE(d.leq(left, right));
    check_lattice_laws(d);
}

TEST_CASE("malformed lattice specs are rejected") {
    CHECK_THROWS(LatticeSpec::parse_spec_text("lattice x\nelements a b\n", "<t>"));
    CHECK_THROWS(LatticeSpec::parse_spec_text("lattice x\nelements a b\ncover a b\ncover b a\n", "<t>"));
    CHECK_THROWS(LatticeSpec::parse_spec_text("lattice x\nelements a\ncover a b\n", "<t>"));
    CHECK_THROWS(LatticeSpec::parse_spec_text("lattice x\nelements a a\n", "<t>"));
    CHECK_THROWS(LatticeSpec::builtin("no-such-lattice"));
}
