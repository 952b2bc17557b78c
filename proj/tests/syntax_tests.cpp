#include "doctest.h"

#include "branesim/canonical.hpp"
#include "branesim/normal.hpp"
#include "branesim/parse.hpp"
#include "branesim/rates.hpp"

using namespace brane;

namespace {

int parse_error_line(const std::string& text) {
    try {
        parse_system(text);
    } catch (const ParseError& e) {
        return e.line;
    }
    return -1;
}

int parse_error_column(const std::string& text) {
    try {
        parse_system(text);
    } catch (const ParseError& e) {
        return e.column;
    }
    return -1;
}

}  // namespace

TEST_CASE("parsing round-trips through printing") {
    const char* inputs[] = {
        "void",
        "0[void]",
        "phago<n>[void]",
        "phago<n>.exo<m>[void]",
        "cophago<n>(coexo<m>)|coexo<m>[phago<k>[void]]",
        "pino<n>(phago<a>|exo<b>)[void]",
        "10000 * phago<n>.exo<m>[phago<k>[void]] o 100 * "
        "cophago<n>(coexo<m>)|coexo<m>[phago<k>[void]]",
        "coexo<n>.(phago<a>|phago<a>)[exo<n>[void]]",
        "3 * pino<x>(0)[void] o 0[phago<y>[void]]",
    };
    for (const char* text : inputs) {
        CAPTURE(text);
        SystemPtr once = parse_system(text);
        SystemPtr twice = parse_system(to_string(once));
        CHECK(congruent(once, twice));
    }
}

TEST_CASE("whitespace and comments are ignored") {
    SystemPtr a = parse_system("phago<n>[void] o pino<m>(0)[void]");
    SystemPtr b = parse_system(
        "  # leading comment\n"
        "phago<n> [ void ]   # trailing comment\n"
        "  o\n"
        "pino<m> ( 0 ) [ void ]\n");
    CHECK(congruent(a, b));
}

TEST_CASE("syntax errors carry line and column") {
    CHECK(parse_error_line("phago<n") == 1);
    CHECK(parse_error_column("phago<n") >= 7);
    CHECK(parse_error_line("phago<n>[void]\no phago") == 2);
    CHECK(parse_error_line("phago<n>[void]\n o\n5[void]") == 3);
    // "void" is a complete system, never a composition operand.
    CHECK(parse_error_line("void o phago<n>[void]") == 1);
    // "0" only stands alone as a membrane.
    CHECK(parse_error_line("0|phago<n>[void]") == 1);
    // Unknown prefix keyword.
    CHECK(parse_error_line("gulp<n>[void]") == 1);
    // Missing content brackets.
    CHECK(parse_error_line("phago<n>") == 1);
}

TEST_CASE("prefix arity is enforced") {
    CHECK_THROWS_AS(parse_system("cophago<n>[void]"), ParseError);
    CHECK_THROWS_AS(parse_system("pino<n>[void]"), ParseError);
    CHECK_THROWS_AS(parse_system("phago<n>(0)[void]"), ParseError);
    CHECK_THROWS_AS(parse_system("exo<n>(0)[void]"), ParseError);
    CHECK_THROWS_AS(parse_system("coexo<n>(0)[void]"), ParseError);
    CHECK_NOTHROW(parse_system("cophago<n>(0)[void]"));
    CHECK_NOTHROW(parse_system("pino<n>(exo<a>.coexo<b>)[void]"));
}

TEST_CASE("structural congruence identifies reordered terms") {
    auto same = [](const char* a, const char* b) {
        CAPTURE(a);
        CAPTURE(b);
        CHECK(congruent(parse_system(a), parse_system(b)));
    };
    // Composition is commutative and associative with unit erasure.
    same("phago<a>[void] o phago<b>[void]", "phago<b>[void] o phago<a>[void]");
    same("phago<a>[void] o 0[void]", "phago<a>[void]");
    same("0[0[void] o 0[void]]", "void");
    // Membrane combination is commutative.
    same("phago<a>|exo<b>[void]", "exo<b>|phago<a>[void]");
    // Congruence is closed under prefixes: continuations and arguments.
    same("pino<n>(phago<a>|exo<b>)[void]", "pino<n>(exo<b>|phago<a>)[void]");
    same("coexo<n>.(phago<a>|exo<b>)[void]", "coexo<n>.(exo<b>|phago<a>)[void]");
    // ... and under cell contents.
    same("exo<z>[phago<a>[void] o phago<b>[void]]",
         "exo<z>[phago<b>[void] o phago<a>[void]]");
    // Multiplicities unfold to composition.
    same("3 * phago<a>[void]", "phago<a>[void] o phago<a>[void] o phago<a>[void]");
}

TEST_CASE("structural congruence distinguishes different terms") {
    auto different = [](const char* a, const char* b) {
        CAPTURE(a);
        CAPTURE(b);
        CHECK(!congruent(parse_system(a), parse_system(b)));
    };
    different("phago<a>[void]", "phago<b>[void]");
    different("phago<a>[void]", "exo<a>[void]");
    different("phago<a>.exo<b>[void]", "phago<a>[void]");
    different("2 * phago<a>[void]", "3 * phago<a>[void]");
    different("0[phago<a>[void]]", "phago<a>[void]");
    different("pino<n>(phago<a>)[void]", "pino<n>(0)[void]");
}

TEST_CASE("canonical printing is stable and reparseable") {
    const char* inputs[] = {
        "phago<b>[void] o phago<a>[void] o phago<b>[void]",
        "exo<b>|phago<a>|phago<a>[pino<c>(0)[void]]",
        "10000 * phago<n>.exo<m>[phago<k>[void]] o 100 * "
        "cophago<n>(coexo<m>)|coexo<m>[phago<k>[void]]",
    };
    for (const char* text : inputs) {
        CAPTURE(text);
        CanonSystemPtr canon = canonical_system(parse_system(text));
        std::string printed = to_string(canon);
        CanonSystemPtr reparsed = canonical_system(parse_system(printed));
        CHECK(compare(canon, reparsed) == 0);
        CHECK(to_string(reparsed) == printed);
    }
}

TEST_CASE("empty canonical system prints as void") {
    CHECK(to_string(canonical_system(parse_system("void"))) == "void");
    CHECK(to_string(canonical_system(parse_system("0[void]"))) == "void");
}

TEST_CASE("normal form groups congruent cells") {
    NormalSystem nf =
        to_normal_form(parse_system("2 * phago<a>[void] o exo<b>[void] o phago<a>[void]"));
    REQUIRE(nf.size() == 2);
    // Canonical order puts the phago entry first (entries are sorted).
    CHECK((nf[0].count == 3 || nf[1].count == 3));
    CHECK((nf[0].count == 1 || nf[1].count == 1));
    CHECK(congruent(unfold(nf),
                    parse_system("3 * phago<a>[void] o exo<b>[void]")));
}

TEST_CASE("normal form of the two-population system") {
    NormalSystem nf = to_normal_form(parse_system(
        "10000 * phago<n>.exo<m>[phago<k>[void]] o 100 * "
        "cophago<n>(coexo<m>)|coexo<m>[phago<k>[void]]"));
    REQUIRE(nf.size() == 2);
    Count a = nf[0].count, b = nf[1].count;
    CHECK(((a == 10000 && b == 100) || (a == 100 && b == 10000)));
}

TEST_CASE("replicate is balanced composition") {
    SystemPtr cellp = parse_system("phago<a>[void]");
    CHECK(replicate(0, cellp)->tag == System::Tag::Void);
    CHECK(congruent(replicate(1, cellp), cellp));
    CanonSystemPtr big = canonical_system(replicate(10000, cellp));
    REQUIRE(big->cells.size() == 1);
    CHECK(big->cells[0].second == 10000);
}

TEST_CASE("decimal literals parse to exact rationals") {
    Rational r;
    REQUIRE(parse_decimal_rational("10", r));
    CHECK(r == 10);
    REQUIRE(parse_decimal_rational("0.25", r));
    CHECK(r == Rational(1, 4));
    REQUIRE(parse_decimal_rational("2.5e-3", r));
    CHECK(r == Rational(1, 400));
    REQUIRE(parse_decimal_rational("1e2", r));
    CHECK(r == 100);
    CHECK(!parse_decimal_rational("1..2", r));
    CHECK(!parse_decimal_rational("", r));
    CHECK(!parse_decimal_rational("abc", r));
}

TEST_CASE("rates files bind channels to positive rationals") {
    RateTable t = parse_rates(
        "# channel rates\n"
        "n = 10\n"
        "m = 0.25\n"
        "\n"
        "default = 2  # fallback\n");
    CHECK(t.rate("n") == 10);
    CHECK(t.rate("m") == Rational(1, 4));
    CHECK(t.rate("unlisted") == 2);
    CHECK(t.rate_double("n") == doctest::Approx(10.0));
}

TEST_CASE("rates default to one without a binding") {
    RateTable t = parse_rates("");
    CHECK(t.rate("anything") == 1);
}

TEST_CASE("malformed rates are rejected with line numbers") {
    auto error_line = [](const std::string& text) {
        try {
            parse_rates(text);
        } catch (const RatesError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(error_line("n = 0") == 1);            // rates must be positive
    CHECK(error_line("n = 10\nm = -1") == 2);   // negative
    CHECK(error_line("n = 10\nm 0.5") == 2);    // missing '='
    CHECK(error_line("n = ten") == 1);          // not a number
    CHECK(error_line("bad name = 1") == 1);     // invalid channel name
    CHECK(error_line("n = 10") == -1);          // well-formed
}
