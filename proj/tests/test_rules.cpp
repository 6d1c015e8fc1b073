#include <algorithm>
#include <doctest.h>

#include <dub/errors.hpp>
#include <dub/genkb.hpp>
#include <dub/rules.hpp>

using namespace dub;

namespace {
const Vocabulary& fam() {
    static const Vocabulary v = Vocabulary::family_default();
    return v;
}
}  // namespace

TEST_CASE("parsing the household rule") {
    const Rule r = parse_rule("(X, husband, Z) & (Y, father, Z) -> (X, child, Y)", fam());
    REQUIRE(r.body.size() == 2);
    CHECK(r.var_count == 3);
    // Canonical variable numbering scans body atoms left to right.
    CHECK(r.body[0] == RuleAtom{0, fam().require("husband"), 1});
    CHECK(r.body[1] == RuleAtom{2, fam().require("father"), 1});
    CHECK(r.head == RuleAtom{0, fam().require("child"), 2});
}

TEST_CASE("parsing a single-atom rule") {
    const Rule r = parse_rule("(B, mother, A) -> (A, child, B)", fam());
    REQUIRE(r.body.size() == 1);
    CHECK(r.var_count == 2);
    CHECK(r.body[0] == RuleAtom{0, fam().require("mother"), 1});
    CHECK(r.head == RuleAtom{1, fam().require("child"), 0});
}

TEST_CASE("whitespace is free and variable names are arbitrary identifiers") {
    const Rule a = parse_rule("(X, husband, Z) & (Y, father, Z) -> (X, child, Y)", fam());
    const Rule b = parse_rule("  ( Alpha,husband , Gamma )&(Beta, father,Gamma)->  "
                              "(Alpha, child, Beta)  ",
                              fam());
    CHECK(a == b);  // alpha-equivalent rules canonicalize identically
    const Rule c = parse_rule("(Y, father, Z) & (X, husband, Z) -> (X, child, Y)", fam());
    CHECK(a != c);  // but body order is meaningful
}

TEST_CASE("format then parse is the identity") {
    const char* texts[] = {
        "(B, mother, A) -> (A, child, B)",
        "(X, husband, Z) & (Y, father, Z) -> (X, child, Y)",
        "(A, child, C) & (B, wife, C) -> (A, child, B)",
        "(C, mother, A) & (C, father, B) -> (A, husband, B)",
    };
    for (const char* text : texts) {
        const Rule r = parse_rule(text, fam());
        const std::string rendered = format_rule(r, fam());
        CHECK(parse_rule(rendered, fam()) == r);
    }
    CHECK(format_rule(parse_rule("(B, mother, A) -> (A, child, B)", fam()), fam()) ==
          "(X1, mother, X2) -> (X2, child, X1)");
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_rule("(A, cousin, B) -> (A, child, B)", fam()), ParseError);
    CHECK_THROWS_AS(parse_rule("(A, mother, B)", fam()), ParseError);          // no head
    CHECK_THROWS_AS(parse_rule("(A, mother B) -> (B, child, A)", fam()), ParseError);
    CHECK_THROWS_AS(parse_rule("-> (A, child, B)", fam()), ParseError);        // empty body
    CHECK_THROWS_AS(parse_rule("(A, mother, B) -> (A, child, C)", fam()), ParseError);  // unsafe C
    CHECK_THROWS_AS(parse_rule("(A, mother, B) -> (A, child, B) extra", fam()), ParseError);
    try {
        parse_rule("(A, cousin, B) -> (A, child, B)", fam(), 5);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(e.column() > 1);
    }
}

TEST_CASE("an empty rule file parses to an empty rule set") {
    const RuleSet rs = parse_rule_file("", fam());
    CHECK(rs.size() == 0);
    CHECK(parse_rule_file("# only a comment\n\n  \n", fam()).size() == 0);
}

TEST_CASE("a file with the ten child rules parses to exactly ten rules") {
    const std::string text =
        "(B, mother, A) -> (A, child, B)\n"
        "(B, father, A) -> (A, child, B)\n"
        "(C, mother, A) & (B, brother, C) -> (A, child, B)\n"
        "(C, mother, A) & (B, sister, C) -> (A, child, B)\n"
        "(C, father, A) & (B, sister, C) -> (A, child, B)\n"
        "(C, father, A) & (B, brother, C) -> (A, child, B)\n"
        "(A, child, C) & (B, sister, C) -> (A, child, B)\n"
        "(A, child, C) & (B, brother, C) -> (A, child, B)\n"
        "(A, child, C) & (B, wife, C) -> (A, child, B)\n"
        "(A, child, C) & (B, husband, C) -> (A, child, B)\n";
    const RuleSet rs = parse_rule_file(text, fam());
    CHECK(rs.size() == 10);
    for (const Rule& r : rs.rules) CHECK(r.head.relation == fam().require("child"));
}

TEST_CASE("alpha-equivalent duplicate lines are rejected with both line numbers") {
    const std::string text =
        "(B, mother, A) -> (A, child, B)\n"
        "# renamed variables, same rule\n"
        "(Mom, mother, Kid) -> (Kid, child, Mom)\n";
    try {
        parse_rule_file(text, fam());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1") != std::string::npos);
        CHECK(e.line() == 3);
    }
}

TEST_CASE("rule file errors report the offending line") {
    try {
        parse_rule_file("(B, mother, A) -> (A, child, B)\n(A, x, B) -> (A, child, B)\n", fam());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("the default rule set holds 48 rules and the expected members") {
    const RuleSet& rs = default_rule_set();
    CHECK(rs.size() == 48);
    CHECK(rs.vocab == fam());
    const Rule via_mother = parse_rule("(B, mother, A) -> (A, child, B)", fam());
    const Rule via_wife = parse_rule("(A, child, C) & (B, wife, C) -> (A, child, B)", fam());
    auto has = [&](const Rule& r) {
        return std::find(rs.rules.begin(), rs.rules.end(), r) != rs.rules.end();
    };
    CHECK(has(via_mother));
    CHECK(has(via_wife));
    CHECK(parse_rule_file(default_rule_text(), fam()).size() == 48);
}
