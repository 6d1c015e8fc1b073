#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dub/fact.hpp"

namespace dub {

using VarId = std::uint32_t;

// One pattern (X, relation, Y) inside a rule. Variables are canonical
// indices: 0 is the first variable encountered scanning body atoms left to
// right (subject before object), head last.
struct RuleAtom {
    VarId subject{};
    RelationId relation{};
    VarId object{};

    friend auto operator<=>(const RuleAtom&, const RuleAtom&) = default;
};

// Horn rule: body_1 & ... & body_n -> head. Always safe (every head variable
// occurs in the body) and stored in alpha-canonical form, so operator== is
// equivalence up to variable renaming.
struct Rule {
    std::vector<RuleAtom> body;
    RuleAtom head;
    std::uint32_t var_count{};

    friend auto operator<=>(const Rule&, const Rule&) = default;
};

struct RuleSet {
    Vocabulary vocab;
    std::vector<Rule> rules;

    std::size_t size() const { return rules.size(); }
};

// Text form:  (A, husband, C) & (B, father, C) -> (A, child, B)
// Variables are identifiers, relations must exist in `vocab`, whitespace is
// free. Errors carry 1-based line/column.
Rule parse_rule(const std::string& text, const Vocabulary& vocab, std::size_t line_no = 1);

// Canonical rendering with variables X1, X2, ... parse(format(r)) == r.
std::string format_rule(const Rule& rule, const Vocabulary& vocab);

// Whole-file parse: one rule per line, blank lines and lines starting with
// '#' skipped, alpha-equivalent duplicates rejected with both line numbers.
RuleSet parse_rule_file(const std::string& text, const Vocabulary& vocab);

}  // namespace dub
