#pragma once

// Independent reference implementations the tests compare the library
// against. Everything here is deliberately naive — repeat-until-stable
// rescans, exhaustive subset enumeration, per-person graph searches — and
// shares no machinery with src/, so an agreement failure points at a real
// bug rather than a shared one.

#include <cstdint>
#include <set>
#include <vector>

#include <dub/deduction.hpp>
#include <dub/genkb.hpp>
#include <dub/kb.hpp>
#include <dub/rules.hpp>

namespace dub::oracle {

// Least fixpoint by brute force: every round re-derives every rule against
// the full current fact set until a round adds nothing.
std::set<Fact> naive_closure(const std::vector<Fact>& base, const RuleSet& rules);

bool naive_deducible(const Fact& fact, const std::vector<Fact>& base, const RuleSet& rules);

// Rule applications over `universe` with head == fact, found by enumerating
// all |objects|^var_count variable assignments per rule. Returned sorted by
// (rule_index, body); only sensible for small universes.
std::vector<Instantiation> naive_implying(const Fact& fact, const std::vector<Fact>& universe,
                                          const RuleSet& rules);

// Every minimal deep-unlearning set for `target`, by scanning all 2^|kb|
// subsets. Members sorted; list sorted by size, then lexicographically (the
// same canonical order mdus uses). Throws if kb has more than 20 facts.
std::vector<std::vector<Fact>> all_minimal_sets(const Fact& target, const KnowledgeBase& kb,
                                                const RuleSet& rules);

// All true kinship facts of the graph, recomputed one person at a time from
// the relation definitions with a local breadth-first sibling-group search.
// Names are interned through `symbols`, so running it after the library's
// own ground-truth derivation yields directly comparable facts.
std::vector<Fact> kinship_facts(const FamilyGraph& graph, SymbolTable& symbols,
                                const Vocabulary& vocab);

struct RandomInstance {
    KnowledgeBase kb;
    RuleSet rules;
    Fact target;  // one of kb's facts
};

// Seeded random KB + safe random rules, for fuzzing the engine against the
// oracles. Facts <= max_facts (at least 1), rules <= max_rules (at least 1),
// body atoms per rule <= max_body.
RandomInstance random_instance(std::uint64_t seed, int max_facts, int max_rules, int max_body);

// Pearson chi-square statistic of `observed` counts against expected
// proportions `probs` (need not be normalized).
double chi_square(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs);

}  // namespace dub::oracle
