#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dub/kb.hpp"
#include "dub/rules.hpp"

namespace dub {

struct DeductionLimits {
    // Hard cap on derived (non-base) facts; closure throws ResourceLimitError
    // beyond it rather than grinding on a pathological rule set.
    std::size_t max_derived = 1'000'000;
};

// A concrete rule application: body facts, in body-atom order, implying head.
struct Instantiation {
    std::uint32_t rule_index{};
    std::vector<Fact> body;
    Fact head;

    friend auto operator<=>(const Instantiation&, const Instantiation&) = default;
};

// Witness for one derived fact: the first rule application that produced it
// under the (deterministic) evaluation order.
struct Witness {
    std::uint32_t rule_index{};
    std::vector<Fact> body;
};

// Least fixpoint of a base KB under a rule set, plus provenance for every
// fact not already in the base.
struct ClosedKB {
    KnowledgeBase base;
    KnowledgeBase closure;
    std::map<Fact, Witness> witnesses;

    bool is_derived(const Fact& f) const { return witnesses.count(f) != 0; }
    std::size_t derived_count() const { return witnesses.size(); }
};

ClosedKB deductive_closure(const KnowledgeBase& kb, const RuleSet& rules,
                           const DeductionLimits& limits = {});

// Membership of `fact` in the closure. With early_exit the fixpoint stops as
// soon as the goal appears; the answer is identical either way.
bool is_deducible(const Fact& fact, const KnowledgeBase& kb, const RuleSet& rules,
                  bool early_exit = false, const DeductionLimits& limits = {});

// Every rule application over `closed.closure` whose head equals `fact`,
// sorted by (rule_index, body). Distinct variable bindings always yield
// distinct body tuples, so there is nothing to deduplicate.
std::vector<Instantiation> implying_instantiations(const Fact& fact, const ClosedKB& closed,
                                                   const RuleSet& rules);

namespace detail {
// Closure engine entry that skips KnowledgeBase construction; used by the
// unlearning inner loop where the base fact vector changes per call.
bool is_deducible_facts(const Fact& fact, const std::vector<Fact>& facts,
                        std::size_t relation_count, const RuleSet& rules,
                        bool early_exit, const DeductionLimits& limits);
}  // namespace detail

}  // namespace dub
