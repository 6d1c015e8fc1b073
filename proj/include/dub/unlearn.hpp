#pragma once

#include <cstdint>
#include <vector>

#include "dub/deduction.hpp"

namespace dub {

// A set u of base facts such that removing u blocks every derivation of the
// target, while removing any proper subset does not. members is sorted.
struct MinimalSet {
    Fact target{};
    std::vector<Fact> members;

    friend auto operator<=>(const MinimalSet&, const MinimalSet&) = default;
};

// Deduplicated results of n_seed independent randomized walks; sets are
// sorted (by size, then lexicographically) so the collection is a canonical
// value independent of run interleaving.
struct MinimalSetCollection {
    Fact target{};
    std::uint64_t n_seed{};
    std::vector<MinimalSet> sets;
};

// Random walk over rule applications: starting from the target, repeatedly
// pick an unprocessed fact, and for every application implying it that is
// not already hit, block it by drawing one body fact. Returns the blocking
// set intersected with the base KB, sorted. The target must be in kb.
std::vector<Fact> dus(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                      std::uint64_t seed, const DeductionLimits& limits = {});

// Random pruning: shuffled passes over u dropping every element whose
// removal keeps the target underivable; repeats until a full pass drops
// nothing. Precondition: u is a deep-unlearning set (target not deducible
// from kb minus u).
MinimalSet rp(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
              const std::vector<Fact>& u, std::uint64_t seed, const DeductionLimits& limits = {});

// n_seed independent dus+rp runs (run i seeded with mix_seed(seed, i)),
// deduplicated. Deterministic for fixed inputs regardless of how runs are
// scheduled.
MinimalSetCollection mdus(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                          std::uint64_t n_seed, std::uint64_t seed,
                          const DeductionLimits& limits = {});

// True iff u is contained in kb, removing u blocks the target, and putting
// any single element back re-enables it. (The single-element check suffices:
// deducibility from kb minus a subset only grows as the subset shrinks.)
bool verify_minimal(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                    const std::vector<Fact>& u, const DeductionLimits& limits = {});

}  // namespace dub
