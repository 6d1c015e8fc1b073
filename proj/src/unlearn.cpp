#include "dub/unlearn.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "dub/errors.hpp"
#include "dub/rng.hpp"

namespace dub {

namespace {

// Per-target working state shared across the randomized runs: the closure of
// the base KB, a memo of rule applications implying each fact, and the
// target's derivation cone.
//
// The cone C is the least fact set containing the target and closed under
// "add the body of any application over the full closure whose head is in
// C". For any subset U of K, every derivation tree of the target from K \ U
// consists of facts derivable from K (hence in the closure) and, walking
// down from the root, each node stays inside C — so the target is deducible
// from K \ U iff it is deducible from (K ∩ C) \ U. Membership checks can
// therefore run on the (much smaller) cone slice of K.
class TargetContext {
public:
    TargetContext(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                  const DeductionLimits& limits)
        : target_(target), kb_(kb), rules_(rules), limits_(limits),
          closed_(deductive_closure(kb, rules, limits)) {
        build_cone();
    }

    TargetContext(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                  const DeductionLimits& limits, const ClosedKB& precomputed)
        : target_(target), kb_(kb), rules_(rules), limits_(limits), closed_(precomputed) {
        build_cone();
    }

    const Fact& target() const { return target_; }
    const KnowledgeBase& kb() const { return kb_; }
    const ClosedKB& closed() const { return closed_; }

    const std::vector<Instantiation>& instantiations_of(const Fact& f) {
        auto it = inst_cache_.find(f);
        if (it != inst_cache_.end()) return it->second;
        auto [pos, _] = inst_cache_.emplace(f, implying_instantiations(f, closed_, rules_));
        return pos->second;
    }

    bool target_deducible_without(const FactSet& removed) {
        scratch_.clear();
        for (const Fact& f : cone_base_)
            if (!removed.count(f)) scratch_.push_back(f);
        return detail::is_deducible_facts(target_, scratch_, rules_.vocab.size(), rules_,
                                          /*early_exit=*/true, limits_);
    }

private:
    void build_cone() {
        FactSet cone;
        std::deque<Fact> frontier;
        cone.insert(target_);
        frontier.push_back(target_);
        while (!frontier.empty()) {
            const Fact f = frontier.front();
            frontier.pop_front();
            for (const Instantiation& inst : instantiations_of(f)) {
                for (const Fact& b : inst.body) {
                    if (cone.insert(b).second) frontier.push_back(b);
                }
            }
        }
        for (const Fact& f : kb_.facts())
            if (cone.count(f)) cone_base_.push_back(f);
    }

    Fact target_;
    const KnowledgeBase& kb_;
    const RuleSet& rules_;
    DeductionLimits limits_;
    ClosedKB closed_;
    std::unordered_map<Fact, std::vector<Instantiation>, FactHash> inst_cache_;
    std::vector<Fact> cone_base_;  // K ∩ C, sorted (kb order)
    std::vector<Fact> scratch_;
};

std::vector<Fact> dus_impl(TargetContext& ctx, Rng& rng) {
    FactSet hit;                 // Û: facts whose re-derivations are blocked
    std::vector<Fact> worklist;  // T: not yet expanded
    hit.insert(ctx.target());
    worklist.push_back(ctx.target());

    while (!worklist.empty()) {
        const std::size_t i = static_cast<std::size_t>(uniform_below(rng, worklist.size()));
        const Fact current = worklist[i];
        worklist[i] = worklist.back();
        worklist.pop_back();

        const auto& insts = ctx.instantiations_of(current);
        std::vector<std::uint32_t> order(insts.size());
        for (std::uint32_t j = 0; j < order.size(); ++j) order[j] = j;
        deterministic_shuffle(order, rng);

        for (const std::uint32_t j : order) {
            const std::vector<Fact>& body = insts[j].body;
            bool already_hit = false;
            for (const Fact& b : body) {
                if (hit.count(b)) {
                    already_hit = true;
                    break;
                }
            }
            if (already_hit) continue;
            const Fact pick = body[static_cast<std::size_t>(uniform_below(rng, body.size()))];
            hit.insert(pick);
            worklist.push_back(pick);
        }
    }

    std::vector<Fact> result;
    for (const Fact& f : ctx.kb().facts())
        if (hit.count(f)) result.push_back(f);
    return result;  // kb order is sorted already
}

MinimalSet rp_impl(TargetContext& ctx, std::vector<Fact> u, Rng& rng) {
    {
        FactSet all(u.begin(), u.end());
        if (ctx.target_deducible_without(all))
            throw ValidationError("rp precondition violated: input is not a deep-unlearning set");
    }

    std::vector<Fact> current = std::move(u);
    bool removed_any = true;
    while (removed_any) {
        removed_any = false;
        std::vector<Fact> order = current;
        deterministic_shuffle(order, rng);
        for (const Fact& candidate : order) {
            FactSet without_candidate;
            for (const Fact& f : current)
                if (f != candidate) without_candidate.insert(f);
            if (!ctx.target_deducible_without(without_candidate)) {
                // Keeping `candidate` in the KB still blocks the target, so
                // it is dead weight in the removal set.
                current.erase(std::find(current.begin(), current.end(), candidate));
                removed_any = true;
            }
        }
    }

    std::sort(current.begin(), current.end());
    return MinimalSet{ctx.target(), std::move(current)};
}

void require_target_in_kb(const Fact& target, const KnowledgeBase& kb) {
    if (!kb.contains(target)) throw ValidationError("target fact is not in the knowledge base");
}

bool set_order(const MinimalSet& a, const MinimalSet& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
}

}  // namespace

std::vector<Fact> dus(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                      std::uint64_t seed, const DeductionLimits& limits) {
    require_target_in_kb(target, kb);
    TargetContext ctx(target, kb, rules, limits);
    Rng rng(seed);
    return dus_impl(ctx, rng);
}

MinimalSet rp(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
              const std::vector<Fact>& u, std::uint64_t seed, const DeductionLimits& limits) {
    for (const Fact& f : u)
        if (!kb.contains(f))
            throw ValidationError("rp input contains a fact outside the knowledge base");
    TargetContext ctx(target, kb, rules, limits);
    Rng rng(seed);
    return rp_impl(ctx, u, rng);
}

MinimalSetCollection mdus(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                          std::uint64_t n_seed, std::uint64_t seed,
                          const DeductionLimits& limits) {
    require_target_in_kb(target, kb);
    if (n_seed == 0) throw ValidationError("mdus needs n_seed >= 1");

    TargetContext ctx(target, kb, rules, limits);
    std::vector<MinimalSet> sets;
    sets.reserve(n_seed);
    for (std::uint64_t i = 0; i < n_seed; ++i) {
        Rng rng(mix_seed(seed, i));
        sets.push_back(rp_impl(ctx, dus_impl(ctx, rng), rng));
    }

    std::sort(sets.begin(), sets.end(), set_order);
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return MinimalSetCollection{target, n_seed, std::move(sets)};
}

bool verify_minimal(const Fact& target, const KnowledgeBase& kb, const RuleSet& rules,
                    const std::vector<Fact>& u, const DeductionLimits& limits) {
    for (const Fact& f : u)
        if (!kb.contains(f)) return false;

    const KnowledgeBase without_all = kb.without(u);
    if (is_deducible(target, without_all, rules, /*early_exit=*/true, limits)) return false;

    // Single-element restores suffice: deducibility from kb minus a set only
    // grows as the set shrinks, so any redundant proper subset implies some
    // single element is redundant.
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::vector<Fact> all_but_one;
        all_but_one.reserve(u.size() - 1);
        for (std::size_t j = 0; j < u.size(); ++j)
            if (j != i) all_but_one.push_back(u[j]);
        if (!is_deducible(target, kb.without(all_but_one), rules, /*early_exit=*/true, limits))
            return false;
    }
    return true;
}

}  // namespace dub
