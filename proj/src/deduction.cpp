#include "dub/deduction.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include "dub/errors.hpp"

namespace dub {

namespace {

// Append-only fact store with the three access paths the join needs:
// by relation, by (relation, subject), by (relation, object). Candidate
// lists hold insertion-order indices, so iteration is deterministic and the
// first witness of a fact is well defined.
class FactStore {
public:
    explicit FactStore(std::size_t relation_count) : by_rel_(relation_count) {}

    bool contains(const Fact& f) const { return present_.count(f) != 0; }

    bool insert(const Fact& f) {
        if (!present_.insert(f).second) return false;
        const auto idx = static_cast<std::uint32_t>(facts_.size());
        facts_.push_back(f);
        by_rel_[f.relation].push_back(idx);
        by_subj_[key(f.relation, f.subject)].push_back(idx);
        by_obj_[key(f.relation, f.object)].push_back(idx);
        return true;
    }

    const Fact& fact(std::uint32_t i) const { return facts_[i]; }
    const std::vector<Fact>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }

    static const std::vector<std::uint32_t>& empty_list() {
        static const std::vector<std::uint32_t> none;
        return none;
    }

    const std::vector<std::uint32_t>& by_relation(RelationId r) const { return by_rel_[r]; }

    const std::vector<std::uint32_t>& by_subject(RelationId r, ObjectId s) const {
        auto it = by_subj_.find(key(r, s));
        return it == by_subj_.end() ? empty_list() : it->second;
    }

    const std::vector<std::uint32_t>& by_object(RelationId r, ObjectId o) const {
        auto it = by_obj_.find(key(r, o));
        return it == by_obj_.end() ? empty_list() : it->second;
    }

private:
    static std::uint64_t key(RelationId r, ObjectId x) {
        return (std::uint64_t(r) << 32) | std::uint64_t(x);
    }

    std::vector<Fact> facts_;
    FactSet present_;
    std::vector<std::vector<std::uint32_t>> by_rel_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_subj_, by_obj_;
};

struct Binding {
    std::vector<ObjectId> value;
    std::vector<bool> bound;

    explicit Binding(std::uint32_t vars) : value(vars, 0), bound(vars, false) {}

    bool assign(VarId v, ObjectId x) {
        if (bound[v]) return value[v] == x;
        bound[v] = true;
        value[v] = x;
        return true;
    }

    void retract(VarId v, bool was_bound) {
        if (!was_bound) bound[v] = false;
    }
};

// Fact-at-a-time semi-naive evaluation. Every derivation has a body member
// that entered the store last; when that member is popped from the FIFO
// queue all the others are already present, so anchoring the join at the
// popped fact finds each instantiation at least once. New heads are buffered
// per anchor and flushed after its joins, which keeps the store immutable
// while candidate lists are being walked.
class Engine {
public:
    Engine(const RuleSet& rules, const DeductionLimits& limits)
        : rules_(rules), limits_(limits), store_(rules.vocab.size()) {
        triggers_.resize(rules.vocab.size());
        for (std::uint32_t ri = 0; ri < rules_.rules.size(); ++ri) {
            const Rule& rule = rules_.rules[ri];
            for (std::uint32_t pi = 0; pi < rule.body.size(); ++pi)
                triggers_[rule.body[pi].relation].push_back({ri, pi});
        }
    }

    void seed(const std::vector<Fact>& base) {
        for (const Fact& f : base) {
            if (f.relation >= rules_.vocab.size())
                throw ValidationError("fact uses relation id " + std::to_string(f.relation) +
                                      " outside the rule vocabulary");
            if (store_.insert(f)) queue_.push_back(static_cast<std::uint32_t>(store_.size() - 1));
        }
        base_count_ = store_.size();
    }

    // Runs to fixpoint; with a goal, stops as soon as the goal is derived.
    // Returns whether the goal was seen (always false without one).
    bool run(const Fact* goal, std::map<Fact, Witness>* witnesses) {
        if (goal && store_.contains(*goal)) return true;
        while (!queue_.empty()) {
            const std::uint32_t fi = queue_.front();
            queue_.pop_front();
            const Fact anchor = store_.fact(fi);
            pending_.clear();
            for (const auto& [ri, pi] : triggers_[anchor.relation]) {
                const Rule& rule = rules_.rules[ri];
                Binding binding(rule.var_count);
                if (!binding.assign(rule.body[pi].subject, anchor.subject)) continue;
                if (!binding.assign(rule.body[pi].object, anchor.object)) continue;
                std::vector<Fact> body_facts(rule.body.size());
                body_facts[pi] = anchor;
                std::uint32_t remaining_mask = 0;
                for (std::uint32_t j = 0; j < rule.body.size(); ++j)
                    if (j != pi) remaining_mask |= (1u << j);
                solve(rule, ri, remaining_mask, binding, body_facts);
            }
            if (flush(goal, witnesses)) return true;
        }
        return false;
    }

    const FactStore& store() const { return store_; }

private:
    struct Pending {
        Fact head;
        std::uint32_t rule_index;
        std::vector<Fact> body;
    };

    // Picks the cheapest unresolved atom, enumerates its candidates, recurses.
    void solve(const Rule& rule, std::uint32_t ri, std::uint32_t remaining_mask, Binding& binding,
               std::vector<Fact>& body_facts) {
        if (remaining_mask == 0) {
            const Fact head{binding.value[rule.head.subject], rule.head.relation,
                            binding.value[rule.head.object]};
            if (!store_.contains(head)) pending_.push_back({head, ri, body_facts});
            return;
        }

        std::uint32_t best = 0;
        std::size_t best_cost = std::numeric_limits<std::size_t>::max();
        for (std::uint32_t j = 0; j < rule.body.size(); ++j) {
            if (!(remaining_mask & (1u << j))) continue;
            const std::size_t cost = candidate_cost(rule.body[j], binding);
            if (cost < best_cost) {
                best_cost = cost;
                best = j;
            }
        }

        const RuleAtom& atom = rule.body[best];
        const std::uint32_t next_mask = remaining_mask & ~(1u << best);
        const bool s_bound = binding.bound[atom.subject];
        const bool o_bound = binding.bound[atom.object];

        if (s_bound && o_bound) {
            Fact probe{binding.value[atom.subject], atom.relation, binding.value[atom.object]};
            if (!store_.contains(probe)) return;
            body_facts[best] = probe;
            solve(rule, ri, next_mask, binding, body_facts);
            return;
        }

        const std::vector<std::uint32_t>& candidates =
            s_bound   ? store_.by_subject(atom.relation, binding.value[atom.subject])
            : o_bound ? store_.by_object(atom.relation, binding.value[atom.object])
                      : store_.by_relation(atom.relation);
        for (const std::uint32_t ci : candidates) {
            const Fact f = store_.fact(ci);
            if (!binding.assign(atom.subject, f.subject)) continue;
            if (!binding.assign(atom.object, f.object)) {
                binding.retract(atom.subject, s_bound);
                continue;
            }
            body_facts[best] = f;
            solve(rule, ri, next_mask, binding, body_facts);
            binding.retract(atom.object, o_bound);
            binding.retract(atom.subject, s_bound);
        }
    }

    std::size_t candidate_cost(const RuleAtom& atom, const Binding& binding) const {
        const bool s = binding.bound[atom.subject];
        const bool o = binding.bound[atom.object];
        if (s && o) return 0;
        if (s) return store_.by_subject(atom.relation, binding.value[atom.subject]).size();
        if (o) return store_.by_object(atom.relation, binding.value[atom.object]).size();
        return store_.by_relation(atom.relation).size();
    }

    bool flush(const Fact* goal, std::map<Fact, Witness>* witnesses) {
        for (Pending& p : pending_) {
            if (!store_.insert(p.head)) continue;
            if (store_.size() - base_count_ > limits_.max_derived)
                throw ResourceLimitError("closure exceeded max_derived = " +
                                         std::to_string(limits_.max_derived));
            queue_.push_back(static_cast<std::uint32_t>(store_.size() - 1));
            if (witnesses) witnesses->emplace(p.head, Witness{p.rule_index, std::move(p.body)});
            if (goal && p.head == *goal) return true;
        }
        return false;
    }

    const RuleSet& rules_;
    DeductionLimits limits_;
    FactStore store_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> triggers_;
    std::deque<std::uint32_t> queue_;
    std::vector<Pending> pending_;
    std::size_t base_count_ = 0;
};

void check_vocab(const KnowledgeBase& kb, const RuleSet& rules) {
    if (!(kb.vocabulary() == rules.vocab))
        throw ValidationError("rule set and knowledge base use different vocabularies");
}

}  // namespace

ClosedKB deductive_closure(const KnowledgeBase& kb, const RuleSet& rules,
                           const DeductionLimits& limits) {
    check_vocab(kb, rules);
    Engine engine(rules, limits);
    engine.seed(kb.facts());
    ClosedKB out;
    engine.run(nullptr, &out.witnesses);
    out.base = kb;
    out.closure = KnowledgeBase(kb.vocabulary(), engine.store().facts());
    return out;
}

bool is_deducible(const Fact& fact, const KnowledgeBase& kb, const RuleSet& rules, bool early_exit,
                  const DeductionLimits& limits) {
    check_vocab(kb, rules);
    return detail::is_deducible_facts(fact, kb.facts(), kb.vocabulary().size(), rules, early_exit,
                                      limits);
}

namespace detail {

bool is_deducible_facts(const Fact& fact, const std::vector<Fact>& facts,
                        std::size_t relation_count, const RuleSet& rules, bool early_exit,
                        const DeductionLimits& limits) {
    if (relation_count != rules.vocab.size())
        throw ValidationError("relation count does not match the rule vocabulary");
    Engine engine(rules, limits);
    engine.seed(facts);
    if (early_exit) return engine.run(&fact, nullptr);
    engine.run(nullptr, nullptr);
    return engine.store().contains(fact);
}

}  // namespace detail

std::vector<Instantiation> implying_instantiations(const Fact& fact, const ClosedKB& closed,
                                                   const RuleSet& rules) {
    check_vocab(closed.closure, rules);

    std::vector<Instantiation> out;
    const KnowledgeBase& facts = closed.closure;

    for (std::uint32_t ri = 0; ri < rules.rules.size(); ++ri) {
        const Rule& rule = rules.rules[ri];
        if (rule.head.relation != fact.relation) continue;
        Binding binding(rule.var_count);
        if (!binding.assign(rule.head.subject, fact.subject)) continue;
        if (!binding.assign(rule.head.object, fact.object)) continue;

        std::vector<Fact> body_facts(rule.body.size());

        auto opt = [&](VarId v) {
            return binding.bound[v] ? std::optional<ObjectId>(binding.value[v]) : std::nullopt;
        };

        auto enumerate = [&](auto&& self, std::uint32_t mask) -> void {
            if (mask == 0) {
                out.push_back({ri, body_facts, fact});
                return;
            }
            std::uint32_t best = 0;
            std::size_t best_cost = std::numeric_limits<std::size_t>::max();
            for (std::uint32_t j = 0; j < rule.body.size(); ++j) {
                if (!(mask & (1u << j))) continue;
                const RuleAtom& atom = rule.body[j];
                const std::size_t cost =
                    facts.match_count(opt(atom.subject), atom.relation, opt(atom.object));
                if (cost < best_cost) {
                    best_cost = cost;
                    best = j;
                }
            }
            const RuleAtom& atom = rule.body[best];
            const bool s_bound = binding.bound[atom.subject];
            const bool o_bound = binding.bound[atom.object];
            for (const Fact& f : facts.match(opt(atom.subject), atom.relation, opt(atom.object))) {
                if (!binding.assign(atom.subject, f.subject)) continue;
                if (!binding.assign(atom.object, f.object)) {
                    binding.retract(atom.subject, s_bound);
                    continue;
                }
                body_facts[best] = f;
                self(self, mask & ~(1u << best));
                binding.retract(atom.object, o_bound);
                binding.retract(atom.subject, s_bound);
            }
        };
        enumerate(enumerate, (1u << rule.body.size()) - 1);
    }

    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dub
