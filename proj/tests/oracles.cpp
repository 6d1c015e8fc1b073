#include "oracles.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include <dub/errors.hpp>
#include <dub/rng.hpp>

namespace dub::oracle {

namespace {

// Extends `binding` so that `atom` matches `fact`; false on clash.
bool unify(const RuleAtom& atom, const Fact& fact, std::vector<std::optional<ObjectId>>& binding) {
    if (atom.relation != fact.relation) return false;
    const auto bind = [&](VarId v, ObjectId value) {
        if (binding[v] && *binding[v] != value) return false;
        binding[v] = value;
        return true;
    };
    const auto saved = binding;
    if (bind(atom.subject, fact.subject) && bind(atom.object, fact.object)) return true;
    binding = saved;
    return false;
}

// All head instances of `rule` derivable from `facts`, via backtracking over
// body atoms left to right (no indexes, just a full scan per atom).
void rule_heads(const Rule& rule, const std::vector<Fact>& facts, std::set<Fact>& out) {
    std::vector<std::optional<ObjectId>> binding(rule.var_count);
    auto descend = [&](auto&& self, std::size_t atom_idx) -> void {
        if (atom_idx == rule.body.size()) {
            out.insert(Fact{*binding[rule.head.subject], rule.head.relation,
                            *binding[rule.head.object]});
            return;
        }
        for (const Fact& f : facts) {
            const auto saved = binding;
            if (unify(rule.body[atom_idx], f, binding)) self(self, atom_idx + 1);
            binding = saved;
        }
    };
    descend(descend, 0);
}

}  // namespace

std::set<Fact> naive_closure(const std::vector<Fact>& base, const RuleSet& rules) {
    std::set<Fact> closure(base.begin(), base.end());
    for (;;) {
        const std::vector<Fact> snapshot(closure.begin(), closure.end());
        std::set<Fact> heads;
        for (const Rule& rule : rules.rules) rule_heads(rule, snapshot, heads);
        const std::size_t before = closure.size();
        closure.insert(heads.begin(), heads.end());
        if (closure.size() == before) return closure;
    }
}

bool naive_deducible(const Fact& fact, const std::vector<Fact>& base, const RuleSet& rules) {
    return naive_closure(base, rules).count(fact) != 0;
}

std::vector<Instantiation> naive_implying(const Fact& fact, const std::vector<Fact>& universe,
                                          const RuleSet& rules) {
    std::set<ObjectId> objects;
    for (const Fact& f : universe) {
        objects.insert(f.subject);
        objects.insert(f.object);
    }
    const std::vector<ObjectId> pool(objects.begin(), objects.end());
    const std::set<Fact> facts(universe.begin(), universe.end());

    std::vector<Instantiation> result;
    for (std::uint32_t ri = 0; ri < rules.rules.size(); ++ri) {
        const Rule& rule = rules.rules[ri];
        std::vector<ObjectId> assign(rule.var_count);
        auto descend = [&](auto&& self, std::size_t var) -> void {
            if (var == rule.var_count) {
                Instantiation inst{ri, {}, Fact{assign[rule.head.subject], rule.head.relation,
                                               assign[rule.head.object]}};
                if (inst.head != fact) return;
                for (const RuleAtom& atom : rule.body) {
                    const Fact body_fact{assign[atom.subject], atom.relation, assign[atom.object]};
                    if (!facts.count(body_fact)) return;
                    inst.body.push_back(body_fact);
                }
                result.push_back(std::move(inst));
                return;
            }
            for (ObjectId obj : pool) {
                assign[var] = obj;
                self(self, var + 1);
            }
        };
        descend(descend, 0);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<std::vector<Fact>> all_minimal_sets(const Fact& target, const KnowledgeBase& kb,
                                                const RuleSet& rules) {
    const std::vector<Fact>& facts = kb.facts();
    const std::size_t n = facts.size();
    if (n > 20) throw ValidationError("all_minimal_sets: kb too large for subset scan");

    std::vector<char> blocking(std::size_t{1} << n, 0);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        std::vector<Fact> remaining;
        for (std::size_t i = 0; i < n; ++i)
            if (!(mask >> i & 1)) remaining.push_back(facts[i]);
        blocking[mask] = !naive_deducible(target, remaining, rules);
    }

    std::vector<std::vector<Fact>> minimal;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        if (!blocking[mask]) continue;
        bool is_minimal = true;
        for (std::size_t i = 0; i < n && is_minimal; ++i)
            if ((mask >> i & 1) && blocking[mask & ~(std::uint32_t{1} << i)]) is_minimal = false;
        if (!is_minimal) continue;
        std::vector<Fact> members;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) members.push_back(facts[i]);
        std::sort(members.begin(), members.end());
        minimal.push_back(std::move(members));
    }
    std::sort(minimal.begin(), minimal.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return minimal;
}

std::vector<Fact> kinship_facts(const FamilyGraph& graph, SymbolTable& symbols,
                                const Vocabulary& vocab) {
    const std::size_t n = graph.size();
    std::vector<ObjectId> oid(n);
    for (std::size_t i = 0; i < n; ++i) oid[i] = symbols.intern(graph.persons[i].full_name());

    const auto share_parent = [&](const Person& a, const Person& b) {
        return (a.father && b.father && *a.father == *b.father) ||
               (a.mother && b.mother && *a.mother == *b.mother);
    };
    // Sibling group of x: reachable via shared-parent and marriage edges.
    const auto group_of = [&](std::uint32_t x) {
        std::set<std::uint32_t> seen{x};
        std::vector<std::uint32_t> queue{x};
        while (!queue.empty()) {
            const Person& cur = graph.at(queue.back());
            queue.pop_back();
            for (const Person& other : graph.persons) {
                if (seen.count(other.id)) continue;
                if (share_parent(cur, other) || (cur.spouse && *cur.spouse == other.id)) {
                    seen.insert(other.id);
                    queue.push_back(other.id);
                }
            }
        }
        return seen;
    };

    std::vector<std::set<std::uint32_t>> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = group_of(static_cast<std::uint32_t>(i));

    const RelationId r_father = vocab.require("father"), r_mother = vocab.require("mother"),
                     r_husband = vocab.require("husband"), r_wife = vocab.require("wife"),
                     r_child = vocab.require("child"), r_brother = vocab.require("brother"),
                     r_sister = vocab.require("sister"), r_uncle = vocab.require("uncle"),
                     r_aunt = vocab.require("aunt"), r_nephew = vocab.require("nephew"),
                     r_niece = vocab.require("niece");

    std::set<Fact> out;
    for (const Person& a : graph.persons) {
        if (a.father) out.insert({oid[a.id], r_father, oid[*a.father]});
        if (a.mother) out.insert({oid[a.id], r_mother, oid[*a.mother]});
        if (a.spouse) {
            const Person& sp = graph.at(*a.spouse);
            out.insert({oid[a.id], sp.gender == Gender::male ? r_husband : r_wife, oid[sp.id]});
        }
        for (std::uint32_t s : group[a.id]) {
            if (s == a.id || (a.spouse && *a.spouse == s)) continue;
            const bool male = graph.at(s).gender == Gender::male;
            out.insert({oid[a.id], male ? r_brother : r_sister, oid[s]});
        }
        // Children: own biological children plus everyone in their groups
        // (their siblings' spouses marry into the family).
        for (const Person& c : graph.persons) {
            if (!((c.father && *c.father == a.id) || (c.mother && *c.mother == a.id))) continue;
            for (std::uint32_t k : group[c.id]) out.insert({oid[a.id], r_child, oid[k]});
        }
        if (a.father) {
            for (std::uint32_t u : group[*a.father]) {
                if (u == *a.father || (a.mother && u == *a.mother)) continue;
                const bool male = graph.at(u).gender == Gender::male;
                out.insert({oid[a.id], male ? r_uncle : r_aunt, oid[u]});
            }
        }
        // Nephews and nieces of a: every b whose parent's group contains a.
        for (const Person& b : graph.persons) {
            if (!b.father) continue;
            if (!group[*b.father].count(a.id)) continue;
            if (a.id == *b.father || (b.mother && a.id == *b.mother)) continue;
            out.insert({oid[a.id], b.gender == Gender::male ? r_nephew : r_niece, oid[b.id]});
        }
    }
    return {out.begin(), out.end()};
}

RandomInstance random_instance(std::uint64_t seed, int max_facts, int max_rules, int max_body) {
    Rng rng(seed);
    const int n_obj = 3 + static_cast<int>(uniform_below(rng, 8));  // 3..10
    const int n_rel = 2 + static_cast<int>(uniform_below(rng, 7));  // 2..8

    std::vector<std::string> rel_names;
    for (int r = 0; r < n_rel; ++r) rel_names.push_back("r" + std::to_string(r));
    const Vocabulary vocab(rel_names);

    const int capacity = n_obj * n_obj * n_rel;
    const int n_facts = std::min(
        capacity, 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_facts))));
    std::set<Fact> drawn;
    while (static_cast<int>(drawn.size()) < n_facts) {
        drawn.insert(Fact{static_cast<ObjectId>(uniform_below(rng, n_obj)),
                          static_cast<RelationId>(uniform_below(rng, n_rel)),
                          static_cast<ObjectId>(uniform_below(rng, n_obj))});
    }
    KnowledgeBase kb(vocab, {drawn.begin(), drawn.end()});

    const auto rel_of = [&](std::uint64_t i) { return rel_names[i]; };
    RuleSet rules{vocab, {}};
    const int n_rules = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_rules)));
    for (int attempt = 0; attempt < 200 && static_cast<int>(rules.rules.size()) < n_rules;
         ++attempt) {
        const int body_len = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_body)));
        const int n_vars = 1 + static_cast<int>(uniform_below(rng, 2 * body_len));
        std::string text;
        std::vector<char> used(static_cast<std::size_t>(n_vars), 0);
        for (int b = 0; b < body_len; ++b) {
            const int vs = static_cast<int>(uniform_below(rng, n_vars));
            const int vo = static_cast<int>(uniform_below(rng, n_vars));
            used[vs] = used[vo] = 1;
            if (b) text += " & ";
            text += "(V" + std::to_string(vs) + ", " + rel_of(uniform_below(rng, n_rel)) + ", V" +
                    std::to_string(vo) + ")";
        }
        std::vector<int> usable;
        for (int v = 0; v < n_vars; ++v)
            if (used[v]) usable.push_back(v);
        const int hs = usable[uniform_below(rng, usable.size())];
        const int ho = usable[uniform_below(rng, usable.size())];
        text += " -> (V" + std::to_string(hs) + ", " + rel_of(uniform_below(rng, n_rel)) + ", V" +
                std::to_string(ho) + ")";
        const Rule rule = parse_rule(text, vocab);
        if (std::find(rules.rules.begin(), rules.rules.end(), rule) == rules.rules.end())
            rules.rules.push_back(rule);
    }

    const Fact target = kb.facts()[uniform_below(rng, kb.size())];
    return {std::move(kb), std::move(rules), target};
}

double chi_square(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs) {
    double total = 0.0, norm = 0.0;
    for (std::uint64_t c : observed) total += static_cast<double>(c);
    for (double p : probs) norm += p;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = total * probs[i] / norm;
        const double d = static_cast<double>(observed[i]) - expected;
        stat += d * d / expected;
    }
    return stat;
}

}  // namespace dub::oracle
