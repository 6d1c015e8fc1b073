#include "dub/genkb.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dub/errors.hpp"
#include "dub/rng.hpp"
#include "dub/rules.hpp"

namespace dub {

void GenConfig::validate() const {
    auto prob = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError(std::string(what) + " must be in [0, 1]");
    };
    if (person_target < 1) throw ValidationError("person_target must be >= 1");
    if (relation_fact_target < 0) throw ValidationError("relation_fact_target must be >= 0");
    if (bio_fact_target < 0) throw ValidationError("bio_fact_target must be >= 0");
    if (max_generations < 2) throw ValidationError("max_generations must be >= 2");
    prob(parent_probability, "parent_probability");
    prob(spouse_probability, "spouse_probability");
    prob(children_probability, "children_probability");
    prob(lastname_switch_probability, "lastname_switch_probability");
    prob(same_birthplace_probability, "same_birthplace_probability");
    if (!(children_geometric_p > 0.0 && children_geometric_p <= 1.0))
        throw ValidationError("children_geometric_p must be in (0, 1]");
    if (max_children < 1) throw ValidationError("max_children must be >= 1");
    if (couple_year_sd <= 0.0 || child_year_sd <= 0.0 || root_year_sd <= 0.0)
        throw ValidationError("year standard deviations must be positive");
    if (couple_year_min > couple_year_max)
        throw ValidationError("couple_year_min must not exceed couple_year_max");
    if (child_year_min < 1 || child_year_min > child_year_max)
        throw ValidationError("child year offsets must satisfy 1 <= min <= max");
    if (min_birth_year > max_birth_year)
        throw ValidationError("min_birth_year must not exceed max_birth_year");
    if (max_attempts < 1) throw ValidationError("max_attempts must be >= 1");
}

namespace {

// One growth attempt. Every couple decides its total children count (a
// truncated geometric draw) right when the couple forms, and people are added
// one at a time, so the run stops at person_target exactly; it can never
// overshoot. nullopt means the family died out too early — the caller retries
// with a fresh sub-seed. (Stopping mid-way censors at most the one couple
// active at the cutoff, which keeps the children-per-couple histogram clean.)
std::optional<FamilyGraph> grow_attempt(const GenConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    FamilyGraph g;

    auto add_person = [&](Gender gender, int generation) {
        Person p;
        p.id = static_cast<std::uint32_t>(g.persons.size());
        p.gender = gender;
        p.generation = generation;
        g.persons.push_back(std::move(p));
        return g.persons.back().id;
    };

    const std::size_t target = static_cast<std::size_t>(cfg.person_target);
    std::deque<std::uint32_t> frontier;
    add_person(bernoulli(rng, 0.5) ? Gender::female : Gender::male, 2);
    frontier.push_back(0);

    // Adds the couple's remaining children one by one; false = target hit.
    auto add_children = [&](std::uint32_t father, std::uint32_t mother, int fresh) {
        const int child_gen = g.persons[father].generation + 1;
        for (int c = 0; c < fresh; ++c) {
            if (g.persons.size() == target) return false;
            const std::uint32_t kid =
                add_person(bernoulli(rng, 0.5) ? Gender::female : Gender::male, child_gen);
            g.persons[kid].father = father;
            g.persons[kid].mother = mother;
            frontier.push_back(kid);
        }
        return g.persons.size() < target;
    };

    while (!frontier.empty() && g.persons.size() < target) {
        const std::uint32_t id = frontier.front();
        frontier.pop_front();

        // Parents arrive as a married couple or not at all (skipped when only
        // one slot is left, so the couple is never split).
        if (g.persons[id].generation > 1 && !g.persons[id].father &&
            g.persons.size() + 2 <= target && bernoulli(rng, cfg.parent_probability)) {
            const int pg = g.persons[id].generation - 1;
            const std::uint32_t f = add_person(Gender::male, pg);
            const std::uint32_t m = add_person(Gender::female, pg);
            g.persons[f].spouse = m;
            g.persons[m].spouse = f;
            g.persons[id].father = f;
            g.persons[id].mother = m;
            frontier.push_back(f);
            frontier.push_back(m);
            // The new couple already has one child, so no children gate; the
            // total still counts that child.
            const int total =
                truncated_geometric(rng, cfg.children_geometric_p, 1, cfg.max_children);
            if (!add_children(f, m, total - 1)) break;
            if (g.persons.size() == target) break;
        }

        if (!g.persons[id].spouse && g.persons.size() < target &&
            bernoulli(rng, cfg.spouse_probability)) {
            const Gender sg =
                g.persons[id].gender == Gender::male ? Gender::female : Gender::male;
            const std::uint32_t s = add_person(sg, g.persons[id].generation);
            g.persons[id].spouse = s;
            g.persons[s].spouse = id;
            frontier.push_back(s);
            if (g.persons.size() == target) break;
            // A fresh marriage is childless so far; gate, then draw the total.
            if (g.persons[id].generation + 1 <= cfg.max_generations &&
                bernoulli(rng, cfg.children_probability)) {
                const int total =
                    truncated_geometric(rng, cfg.children_geometric_p, 1, cfg.max_children);
                const std::uint32_t father = g.persons[id].gender == Gender::male ? id : s;
                const std::uint32_t mother = father == id ? s : id;
                if (!add_children(father, mother, total)) break;
            }
        }
    }

    if (g.persons.size() == target) return g;
    return std::nullopt;
}

// Phase offsets for deriving per-stage streams from the dataset seed. Graph
// attempts use counters 0..max_attempts-1, so these start well above.
constexpr std::uint64_t kNamePhase = 10001;
constexpr std::uint64_t kBioPhase = 10002;
constexpr std::uint64_t kSamplePhase = 10003;

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

FamilyGraph generate_family_graph(const GenConfig& config) {
    config.validate();
    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
        auto g = grow_attempt(config, mix_seed(config.seed, static_cast<std::uint64_t>(attempt)));
        if (g) return std::move(*g);
    }
    throw ValidationError("family graph: person_target " + std::to_string(config.person_target) +
                          " not reached in " + std::to_string(config.max_attempts) + " attempts");
}

void assign_names(FamilyGraph& graph, const GenConfig& config, const ResourcePools& pools) {
    if (pools.male_first.empty() || pools.female_first.empty() || pools.last.empty())
        throw ValidationError("name pools must not be empty");
    Rng rng(mix_seed(config.seed, kNamePhase));

    // Surnames follow the father line; family founders draw fresh ones.
    for (Person& p : graph.persons) p.last_name.clear();
    auto surname_of = [&](auto&& self, std::uint32_t id) -> const std::string& {
        Person& p = graph.persons[id];
        if (p.last_name.empty()) {
            if (p.father)
                p.last_name = self(self, *p.father);
            else
                p.last_name = pools.last[uniform_below(rng, pools.last.size())];
        }
        return p.last_name;
    };
    for (std::uint32_t id = 0; id < graph.size(); ++id) surname_of(surname_of, id);

    std::unordered_set<std::string> used;
    for (Person& p : graph.persons) {
        const auto& pool = p.gender == Gender::male ? pools.male_first : pools.female_first;
        bool ok = false;
        for (int tries = 0; tries < 1000 && !ok; ++tries) {
            p.first_name = pool[uniform_below(rng, pool.size())];
            ok = used.insert(p.full_name()).second;
        }
        if (!ok)
            throw ValidationError("name pools too small to keep " +
                                  std::to_string(graph.size()) + " full names unique");
    }

    // Some wives take the husband's surname, unless that would collide.
    for (Person& p : graph.persons) {
        if (p.gender != Gender::female || !p.spouse) continue;
        if (!bernoulli(rng, config.lastname_switch_probability)) continue;
        const std::string& his = graph.persons[*p.spouse].last_name;
        if (his == p.last_name) continue;
        std::string switched = p.first_name + " " + his;
        if (used.count(switched)) continue;
        used.insert(std::move(switched));
        p.last_name = his;
    }
}

std::vector<Fact> generate_biographies(FamilyGraph& graph, const GenConfig& config,
                                       SymbolTable& symbols, const ResourcePools& pools) {
    if (pools.state_names.empty() || pools.state_names.size() != pools.state_weights.size())
        throw ValidationError("state pool malformed");
    if (pools.job_decades.empty() || pools.job_decades.size() != pools.jobs_by_decade.size())
        throw ValidationError("job table malformed");
    Rng rng(mix_seed(config.seed, kBioPhase));

    std::vector<std::vector<std::uint32_t>> by_gen(
        static_cast<std::size_t>(config.max_generations) + 1);
    for (const Person& p : graph.persons)
        by_gen.at(static_cast<std::size_t>(p.generation)).push_back(p.id);

    auto clamp_year = [&](int y) {
        return std::clamp(y, config.min_birth_year, config.max_birth_year);
    };

    // Birth years generation by generation; within one generation, anchored
    // people first (own mother known, or family founder), then their spouses.
    std::vector<char> year_set(graph.size(), 0);
    for (const auto& gen_ids : by_gen) {
        for (std::uint32_t id : gen_ids) {
            Person& p = graph.persons[id];
            const bool spouse_anchored = p.spouse && graph.persons[*p.spouse].mother.has_value();
            if (p.mother) {
                const int off =
                    truncated_gaussian_int(rng, config.child_year_mean, config.child_year_sd,
                                           config.child_year_min, config.child_year_max);
                p.birth_year = clamp_year(graph.persons[*p.mother].birth_year + off);
            } else if (p.spouse && (spouse_anchored || p.gender == Gender::female)) {
                continue;  // follows the spouse in the second pass
            } else {
                const double mean = config.root_base_year +
                                    config.generation_year_gap * (p.generation - 1);
                p.birth_year = truncated_gaussian_int(rng, mean, config.root_year_sd,
                                                      config.min_birth_year, config.max_birth_year);
            }
            year_set[id] = 1;
        }
        for (std::uint32_t id : gen_ids) {
            if (year_set[id]) continue;
            Person& p = graph.persons[id];
            const Person& s = graph.persons[*p.spouse];
            const int off =
                truncated_gaussian_int(rng, config.couple_year_mean, config.couple_year_sd,
                                       config.couple_year_min, config.couple_year_max);
            // The offset is "wife minus husband", whichever side is anchored.
            p.birth_year = clamp_year(p.gender == Gender::female ? s.birth_year + off
                                                                 : s.birth_year - off);
            year_set[id] = 1;
        }
    }

    for (const auto& gen_ids : by_gen) {
        for (std::uint32_t id : gen_ids) {
            Person& p = graph.persons[id];
            if (p.father && bernoulli(rng, config.same_birthplace_probability))
                p.birthplace = graph.persons[*p.father].birthplace;
            else
                p.birthplace = pools.state_names[weighted_pick(rng, pools.state_weights)];
        }
    }

    for (const auto& gen_ids : by_gen) {
        for (std::uint32_t id : gen_ids) {
            Person& p = graph.persons[id];
            const auto& jobs = pools.jobs_for_year(p.birth_year);
            p.job = jobs[uniform_below(rng, jobs.size())];
        }
    }

    const Vocabulary vocab = Vocabulary::family_default();
    const RelationId r_year = vocab.require("birthyear");
    const RelationId r_place = vocab.require("birthplace");
    const RelationId r_job = vocab.require("job");

    std::vector<Fact> facts;
    facts.reserve(graph.size() * 3);
    for (const Person& p : graph.persons) {
        const ObjectId s = symbols.intern(p.full_name());
        facts.push_back(Fact{s, r_year, symbols.intern(std::to_string(p.birth_year))});
        facts.push_back(Fact{s, r_place, symbols.intern(p.birthplace)});
        facts.push_back(Fact{s, r_job, symbols.intern(p.job)});
    }
    return facts;
}

ClosedKB derive_ground_truth(const FamilyGraph& graph, SymbolTable& symbols) {
    const Vocabulary vocab = Vocabulary::family_default();
    std::vector<ObjectId> oid(graph.size());
    for (std::uint32_t i = 0; i < graph.size(); ++i)
        oid[i] = symbols.intern(graph.persons[i].full_name());

    // Kin components: connected under shared-parents and marriage links.
    // A person's siblings are the rest of their component (minus the spouse),
    // and a parent's children are the whole components of the biological
    // children — in-laws included on both counts.
    UnionFind uf(graph.size());
    std::map<std::uint32_t, std::uint32_t> first_child;
    for (const Person& p : graph.persons) {
        if (p.spouse) uf.unite(p.id, *p.spouse);
        if (p.father) {
            auto [it, fresh] = first_child.emplace(*p.father, p.id);
            if (!fresh) uf.unite(p.id, it->second);
        }
    }
    std::vector<std::vector<std::uint32_t>> comp_members(graph.size());
    for (const Person& p : graph.persons) comp_members[uf.find(p.id)].push_back(p.id);
    auto comp_of = [&](std::uint32_t id) -> const std::vector<std::uint32_t>& {
        return comp_members[uf.find(id)];
    };

    std::vector<std::vector<std::uint32_t>> bio_kids(graph.size());
    for (const Person& p : graph.persons) {
        if (p.father) {
            bio_kids[*p.father].push_back(p.id);
            bio_kids[*p.mother].push_back(p.id);
        }
    }

    const RelationId r_child = vocab.require("child"), r_father = vocab.require("father"),
                     r_mother = vocab.require("mother"), r_husband = vocab.require("husband"),
                     r_wife = vocab.require("wife"), r_brother = vocab.require("brother"),
                     r_sister = vocab.require("sister"), r_aunt = vocab.require("aunt"),
                     r_uncle = vocab.require("uncle"), r_nephew = vocab.require("nephew"),
                     r_niece = vocab.require("niece");

    std::vector<Fact> facts;
    auto add = [&](std::uint32_t s, RelationId r, std::uint32_t o) {
        facts.push_back(Fact{oid[s], r, oid[o]});
    };

    for (const Person& p : graph.persons) {
        const std::uint32_t a = p.id;
        if (p.father) add(a, r_father, *p.father);
        if (p.mother) add(a, r_mother, *p.mother);
        if (p.spouse) {
            const Person& s = graph.persons[*p.spouse];
            add(a, s.gender == Gender::male ? r_husband : r_wife, s.id);
        }
        for (std::uint32_t b : comp_of(a)) {
            if (b == a || (p.spouse && b == *p.spouse)) continue;
            add(a, graph.persons[b].gender == Gender::male ? r_brother : r_sister, b);
        }
        if (p.father) {
            for (std::uint32_t b : comp_of(*p.father)) {
                if (b == *p.father || b == *p.mother) continue;
                add(a, graph.persons[b].gender == Gender::male ? r_uncle : r_aunt, b);
                add(b, p.gender == Gender::male ? r_nephew : r_niece, a);
            }
        }
        std::set<std::uint32_t> kid_comps;
        for (std::uint32_t c : bio_kids[a]) kid_comps.insert(uf.find(c));
        for (std::uint32_t root : kid_comps)
            for (std::uint32_t b : comp_members[root]) add(a, r_child, b);
    }

    KnowledgeBase base(vocab, std::move(facts));
    ClosedKB closed = deductive_closure(base, default_rule_set());
    if (closed.closure.size() != base.size()) {
        for (const Fact& f : closed.closure.facts()) {
            if (base.contains(f)) continue;
            const Witness& w = closed.witnesses.at(f);
            std::string msg = "ground truth is not deductively closed: rule " +
                              format_rule(default_rule_set().rules[w.rule_index], vocab) +
                              " derives (" + symbols.name(f.subject) + ", " +
                              vocab.name(f.relation) + ", " + symbols.name(f.object) + ")";
            throw ValidationError(msg);
        }
    }
    return closed;
}

KnowledgeBase sample_knowledge_base(const ClosedKB& ground, const std::vector<Fact>& bios,
                                    const GenConfig& config) {
    const KnowledgeBase& truth = ground.closure;
    const Vocabulary& vocab = truth.vocabulary();
    Rng rng(mix_seed(config.seed, kSamplePhase));

    // Relative weights for how often each relation shows up in the sample;
    // parent/child links dominate, as they do in the ground truth itself.
    // Order matters below: parent links and marriages are the support
    // currency every other relation's derivations spend, so their waves run
    // first; each later wave then favours facts whose proofs are already in
    // the sample. The hold column keeps a little quota in reserve so a later
    // wave can still pull the specific converse or sibling facts it needs.
    struct RelationPlan {
        const char* name;
        std::int64_t weight;
        std::int64_t hold;
    };
    static constexpr RelationPlan kWeight[] = {
        {"father", 64, 0}, {"mother", 64, 0}, {"husband", 36, 0},
        {"wife", 36, 0},   {"brother", 28, 8}, {"sister", 28, 8},
        {"uncle", 28, 7},  {"aunt", 28, 7},    {"nephew", 14, 0},
        {"niece", 14, 0},  {"child", 76, 0},
    };
    constexpr std::size_t R = std::size(kWeight);

    std::int64_t wsum = 0;
    for (const RelationPlan& p : kWeight) wsum += p.weight;

    std::vector<RelationId> rel(R);
    std::vector<std::int64_t> quota(R), avail(R);
    for (std::size_t i = 0; i < R; ++i) {
        rel[i] = vocab.require(kWeight[i].name);
        avail[i] =
            static_cast<std::int64_t>(truth.match_count(std::nullopt, rel[i], std::nullopt));
    }

    // Ground-truth derivations, one entry per fact that some rule application
    // implies from other ground facts. A sampled fact stays re-derivable only
    // if the bodies of at least one such application are co-sampled, so the
    // picker below pulls support facts in with each anchor it takes.
    std::unordered_map<Fact, std::vector<std::vector<Fact>>, FactHash> supports;
    for (const Rule& rule : default_rule_set().rules) {
        std::array<ObjectId, 8> bind{};
        const RuleAtom& a0 = rule.body.at(0);
        auto emit = [&](const Fact& f0, const Fact* f1) {
            const Fact head{bind[rule.head.subject], rule.head.relation,
                            bind[rule.head.object]};
            if (!truth.contains(head)) return;
            std::vector<Fact> bodies{f0};
            if (f1) bodies.push_back(*f1);
            std::sort(bodies.begin(), bodies.end());
            bodies.erase(std::unique(bodies.begin(), bodies.end()), bodies.end());
            if (std::find(bodies.begin(), bodies.end(), head) != bodies.end()) return;
            supports[head].push_back(std::move(bodies));
        };
        for (const Fact& f0 : truth.match(std::nullopt, a0.relation, std::nullopt)) {
            if (a0.subject == a0.object && f0.subject != f0.object) continue;
            bind[a0.subject] = f0.subject;
            bind[a0.object] = f0.object;
            if (rule.body.size() == 1) {
                emit(f0, nullptr);
                continue;
            }
            const RuleAtom& a1 = rule.body.at(1);
            auto bound = [&](VarId v) { return v == a0.subject || v == a0.object; };
            const auto s1 = bound(a1.subject) ? std::optional(bind[a1.subject]) : std::nullopt;
            const auto o1 = bound(a1.object) ? std::optional(bind[a1.object]) : std::nullopt;
            for (const Fact& f1 : truth.match(s1, a1.relation, o1)) {
                if (a1.subject == a1.object && f1.subject != f1.object) continue;
                bind[a1.subject] = f1.subject;
                bind[a1.object] = f1.object;
                emit(f0, &f1);
            }
        }
    }
    for (auto& [head, bodies] : supports) {
        std::sort(bodies.begin(), bodies.end());
        bodies.erase(std::unique(bodies.begin(), bodies.end()), bodies.end());
    }
    std::unordered_map<Fact, std::vector<Fact>, FactHash> heads_by_body;
    for (const auto& [head, bodies] : supports)
        for (const auto& b : bodies)
            for (const Fact& f : b) heads_by_body[f].push_back(head);
    for (auto& [f, heads] : heads_by_body) {
        std::sort(heads.begin(), heads.end());
        heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
    }

    // Prefer to spend quota on facts with at least two distinct derivations:
    // below that a fact can never grow more than one unlearning cut, e.g. a
    // childless marriage whose only proof is its own reverse orientation.
    std::vector<std::int64_t> deep(R);
    for (std::size_t i = 0; i < R; ++i) {
        std::int64_t n = 0;
        for (const Fact& f : truth.match(std::nullopt, rel[i], std::nullopt)) {
            const auto it = supports.find(f);
            if (it != supports.end() && it->second.size() >= 2) ++n;
        }
        deep[i] = std::min(avail[i], std::max<std::int64_t>(n, 12));
    }

    // Largest-remainder apportionment of the target across relations.
    const std::int64_t T = config.relation_fact_target;
    {
        std::int64_t assigned = 0;
        std::vector<std::pair<std::int64_t, std::size_t>> frac;
        for (std::size_t i = 0; i < R; ++i) {
            quota[i] = T * kWeight[i].weight / wsum;
            assigned += quota[i];
            frac.emplace_back(-(T * kWeight[i].weight % wsum), i);
        }
        std::sort(frac.begin(), frac.end());
        for (std::int64_t k = 0; k < T - assigned; ++k) ++quota[frac[static_cast<std::size_t>(k)].second];
    }

    // Shortfalls flow to relations with room in proportion to that room.
    // Two rounds honour the depth ceiling; the final rounds fall back to raw
    // availability so oversized targets (up to the whole ground truth) fill.
    auto redistribute = [&](const std::vector<std::int64_t>& bound) {
        std::int64_t total = 0;
        for (std::size_t i = 0; i < R; ++i) {
            quota[i] = std::min(quota[i], bound[i]);
            total += quota[i];
        }
        std::int64_t spare_total = 0;
        for (std::size_t i = 0; i < R; ++i) spare_total += bound[i] - quota[i];
        const std::int64_t deficit = std::min(T - total, spare_total);
        if (deficit <= 0) return;
        std::vector<std::int64_t> add(R);
        std::int64_t placed = 0;
        std::vector<std::pair<std::int64_t, std::size_t>> frac;
        for (std::size_t i = 0; i < R; ++i) {
            const std::int64_t spare = bound[i] - quota[i];
            add[i] = deficit * spare / spare_total;
            placed += add[i];
            frac.emplace_back(-(deficit * spare % spare_total), i);
        }
        std::sort(frac.begin(), frac.end());
        for (auto [negrem, i] : frac) {
            if (placed >= deficit) break;
            if (quota[i] + add[i] < bound[i]) {
                ++add[i];
                ++placed;
            }
        }
        for (std::size_t i = 0; i < R; ++i) quota[i] += add[i];
    };
    redistribute(deep);
    redistribute(deep);
    redistribute(avail);
    redistribute(avail);

    // Shuffled per-relation candidate lists, richly supported facts first so
    // quota is spent on facts the sample can actually re-derive.
    std::unordered_map<RelationId, std::size_t> slot;
    for (std::size_t i = 0; i < R; ++i) slot[rel[i]] = i;
    std::vector<std::vector<Fact>> candidates(R);
    for (std::size_t i = 0; i < R; ++i) {
        candidates[i] = truth.match(std::nullopt, rel[i], std::nullopt);
        deterministic_shuffle(candidates[i], rng);
        auto richness = [&](const Fact& f) {
            const auto it = supports.find(f);
            return it == supports.end() ? std::size_t{0} : std::min<std::size_t>(it->second.size(), 3);
        };
        std::stable_sort(candidates[i].begin(), candidates[i].end(),
                         [&](const Fact& a, const Fact& b) { return richness(a) > richness(b); });
    }

    std::vector<std::vector<Fact>> chosen(R);
    std::vector<std::int64_t> count(R, 0);
    FactSet picked;
    std::unordered_map<Fact, int, FactHash> used_as_support;
    std::unordered_map<ObjectId, int> person_picks;
    std::deque<Fact> pending;
    auto add_fact = [&](const Fact& f) {
        const std::size_t i = slot[f.relation];
        picked.insert(f);
        chosen[i].push_back(f);
        ++count[i];
        ++person_picks[f.subject];
        ++person_picks[f.object];
        pending.push_back(f);
    };
    auto all_picked = [&](const std::vector<Fact>& fs) {
        return std::all_of(fs.begin(), fs.end(), [&](const Fact& f) { return picked.count(f); });
    };
    // Give each newly added fact up to four co-sampled derivations, as quota
    // room allows; support facts are themselves enqueued and grow clusters.
    auto drain = [&] {
        while (!pending.empty()) {
            const Fact f = pending.front();
            pending.pop_front();
            const auto it = supports.find(f);
            if (it == supports.end()) continue;
            int have = 0;
            for (const auto& bodies : it->second) {
                if (have >= 4) break;
                if (!all_picked(bodies)) continue;
                ++have;
                for (const Fact& b : bodies) ++used_as_support[b];
            }
            for (const auto& bodies : it->second) {
                if (have >= 4) break;
                if (all_picked(bodies)) continue;
                std::map<std::size_t, std::int64_t> need;
                for (const Fact& b : bodies)
                    if (!picked.count(b)) ++need[slot[b.relation]];
                const bool room = std::all_of(need.begin(), need.end(), [&](const auto& kv) {
                    return count[kv.first] + kv.second <= quota[kv.first];
                });
                if (!room) continue;
                for (const Fact& b : bodies)
                    if (!picked.count(b)) add_fact(b);
                for (const Fact& b : bodies) ++used_as_support[b];
                ++have;
            }
        }
    };
    // One relation at a time, in kWeight order. Each wave re-ranks its
    // remaining candidates so that facts whose support is already in the
    // sample come for free before any new quota is spent; drains along the
    // way pull body facts into the quota room of not-yet-run waves.
    auto rerank = [&](std::size_t i) {
        auto free_support = [&](const Fact& f) {
            const auto it = supports.find(f);
            if (it == supports.end()) return std::size_t{0};
            std::size_t n = 0;
            for (const auto& bodies : it->second)
                if (all_picked(bodies) && ++n == 2) break;
            return n;
        };
        // How many still-unpicked facts would gain a complete derivation if
        // this one joined the sample. Favouring such picks keeps later waves
        // supplied: a sibling pick feeds an uncle fact, which in turn is the
        // converse a nephew fact will need.
        auto usefulness = [&](const Fact& f) {
            const auto it = heads_by_body.find(f);
            if (it == heads_by_body.end()) return std::size_t{0};
            std::size_t n = 0;
            for (const Fact& head : it->second) {
                if (picked.count(head)) continue;
                for (const auto& bodies : supports.find(head)->second) {
                    if (std::find(bodies.begin(), bodies.end(), f) == bodies.end()) continue;
                    const bool rest = std::all_of(bodies.begin(), bodies.end(), [&](const Fact& b) {
                        return b == f || picked.count(b);
                    });
                    if (rest) {
                        ++n;
                        break;
                    }
                }
            }
            return n;
        };
        // Whether some derivation could still be completed for this fact with
        // the quota room other relations have left. Separates candidates a
        // drain can finish from ones that would just sit undeducible.
        auto viability = [&](const Fact& f) {
            const auto it = supports.find(f);
            if (it == supports.end()) return 0;
            for (const auto& bodies : it->second) {
                std::map<std::size_t, std::int64_t> need;
                for (const Fact& b : bodies)
                    if (!picked.count(b)) ++need[slot[b.relation]];
                const bool room = std::all_of(need.begin(), need.end(), [&](const auto& kv) {
                    return count[kv.first] + kv.second <= quota[kv.first];
                });
                if (room) return 1;
            }
            return 0;
        };
        // Secondary pull toward people who already carry sampled facts, so
        // broods land together and proofs stack instead of scattering.
        auto gravity = [&](const Fact& f) {
            const auto s = person_picks.find(f.subject);
            const auto o = person_picks.find(f.object);
            return (s == person_picks.end() ? 0 : s->second) +
                   (o == person_picks.end() ? 0 : o->second);
        };
        std::stable_sort(candidates[i].begin(), candidates[i].end(),
                         [&](const Fact& a, const Fact& b) {
                             const auto ka = std::tuple(free_support(a), viability(a),
                                                        usefulness(a), gravity(a));
                             const auto kb = std::tuple(free_support(b), viability(b),
                                                        usefulness(b), gravity(b));
                             return ka > kb;
                         });
    };
    auto fill_to = [&](std::size_t i, std::int64_t stop) {
        std::size_t cursor = 0;
        while (count[i] < stop) {
            while (cursor < candidates[i].size() && picked.count(candidates[i][cursor])) ++cursor;
            if (cursor == candidates[i].size()) break;
            add_fact(candidates[i][cursor++]);
            drain();
        }
    };
    for (std::size_t i = 0; i < R; ++i) {
        rerank(i);
        fill_to(i, quota[i] - kWeight[i].hold);
    }
    // Hand any unspent reserve back, again preferring supported picks.
    for (std::size_t i = 0; i < R; ++i) {
        if (count[i] >= quota[i]) continue;
        rerank(i);
        fill_to(i, quota[i]);
    }

    // Repair sweep: waves close relations in order, so support that arrives
    // with a later wave can strand an earlier pick without any co-sampled
    // derivation while an unpicked sibling candidate now has one ready.
    // Swapping those pairs costs no quota and only ever adds derivability.
    auto live_inst = [&](const Fact& f) {
        const auto it = supports.find(f);
        if (it == supports.end()) return false;
        for (const auto& bodies : it->second)
            if (all_picked(bodies)) return true;
        return false;
    };
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t i = 0; i < R; ++i) {
            std::size_t scan = 0;
            for (std::size_t ci = 0; ci < chosen[i].size(); ++ci) {
                const Fact victim = chosen[i][ci];
                if (used_as_support[victim] > 0 || live_inst(victim)) continue;
                for (; scan < candidates[i].size(); ++scan) {
                    const Fact& cand = candidates[i][scan];
                    if (picked.count(cand) || !live_inst(cand)) continue;
                    picked.erase(victim);
                    picked.insert(cand);
                    chosen[i][ci] = cand;
                    const auto it = supports.find(cand);
                    for (const auto& bodies : it->second) {
                        if (!all_picked(bodies)) continue;
                        for (const Fact& b : bodies) ++used_as_support[b];
                        break;
                    }
                    ++scan;
                    break;
                }
            }
        }
    }

    // Coverage floor: everyone who has kinship facts at all keeps at least
    // one in the sample, via swaps that prefer not to break support clusters
    // and cannot uncover anybody else.
    std::unordered_map<ObjectId, int> cover;
    auto bump = [&](const Fact& f, int d) {
        cover[f.subject] += d;
        cover[f.object] += d;
    };
    for (const auto& facts : chosen)
        for (const Fact& f : facts) bump(f, +1);

    std::set<ObjectId> persons;
    for (const Fact& f : truth.facts()) {
        persons.insert(f.subject);
        persons.insert(f.object);
    }
    for (ObjectId pid : persons) {
        if (cover[pid] > 0) continue;
        bool placed = false;
        // Earlier passes demand a derivable stand-in and an expendable
        // victim; later ones relax until somebody accepts the swap.
        for (int pass = 0; pass < 4 && !placed; ++pass) {
            for (std::size_t i = 0; i < R && !placed; ++i) {
                for (const Fact& cand : candidates[i]) {
                    if (placed) break;
                    if (picked.count(cand)) continue;
                    if (cand.subject != pid && cand.object != pid) continue;
                    if (pass < 2 && !live_inst(cand)) continue;
                    for (std::size_t ci = 0; ci < chosen[i].size(); ++ci) {
                        const Fact victim = chosen[i][ci];
                        if (cover[victim.subject] < 2 || cover[victim.object] < 2) continue;
                        if (pass % 2 == 0 && used_as_support[victim] > 0) continue;
                        bump(victim, -1);
                        picked.erase(victim);
                        picked.insert(cand);
                        chosen[i][ci] = cand;
                        bump(cand, +1);
                        placed = true;
                        break;
                    }
                }
            }
        }
    }

    std::vector<Fact> bio_pick = bios;
    if (static_cast<std::int64_t>(bio_pick.size()) > config.bio_fact_target) {
        deterministic_shuffle(bio_pick, rng);
        bio_pick.resize(static_cast<std::size_t>(config.bio_fact_target));
    }

    std::vector<Fact> out;
    for (const auto& facts : chosen) out.insert(out.end(), facts.begin(), facts.end());
    out.insert(out.end(), bio_pick.begin(), bio_pick.end());
    return KnowledgeBase(vocab, std::move(out));
}

QaPair render_qa(const Fact& fact, const SymbolTable& symbols, const Vocabulary& vocab) {
    const std::string& rel = vocab.name(fact.relation);
    const std::string& s = symbols.name(fact.subject);
    const std::string& o = symbols.name(fact.object);
    if (rel == "birthyear") return {"What is the birth year of " + s + "?", o};
    if (rel == "birthplace") return {"What is the birthplace of " + s + "?", o};
    if (rel == "job") return {"What is the job of " + s + "?", o};
    std::string cap = rel;
    cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
    return {"Who is " + o + " to " + s + "?", cap};
}

Dataset generate_dataset(const GenConfig& config, const ResourcePools& pools) {
    config.validate();
    Dataset d;
    d.config = config;
    d.graph = generate_family_graph(config);
    assign_names(d.graph, config, pools);
    d.ground = derive_ground_truth(d.graph, d.symbols);
    d.bios = generate_biographies(d.graph, config, d.symbols, pools);
    d.kb = sample_knowledge_base(d.ground, d.bios, config);
    return d;
}

}  // namespace dub
