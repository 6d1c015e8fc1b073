#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dub/deduction.hpp"
#include "dub/kb.hpp"

namespace dub {

enum class Gender : std::uint8_t { male, female };

struct Person {
    std::uint32_t id{};
    Gender gender{Gender::male};
    int generation{};  // 1 (oldest) .. max_generations
    std::optional<std::uint32_t> father, mother, spouse;
    std::string first_name, last_name;
    int birth_year{};
    std::string birthplace;
    std::string job;

    std::string full_name() const { return first_name + " " + last_name; }
};

// Family network. Structural guarantees the rule set relies on: marriages
// are monogamous and heteronormative, parents are added only as married
// couples, children belong to exactly one couple, and every spouse/parent is
// a fresh person (so marriage never links two existing family members).
struct FamilyGraph {
    std::vector<Person> persons;

    const Person& at(std::uint32_t id) const { return persons.at(id); }
    std::size_t size() const { return persons.size(); }
};

struct GenConfig {
    std::uint64_t seed = 7;

    int person_target = 100;
    int relation_fact_target = 400;
    int bio_fact_target = 300;
    int max_generations = 4;

    double parent_probability = 0.7;
    double spouse_probability = 0.8;
    double children_probability = 0.9;
    double children_geometric_p = 0.45;  // total children per couple ~ geometric on {1..4}
    int max_children = 4;

    double lastname_switch_probability = 0.1;
    double same_birthplace_probability = 0.85;

    // Couple age gap: wife = husband + offset years, offset ~ N(2, 3) on [-10, 10].
    double couple_year_mean = 2.0, couple_year_sd = 3.0;
    int couple_year_min = -10, couple_year_max = 10;
    // Child offset from the mother ~ N(25, 4) on [18, 40].
    double child_year_mean = 25.0, child_year_sd = 4.0;
    int child_year_min = 18, child_year_max = 40;
    // Birth year of persons with no parent/spouse anchor, by generation.
    int root_base_year = 1905;
    int generation_year_gap = 27;
    double root_year_sd = 6.0;
    int min_birth_year = 1890, max_birth_year = 2000;

    int max_attempts = 500;  // graph-shape retries before "target unreachable"

    void validate() const;
};

// Name/state/job pools. Defaults are compiled in; set DUB_DATA_DIR to load
// first_names_male.txt, first_names_female.txt, last_names.txt, states.tsv
// (name<TAB>weight) and jobs.tsv (decade<TAB>job) from a directory instead.
struct ResourcePools {
    std::vector<std::string> male_first, female_first, last;
    std::vector<std::string> state_names;
    std::vector<double> state_weights;
    std::vector<int> job_decades;                       // 1900, 1910, ... 2020
    std::vector<std::vector<std::string>> jobs_by_decade;

    static const ResourcePools& standard();  // honors DUB_DATA_DIR, cached
    const std::vector<std::string>& jobs_for_year(int year) const;
};

// Structure, genders and generations only; names/bios come later. Hits
// person_target exactly (growth is one person at a time, so a run never
// overshoots; attempts whose family dies out early are retried with fresh
// sub-seeds, and ValidationError is thrown once max_attempts is exhausted).
FamilyGraph generate_family_graph(const GenConfig& config);

// Unique full names; surnames follow the father, wives switch to the
// husband's surname with the configured probability (skipped if the switch
// would collide). Throws on pool exhaustion.
void assign_names(FamilyGraph& graph, const GenConfig& config,
                  const ResourcePools& pools = ResourcePools::standard());

// Fills birth_year/birthplace/job and returns the biography facts
// (birthyear, birthplace, job for every person), interning literals.
std::vector<Fact> generate_biographies(FamilyGraph& graph, const GenConfig& config,
                                       SymbolTable& symbols,
                                       const ResourcePools& pools = ResourcePools::standard());

// The 48-rule family rule set (as DSL text / parsed).
const std::string& default_rule_text();
const RuleSet& default_rule_set();

// All true kinship facts over the 11 family relations, computed directly
// from the graph, then checked to be a fixpoint of default_rule_set() — a
// tripwire that throws ValidationError naming an offending derivation if the
// definitions and rules ever disagree.
ClosedKB derive_ground_truth(const FamilyGraph& graph, SymbolTable& symbols);

// relation_fact_target kinship facts (per-relation quotas weighted toward
// child/father/mother, per-person coverage floor) plus bio_fact_target
// biography facts, as one KB.
KnowledgeBase sample_knowledge_base(const ClosedKB& ground, const std::vector<Fact>& bios,
                                    const GenConfig& config);

struct QaPair {
    std::string question, answer;
};

// "Who is {o} to {s}?" for kinship facts; "What is the birth year /
// birthplace / job of {s}?" for biography facts.
QaPair render_qa(const Fact& fact, const SymbolTable& symbols, const Vocabulary& vocab);

struct Dataset {
    GenConfig config;
    FamilyGraph graph;
    SymbolTable symbols;
    ClosedKB ground;           // closed kinship ground truth
    std::vector<Fact> bios;
    KnowledgeBase kb;          // the sampled 400+300 facts
};

Dataset generate_dataset(const GenConfig& config,
                         const ResourcePools& pools = ResourcePools::standard());

}  // namespace dub
