#include <algorithm>
#include <doctest.h>

#include <dub/errors.hpp>
#include <dub/kb.hpp>
#include <dub/rng.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace dub;
using dub::testing::triple;

TEST_CASE("symbol table interns bijectively") {
    SymbolTable sym;
    const ObjectId a = sym.intern("Wyatt Ross");
    const ObjectId b = sym.intern("Xavier Ross");
    CHECK(a != b);
    CHECK(sym.intern("Wyatt Ross") == a);
    CHECK(sym.name(a) == "Wyatt Ross");
    CHECK(sym.find("Xavier Ross") == b);
    CHECK(!sym.find("nobody").has_value());
    CHECK(sym.size() == 2);
    CHECK_THROWS_AS(sym.name(99), ValidationError);
}

TEST_CASE("family vocabulary has the 14 relations") {
    const Vocabulary v = Vocabulary::family_default();
    CHECK(v.size() == 14);
    for (const char* name : {"father", "mother", "husband", "wife", "child", "brother", "sister",
                             "uncle", "aunt", "nephew", "niece", "birthyear", "birthplace", "job"})
        CHECK(v.find(name).has_value());
    CHECK(v.is_biography(v.require("birthyear")));
    CHECK(v.is_biography(v.require("job")));
    CHECK(!v.is_biography(v.require("child")));
    CHECK_THROWS_AS(v.require("cousin"), ValidationError);
    CHECK_THROWS_AS(Vocabulary({"father", "father"}), ValidationError);
}

TEST_CASE("knowledge base sorts, deduplicates and validates facts") {
    SymbolTable sym;
    const Vocabulary v = Vocabulary::family_default();
    const Fact fa = triple(sym, v, "Wyatt Ross", "father", "Xavier Ross");
    const Fact hu = triple(sym, v, "Camila Flores", "husband", "Xavier Ross");
    const KnowledgeBase kb(v, {fa, hu, fa});

    CHECK(kb.size() == 2);
    CHECK(std::is_sorted(kb.facts().begin(), kb.facts().end(),
                         [](const Fact& x, const Fact& y) {
                             return std::tuple(x.relation, x.subject, x.object) <
                                    std::tuple(y.relation, y.subject, y.object);
                         }));
    CHECK(kb.contains(fa));
    CHECK(!kb.contains(Fact{fa.subject, fa.relation, fa.subject}));
    CHECK_THROWS_AS(KnowledgeBase(v, {Fact{0, 99, 0}}), ValidationError);
}

TEST_CASE("match on the two-fact household") {
    SymbolTable sym;
    const Vocabulary v = Vocabulary::family_default();
    const Fact fa = triple(sym, v, "Wyatt Ross", "father", "Xavier Ross");
    const Fact hu = triple(sym, v, "Camila Flores", "husband", "Xavier Ross");
    const KnowledgeBase kb(v, {fa, hu});
    const ObjectId xavier = *sym.find("Xavier Ross");

    // Who has Xavier Ross as their father?
    CHECK(kb.match(std::nullopt, v.require("father"), xavier) == std::vector<Fact>{fa});
    CHECK(kb.match_count(std::nullopt, v.require("father"), xavier) == 1);
    CHECK(kb.match(fa.subject, v.require("father"), std::nullopt) == std::vector<Fact>{fa});
    CHECK(kb.match(fa.subject, v.require("father"), xavier) == std::vector<Fact>{fa});
    CHECK(kb.match(std::nullopt, v.require("mother"), std::nullopt).empty());
    CHECK(kb.match(xavier, v.require("father"), std::nullopt).empty());
}

TEST_CASE("match on an empty knowledge base returns nothing") {
    const Vocabulary v = Vocabulary::family_default();
    const KnowledgeBase kb(v);
    CHECK(kb.empty());
    CHECK(kb.match(std::nullopt, v.require("father"), std::nullopt).empty());
    CHECK(kb.match_count(std::nullopt, v.require("child"), std::nullopt) == 0);
}

TEST_CASE("match agrees with a linear scan on random instances") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto inst = oracle::random_instance(seed, 40, 3, 2);
        Rng rng(seed * 31 + 7);
        for (int q = 0; q < 20; ++q) {
            const RelationId rel =
                static_cast<RelationId>(uniform_below(rng, inst.kb.vocabulary().size()));
            std::optional<ObjectId> s, o;
            if (bernoulli(rng, 0.5)) s = static_cast<ObjectId>(uniform_below(rng, 12));
            if (bernoulli(rng, 0.5)) o = static_cast<ObjectId>(uniform_below(rng, 12));
            std::vector<Fact> expect;
            for (const Fact& f : inst.kb.facts())
                if (f.relation == rel && (!s || f.subject == *s) && (!o || f.object == *o))
                    expect.push_back(f);
            std::vector<Fact> got = inst.kb.match(s, rel, o);
            CHECK(got.size() == inst.kb.match_count(s, rel, o));
            std::sort(got.begin(), got.end());
            std::sort(expect.begin(), expect.end());
            REQUIRE(got == expect);
        }
    }
}

TEST_CASE("set difference identities") {
    SymbolTable sym;
    const Vocabulary v = Vocabulary::family_default();
    const Fact fa = triple(sym, v, "Wyatt Ross", "father", "Xavier Ross");
    const Fact hu = triple(sym, v, "Camila Flores", "husband", "Xavier Ross");
    const Fact ch = triple(sym, v, "Camila Flores", "child", "Wyatt Ross");
    const KnowledgeBase kb(v, {fa, hu, ch});

    CHECK(kb.without(std::vector<Fact>{}) == kb);
    CHECK(kb.without(kb.facts()).empty());
    CHECK(kb.without(std::vector<Fact>{fa}).size() == 2);
    CHECK(!kb.without(std::vector<Fact>{fa}).contains(fa));
    CHECK(kb.without(std::vector<Fact>{fa}).contains(hu));
    // Removing a non-member changes nothing.
    CHECK(kb.without(std::vector<Fact>{triple(sym, v, "Camila Flores", "wife", "Wyatt Ross")}) ==
          kb);
    CHECK(kb.with_facts({fa}) == kb);
    CHECK(kb.with_facts({triple(sym, v, "Xavier Ross", "wife", "Camila Flores")}).size() == 4);
}

TEST_CASE("difference size matches set algebra on random instances") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto inst = oracle::random_instance(seed, 40, 3, 2);
        Rng rng(seed);
        std::vector<Fact> removed;
        for (const Fact& f : inst.kb.facts())
            if (bernoulli(rng, 0.3)) removed.push_back(f);
        const KnowledgeBase rest = inst.kb.without(removed);
        CHECK(rest.size() == inst.kb.size() - removed.size());
        for (const Fact& f : removed) CHECK(!rest.contains(f));
        for (const Fact& f : rest.facts()) CHECK(inst.kb.contains(f));
    }
}
