#include <algorithm>
#include <doctest.h>

#include <dub/errors.hpp>
#include <dub/genkb.hpp>
#include <dub/metrics.hpp>
#include <dub/rng.hpp>
#include <dub/unlearn.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace dub;
using dub::testing::triple;

namespace {

struct Triangle {
    SymbolTable sym;
    Vocabulary vocab = Vocabulary::family_default();
    Fact child_fact, father_fact, husband_fact;
    KnowledgeBase kb;
    RuleSet rules;
    MinimalSetCollection collection;

    Triangle() {
        child_fact = triple(sym, vocab, "Camila Flores", "child", "Wyatt Ross");
        father_fact = triple(sym, vocab, "Wyatt Ross", "father", "Xavier Ross");
        husband_fact = triple(sym, vocab, "Camila Flores", "husband", "Xavier Ross");
        kb = KnowledgeBase(vocab, {child_fact, father_fact, husband_fact});
        rules = RuleSet{vocab,
                        {parse_rule("(X, husband, Z) & (Y, father, Z) -> (X, child, Y)", vocab)}};
        collection = mdus(child_fact, kb, rules, 50, 1);
    }
};

}  // namespace

TEST_CASE("decimal ratios parse exactly") {
    CHECK(parse_decimal_ratio("0.8") == Ratio{4, 5});
    CHECK(parse_decimal_ratio("0.825") == Ratio{33, 40});
    CHECK(parse_decimal_ratio("1") == Ratio{1, 1});
    CHECK(parse_decimal_ratio("1.0") == Ratio{1, 1});
    CHECK(parse_decimal_ratio("0") == Ratio{0, 1});
    CHECK(parse_decimal_ratio(".5") == Ratio{1, 2});
    CHECK(parse_decimal_ratio("0.123456789") == Ratio{123456789, 1000000000});
    CHECK_THROWS_AS(parse_decimal_ratio("1.2"), ValidationError);
    CHECK_THROWS_AS(parse_decimal_ratio("2"), ValidationError);
    CHECK_THROWS_AS(parse_decimal_ratio("-0.1"), ValidationError);
    CHECK_THROWS_AS(parse_decimal_ratio("abc"), ValidationError);
    CHECK_THROWS_AS(parse_decimal_ratio(""), ValidationError);
    CHECK_THROWS_AS(parse_decimal_ratio("0.1234567890"), ValidationError);
}

TEST_CASE("ratio comparisons are exact cross-multiplications") {
    CHECK(Ratio{1, 3} < Ratio{334, 1000});
    CHECK(Ratio{2, 3} > Ratio{666, 1000});
    CHECK(Ratio{2, 4} == Ratio{1, 2});
    CHECK(Ratio{699, 699} == Ratio{1, 1});
    CHECK(Ratio{0, 5} == Ratio{0, 7});
}

TEST_CASE("recall over the triangle collection") {
    Triangle t;
    REQUIRE(t.collection.sets.size() == 2);

    const RecallResult full = recall({t.child_fact, t.father_fact}, t.collection);
    CHECK(full.value == Ratio{1, 1});
    CHECK(full.argmax.members == dub::testing::sorted({t.child_fact, t.father_fact}));
    CHECK(full.value.den == 2);  // denominator is |U*|

    const RecallResult half = recall({t.father_fact}, t.collection);
    CHECK(half.value == Ratio{1, 2});

    const RecallResult none = recall({}, t.collection);
    CHECK(none.value == Ratio{0, 2});
    // Ties resolve to the first set in canonical (size, lexicographic) order.
    CHECK(none.argmax == t.collection.sets.front());

    const RecallResult target_hit = recall({t.child_fact}, t.collection);
    CHECK(target_hit.value == Ratio{1, 2});
    CHECK(target_hit.argmax == t.collection.sets.front());

    CHECK_THROWS_AS(recall({}, MinimalSetCollection{}), ValidationError);
}

TEST_CASE("accuracy over the triangle") {
    Triangle t;
    const MinimalSet star{t.child_fact,
                          dub::testing::sorted({t.child_fact, t.father_fact})};
    // Retain set is just the husband fact.
    CHECK(accuracy({t.child_fact, t.father_fact}, star, t.kb) == Ratio{1, 1});
    CHECK(accuracy(t.kb.facts(), star, t.kb) == Ratio{0, 1});  // everything removed
    CHECK(accuracy({}, star, t.kb) == Ratio{1, 1});
    CHECK(accuracy({t.husband_fact}, star, t.kb) == Ratio{0, 1});
}

TEST_CASE("restricted accuracy splits relation and biography facts") {
    SymbolTable sym;
    const Vocabulary v = Vocabulary::family_default();
    const Fact kin = triple(sym, v, "Sloane Lee", "mother", "Nora Lee");
    const Fact year = triple(sym, v, "Sloane Lee", "birthyear", "1908");
    const Fact place = triple(sym, v, "Sloane Lee", "birthplace", "Washington state");
    const Fact target = triple(sym, v, "Sloane Lee", "child", "Maya Lee");
    const KnowledgeBase kb(v, {kin, year, place, target});
    const MinimalSet star{target, {target}};

    const auto rel_acc = accuracy_where({year}, star, kb,
                                        [&](RelationId r) { return !v.is_biography(r); });
    REQUIRE(rel_acc.has_value());
    CHECK(*rel_acc == Ratio{1, 1});

    const auto bio_acc = accuracy_where({year}, star, kb,
                                        [&](RelationId r) { return v.is_biography(r); });
    REQUIRE(bio_acc.has_value());
    CHECK(*bio_acc == Ratio{1, 2});

    // No biography facts at all: restricted retain set is empty.
    const KnowledgeBase kin_only(v, {kin, target});
    CHECK(!accuracy_where({}, star, kin_only, [&](RelationId r) { return v.is_biography(r); })
               .has_value());
}

TEST_CASE("a sweep whose single point removes one minimal set scores perfectly") {
    Triangle t;
    UnlearnSubmission sub;
    sub.target = t.child_fact;
    sub.points.push_back(SweepPoint{"T=1", dub::testing::sorted({t.child_fact, t.father_fact})});
    const SweepReport rep = evaluate_sweep(sub, t.kb, t.collection);
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].recall_value == Ratio{1, 1});
    CHECK(rep.points[0].accuracy_value == Ratio{1, 1});
    CHECK(rep.points[0].superficially_unlearned);
    REQUIRE(rep.acc_at_recall.has_value());
    REQUIRE(rep.recall_at_acc.has_value());
    REQUIRE(rep.acc_at_superficial.has_value());
    CHECK(*rep.acc_at_recall == Ratio{1, 1});
    CHECK(*rep.recall_at_acc == Ratio{1, 1});
    CHECK(*rep.acc_at_superficial == Ratio{1, 1});
}

TEST_CASE("threshold metrics are absent when no point qualifies") {
    Triangle t;
    UnlearnSubmission sub;
    sub.target = t.child_fact;
    // Removing only the husband fact reaches recall 1/2 < 4/5 and leaves the
    // target in place.
    sub.points.push_back(SweepPoint{"T=1", {t.husband_fact}});
    const SweepReport rep = evaluate_sweep(sub, t.kb, t.collection);
    CHECK(!rep.acc_at_recall.has_value());
    CHECK(rep.recall_at_acc.has_value());  // accuracy 1/1 >= 4/5
    CHECK(!rep.acc_at_superficial.has_value());
    CHECK(!rep.points[0].superficially_unlearned);

    // Absent metrics aggregate as zero and are flagged.
    const BenchmarkReport agg = aggregate({rep});
    CHECK(agg.acc_at_recall.mean == doctest::Approx(0.0));
    CHECK(agg.acc_at_recall.imputed == 1);
    CHECK(agg.recall_at_acc.imputed == 0);
}

TEST_CASE("sweep points pick the best-covered set and the best qualifying point wins") {
    Triangle t;
    UnlearnSubmission sub;
    sub.target = t.child_fact;
    sub.points.push_back(SweepPoint{"T=1", {t.child_fact}});                       // recall 1/2
    sub.points.push_back(SweepPoint{"T=2", dub::testing::sorted(t.kb.facts())});   // recall 1, acc 0
    sub.points.push_back(
        SweepPoint{"T=3", dub::testing::sorted({t.child_fact, t.husband_fact})});  // recall 1, acc 1
    const SweepReport rep = evaluate_sweep(sub, t.kb, t.collection);
    REQUIRE(rep.acc_at_recall.has_value());
    CHECK(*rep.acc_at_recall == Ratio{1, 1});  // best accuracy among recall >= 0.8
    REQUIRE(rep.recall_at_acc.has_value());
    CHECK(*rep.recall_at_acc == Ratio{1, 1});
    REQUIRE(rep.acc_at_superficial.has_value());
    CHECK(*rep.acc_at_superficial == Ratio{1, 1});
    CHECK(rep.threshold == Ratio{4, 5});
}

TEST_CASE("sweeps validate their inputs") {
    Triangle t;
    UnlearnSubmission sub;
    sub.target = t.father_fact;  // not the collection's target
    sub.points.push_back(SweepPoint{"T=1", {t.father_fact}});
    CHECK_THROWS_AS(evaluate_sweep(sub, t.kb, t.collection), ValidationError);
}

TEST_CASE("aggregate means and population deviations are exact") {
    Triangle t;
    auto point_report = [&](Ratio acc) {
        SweepReport r;
        r.target = t.child_fact;
        r.acc_at_recall = acc;
        r.recall_at_acc = acc;
        return r;
    };
    const BenchmarkReport two = aggregate({point_report(Ratio{3, 5}), point_report(Ratio{4, 5})});
    CHECK(two.acc_at_recall.mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(two.acc_at_recall.std_dev == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(two.acc_at_recall.imputed == 0);

    const BenchmarkReport one = aggregate({point_report(Ratio{3, 5})});
    CHECK(one.acc_at_recall.std_dev == doctest::Approx(0.0));

    CHECK_THROWS_AS(aggregate({}), ValidationError);
    SweepReport other = point_report(Ratio{1, 2});
    other.threshold = Ratio{1, 2};
    CHECK_THROWS_AS(aggregate({point_report(Ratio{1, 2}), other}), ValidationError);
}

TEST_CASE("aggregate curves average per label in first-encounter order") {
    Triangle t;
    SweepReport a;
    a.target = t.child_fact;
    PointReport p1;
    p1.label = "T=1";
    p1.recall_value = Ratio{1, 2};
    p1.accuracy_value = Ratio{1, 1};
    PointReport p2 = p1;
    p2.label = "T=2";
    p2.recall_value = Ratio{1, 1};
    p2.accuracy_value = Ratio{1, 2};
    a.points = {p1, p2};
    SweepReport b = a;
    b.points[0].accuracy_value = Ratio{0, 1};

    const BenchmarkReport agg = aggregate({a, b});
    REQUIRE(agg.curve.size() == 2);
    CHECK(agg.curve[0].label == "T=1");
    CHECK(agg.curve[0].mean_accuracy == doctest::Approx(0.5));
    CHECK(agg.curve[0].mean_recall == doctest::Approx(0.5));
    CHECK(agg.curve[1].label == "T=2");
    CHECK(agg.curve[1].mean_accuracy == doctest::Approx(0.5));
}

TEST_CASE("the oracle reference unlearner is a perfect point") {
    Triangle t;
    const UnlearnSubmission sub = reference_unlearner(ReferenceUnlearner::oracle_minimal,
                                                      t.child_fact, t.kb, t.collection, 0.0, 5);
    REQUIRE(sub.points.size() == 1);
    CHECK(sub.points[0].label == "oracle");
    const SweepReport rep = evaluate_sweep(sub, t.kb, t.collection);
    CHECK(*rep.acc_at_recall == Ratio{1, 1});
    CHECK(*rep.recall_at_acc == Ratio{1, 1});
    CHECK(*rep.acc_at_superficial == Ratio{1, 1});
}

TEST_CASE("the target-only reference reaches recall one over the smallest set size") {
    Triangle t;
    const UnlearnSubmission sub = reference_unlearner(ReferenceUnlearner::target_only,
                                                      t.child_fact, t.kb, t.collection, 0.0, 5);
    REQUIRE(sub.points.size() == 1);
    CHECK(sub.points[0].label == "target-only");
    CHECK(sub.points[0].removed == std::vector<Fact>{t.child_fact});
    const SweepReport rep = evaluate_sweep(sub, t.kb, t.collection);
    REQUIRE(rep.points.size() == 1);
    // Smallest minimal set here has two members.
    CHECK(rep.points[0].recall_value == Ratio{1, 2});
    CHECK(rep.points[0].accuracy_value == Ratio{1, 1});
    CHECK(rep.points[0].superficially_unlearned);
}

TEST_CASE("the overshooting reference removes a superset of one minimal set") {
    Triangle t;
    const UnlearnSubmission sub = reference_unlearner(ReferenceUnlearner::random_over,
                                                      t.child_fact, t.kb, t.collection, 1.0, 5);
    REQUIRE(sub.points.size() == 1);
    CHECK(sub.points[0].label == "p=1.00");
    CHECK(sub.points[0].removed == dub::testing::sorted(t.kb.facts()));  // p=1 takes everything
    CHECK_THROWS_AS(reference_unlearner(ReferenceUnlearner::random_over, t.child_fact, t.kb,
                                        t.collection, 1.5, 5),
                    ValidationError);
    const UnlearnSubmission none = reference_unlearner(ReferenceUnlearner::random_over,
                                                       t.child_fact, t.kb, t.collection, 0.0, 5);
    const SweepReport rep = evaluate_sweep(none, t.kb, t.collection);
    CHECK(rep.points[0].recall_value == Ratio{1, 1});  // still a whole minimal set
}

TEST_CASE("recall never decreases and accuracy never increases as removals grow") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = oracle::random_instance(seed, 25, 5, 2);
        MinimalSetCollection collection;
        try {
            collection = mdus(inst.target, inst.kb, inst.rules, 30, seed);
        } catch (const ResourceLimitError&) {
            continue;
        }
        Rng rng(seed ^ 0xabcdef);
        std::vector<Fact> removed;
        std::vector<Fact> pool = inst.kb.facts();
        deterministic_shuffle(pool, rng);

        Ratio prev_recall{0, 1};
        Ratio prev_acc{1, 1};
        const MinimalSet fixed_argmax = recall(pool, collection).argmax;
        bool first = true;
        for (const Fact& f : pool) {
            removed.push_back(f);
            const RecallResult rr = recall(removed, collection);
            const Ratio acc = accuracy(removed, fixed_argmax, inst.kb);
            if (!first) {
                CHECK(rr.value >= prev_recall);
                CHECK(acc <= prev_acc);
            }
            prev_recall = rr.value;
            prev_acc = acc;
            first = false;
        }
    }
}
