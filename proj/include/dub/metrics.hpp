#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dub/kb.hpp"
#include "dub/unlearn.hpp"

namespace dub {

// Exact rational in [0, 1]. num/den are kept unreduced because the
// denominator is meaningful (|U*| for recall, |K \ U*| for accuracy).
struct Ratio {
    std::int64_t num{};
    std::int64_t den{1};

    double value() const { return den == 0 ? 0.0 : double(num) / double(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) { return a.num * b.den == b.num * a.den; }
    friend bool operator<(const Ratio& a, const Ratio& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Ratio& a, const Ratio& b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend bool operator>=(const Ratio& a, const Ratio& b) { return b <= a; }
};

// Parse "0.8", "0.825", "1" ... into the exact rational it denotes.
Ratio parse_decimal_ratio(const std::string& text);

struct RecallResult {
    Ratio value;
    MinimalSet argmax;  // best-covered set; ties: smaller, then lexicographic
};

// max over collection of |removed ∩ U*| / |U*|.
RecallResult recall(const std::vector<Fact>& removed, const MinimalSetCollection& collection);

// |(K \ U*) \ removed| / |K \ U*| for the given argmax set.
Ratio accuracy(const std::vector<Fact>& removed, const MinimalSet& argmax,
               const KnowledgeBase& kb);

// Same, restricted to facts whose relation satisfies keep_relation; empty
// restricted retain set yields nullopt.
template <typename Pred>
std::optional<Ratio> accuracy_where(const std::vector<Fact>& removed, const MinimalSet& argmax,
                                    const KnowledgeBase& kb, Pred keep_relation);

struct SweepPoint {
    std::string label;           // e.g. "T=4" or "p=0.20"
    std::vector<Fact> removed;   // sorted, subset of K
};

// One unlearning method's removal sets for a single target, across a
// hyperparameter sweep.
struct UnlearnSubmission {
    Fact target{};
    std::vector<SweepPoint> points;
};

struct PointReport {
    std::string label;
    Ratio recall_value;
    MinimalSet argmax;
    Ratio accuracy_value;
    std::optional<Ratio> relation_accuracy;    // family relations only
    std::optional<Ratio> biography_accuracy;   // birthyear/birthplace/job only
    bool superficially_unlearned{};            // target itself was removed
};

struct SweepReport {
    Fact target{};
    Ratio threshold{4, 5};
    std::vector<PointReport> points;
    std::optional<Ratio> acc_at_recall;      // max accuracy where recall >= threshold
    std::optional<Ratio> recall_at_acc;      // max recall where accuracy >= threshold
    std::optional<Ratio> acc_at_superficial; // max accuracy where target removed
};

SweepReport evaluate_sweep(const UnlearnSubmission& submission, const KnowledgeBase& kb,
                           const MinimalSetCollection& collection, Ratio threshold = {4, 5});

struct MetricAggregate {
    double mean{};
    double std_dev{};  // population standard deviation
    int imputed{};     // targets where the metric was absent and counted as 0
};

struct CurvePoint {
    std::string label;
    double mean_accuracy{};
    double mean_recall{};
};

struct BenchmarkReport {
    std::string model;
    std::string method;
    Ratio threshold{4, 5};
    std::vector<SweepReport> targets;
    MetricAggregate acc_at_recall;
    MetricAggregate recall_at_acc;
    MetricAggregate acc_at_superficial;
    std::vector<CurvePoint> curve;  // per sweep label, averaged across targets
};

BenchmarkReport aggregate(const std::vector<SweepReport>& reports);

enum class ReferenceUnlearner {
    oracle_minimal,  // removes exactly one known minimal set
    target_only,     // removes just the target fact
    random_over,     // one minimal set plus a p-fraction Bernoulli sample of the rest of K
};

UnlearnSubmission reference_unlearner(ReferenceUnlearner kind, const Fact& target,
                                      const KnowledgeBase& kb,
                                      const MinimalSetCollection& collection,
                                      double p, std::uint64_t seed);

template <typename Pred>
std::optional<Ratio> accuracy_where(const std::vector<Fact>& removed, const MinimalSet& argmax,
                                    const KnowledgeBase& kb, Pred keep_relation) {
    FactSet removed_set(removed.begin(), removed.end());
    FactSet member_set(argmax.members.begin(), argmax.members.end());
    std::int64_t retain = 0, kept = 0;
    for (const Fact& f : kb.facts()) {
        if (!keep_relation(f.relation) || member_set.count(f)) continue;
        ++retain;
        if (!removed_set.count(f)) ++kept;
    }
    if (retain == 0) return std::nullopt;
    return Ratio{kept, retain};
}

}  // namespace dub
