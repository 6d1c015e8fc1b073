#include "dub/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "dub/errors.hpp"
#include "dub/rng.hpp"

namespace dub {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

void require_collection(const Fact& target, const MinimalSetCollection& collection) {
    if (collection.sets.empty())
        throw ValidationError("minimal-set collection is empty");
    if (!(collection.target == target))
        throw ValidationError("minimal-set collection is for a different target");
}

}  // namespace

Ratio parse_decimal_ratio(const std::string& text) {
    std::size_t i = 0;
    std::int64_t whole = 0, frac = 0, den = 1;
    bool any_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        whole = whole * 10 + (text[i] - '0');
        if (whole > 1) throw ValidationError("ratio out of range [0, 1]: '" + text + "'");
        any_digit = true;
        ++i;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (den >= 1'000'000'000)
                throw ValidationError("too many decimal digits in '" + text + "'");
            frac = frac * 10 + (text[i] - '0');
            den *= 10;
            any_digit = true;
            ++i;
        }
    }
    if (!any_digit || i != text.size())
        throw ValidationError("malformed decimal ratio: '" + text + "'");
    std::int64_t num = whole * den + frac;
    if (num > den) throw ValidationError("ratio out of range [0, 1]: '" + text + "'");
    const std::int64_t g = gcd64(num == 0 ? den : num, den);
    return Ratio{num / g, den / g};
}

RecallResult recall(const std::vector<Fact>& removed, const MinimalSetCollection& collection) {
    if (collection.sets.empty())
        throw ValidationError("minimal-set collection is empty");
    FactSet removed_set(removed.begin(), removed.end());
    RecallResult best{Ratio{-1, 1}, collection.sets.front()};
    // Sets are stored smallest-first then lexicographic, so keeping the first
    // strict maximum realizes the tie-break.
    for (const MinimalSet& s : collection.sets) {
        std::int64_t hit = 0;
        for (const Fact& f : s.members)
            if (removed_set.count(f)) ++hit;
        Ratio r{hit, static_cast<std::int64_t>(s.members.size())};
        if (r > best.value) best = RecallResult{r, s};
    }
    return best;
}

Ratio accuracy(const std::vector<Fact>& removed, const MinimalSet& argmax,
               const KnowledgeBase& kb) {
    auto keep_all = [](RelationId) { return true; };
    auto r = accuracy_where(removed, argmax, kb, keep_all);
    return r ? *r : Ratio{0, 0};
}

SweepReport evaluate_sweep(const UnlearnSubmission& submission, const KnowledgeBase& kb,
                           const MinimalSetCollection& collection, Ratio threshold) {
    require_collection(submission.target, collection);
    const Vocabulary& vocab = kb.vocabulary();

    SweepReport report;
    report.target = submission.target;
    report.threshold = threshold;

    for (const SweepPoint& point : submission.points) {
        RecallResult rr = recall(point.removed, collection);
        PointReport pr;
        pr.label = point.label;
        pr.recall_value = rr.value;
        pr.argmax = rr.argmax;
        pr.accuracy_value = accuracy(point.removed, rr.argmax, kb);
        pr.relation_accuracy = accuracy_where(point.removed, rr.argmax, kb,
                                              [&](RelationId r) { return !vocab.is_biography(r); });
        pr.biography_accuracy = accuracy_where(point.removed, rr.argmax, kb,
                                               [&](RelationId r) { return vocab.is_biography(r); });
        pr.superficially_unlearned =
            std::find(point.removed.begin(), point.removed.end(), submission.target) !=
            point.removed.end();

        if (pr.recall_value >= threshold &&
            (!report.acc_at_recall || pr.accuracy_value > *report.acc_at_recall))
            report.acc_at_recall = pr.accuracy_value;
        if (pr.accuracy_value >= threshold &&
            (!report.recall_at_acc || pr.recall_value > *report.recall_at_acc))
            report.recall_at_acc = pr.recall_value;
        if (pr.superficially_unlearned &&
            (!report.acc_at_superficial || pr.accuracy_value > *report.acc_at_superficial))
            report.acc_at_superficial = pr.accuracy_value;

        report.points.push_back(std::move(pr));
    }
    return report;
}

namespace {

MetricAggregate aggregate_metric(const std::vector<SweepReport>& reports,
                                 std::optional<Ratio> SweepReport::*field) {
    MetricAggregate agg;
    std::vector<double> values;
    values.reserve(reports.size());
    for (const SweepReport& r : reports) {
        const auto& v = r.*field;
        if (v) {
            values.push_back(v->value());
        } else {
            values.push_back(0.0);  // absent counts as total failure
            ++agg.imputed;
        }
    }
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    agg.mean = mean;
    agg.std_dev = std::sqrt(var / n);
    return agg;
}

}  // namespace

BenchmarkReport aggregate(const std::vector<SweepReport>& reports) {
    if (reports.empty()) throw ValidationError("nothing to aggregate: no sweep reports");
    for (const SweepReport& r : reports)
        if (!(r.threshold == reports.front().threshold))
            throw ValidationError("sweep reports disagree on the threshold");

    BenchmarkReport out;
    out.threshold = reports.front().threshold;
    out.targets = reports;
    out.acc_at_recall = aggregate_metric(reports, &SweepReport::acc_at_recall);
    out.recall_at_acc = aggregate_metric(reports, &SweepReport::recall_at_acc);
    out.acc_at_superficial = aggregate_metric(reports, &SweepReport::acc_at_superficial);

    // Curve labels keep first-encounter order across targets.
    std::vector<std::string> labels;
    std::map<std::string, std::size_t> index;
    std::vector<double> acc_sum, rec_sum;
    std::vector<std::int64_t> count;
    for (const SweepReport& r : reports) {
        for (const PointReport& p : r.points) {
            auto it = index.find(p.label);
            std::size_t k;
            if (it == index.end()) {
                k = labels.size();
                index.emplace(p.label, k);
                labels.push_back(p.label);
                acc_sum.push_back(0.0);
                rec_sum.push_back(0.0);
                count.push_back(0);
            } else {
                k = it->second;
            }
            acc_sum[k] += p.accuracy_value.value();
            rec_sum[k] += p.recall_value.value();
            ++count[k];
        }
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const double n = static_cast<double>(count[k]);
        out.curve.push_back(CurvePoint{labels[k], acc_sum[k] / n, rec_sum[k] / n});
    }
    return out;
}

UnlearnSubmission reference_unlearner(ReferenceUnlearner kind, const Fact& target,
                                      const KnowledgeBase& kb,
                                      const MinimalSetCollection& collection,
                                      double p, std::uint64_t seed) {
    require_collection(target, collection);
    Rng rng(seed);
    const MinimalSet& pick = collection.sets[static_cast<std::size_t>(
        uniform_below(rng, collection.sets.size()))];

    UnlearnSubmission sub;
    sub.target = target;
    switch (kind) {
        case ReferenceUnlearner::oracle_minimal:
            sub.points.push_back(SweepPoint{"oracle", pick.members});
            break;
        case ReferenceUnlearner::target_only:
            sub.points.push_back(SweepPoint{"target-only", {target}});
            break;
        case ReferenceUnlearner::random_over: {
            if (p < 0.0 || p > 1.0) throw ValidationError("overshoot probability must be in [0, 1]");
            FactSet member_set(pick.members.begin(), pick.members.end());
            std::vector<Fact> removed = pick.members;
            for (const Fact& f : kb.facts()) {
                if (member_set.count(f)) continue;
                if (bernoulli(rng, p)) removed.push_back(f);
            }
            std::sort(removed.begin(), removed.end());
            char label[32];
            std::snprintf(label, sizeof label, "p=%.2f", p);
            sub.points.push_back(SweepPoint{label, std::move(removed)});
            break;
        }
    }
    return sub;
}

}  // namespace dub
