#include "dub/kb.hpp"

#include <algorithm>
#include <limits>

namespace dub {

Vocabulary Vocabulary::family_default() {
    return Vocabulary({"child", "father", "mother", "husband", "wife", "brother", "sister",
                       "aunt", "uncle", "nephew", "niece", "birthyear", "birthplace", "job"});
}

namespace {

// Master order groups facts per relation so index ranges are contiguous.
bool rel_order(const Fact& a, const Fact& b) {
    if (a.relation != b.relation) return a.relation < b.relation;
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.object < b.object;
}

bool obj_order(const Fact& a, const Fact& b) {
    if (a.object != b.object) return a.object < b.object;
    return a.subject < b.subject;
}

}  // namespace

KnowledgeBase::KnowledgeBase(Vocabulary vocab, std::vector<Fact> facts)
    : vocab_(std::move(vocab)), facts_(std::move(facts)) {
    check_relations();
    rebuild();
}

void KnowledgeBase::check_relations() const {
    for (const Fact& f : facts_) {
        if (!vocab_.contains(f.relation))
            throw ValidationError("fact uses relation id " + std::to_string(f.relation) +
                                  " outside the vocabulary");
    }
}

void KnowledgeBase::rebuild() {
    std::sort(facts_.begin(), facts_.end(), rel_order);
    facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());

    const std::size_t nrel = vocab_.size();
    rel_begin_.assign(nrel + 1, 0);
    for (const Fact& f : facts_) ++rel_begin_[f.relation + 1];
    for (std::size_t r = 0; r < nrel; ++r) rel_begin_[r + 1] += rel_begin_[r];

    by_object_.assign(nrel, {});
    for (std::size_t r = 0; r < nrel; ++r) {
        auto first = facts_.begin() + rel_begin_[r];
        auto last = facts_.begin() + rel_begin_[r + 1];
        by_object_[r].assign(first, last);
        std::sort(by_object_[r].begin(), by_object_[r].end(), obj_order);
    }
}

bool KnowledgeBase::contains(const Fact& f) const {
    if (!vocab_.contains(f.relation)) return false;
    auto first = facts_.begin() + rel_begin_[f.relation];
    auto last = facts_.begin() + rel_begin_[f.relation + 1];
    return std::binary_search(first, last, f, rel_order);
}

std::vector<Fact> KnowledgeBase::match(std::optional<ObjectId> subject, RelationId relation,
                                       std::optional<ObjectId> object) const {
    if (!vocab_.contains(relation))
        throw ValidationError("match on unknown relation id " + std::to_string(relation));

    if (subject && object) {
        Fact probe{*subject, relation, *object};
        return contains(probe) ? std::vector<Fact>{probe} : std::vector<Fact>{};
    }

    auto first = facts_.begin() + rel_begin_[relation];
    auto last = facts_.begin() + rel_begin_[relation + 1];

    if (subject) {
        Fact lo{*subject, relation, 0};
        Fact hi{*subject, relation, std::numeric_limits<ObjectId>::max()};
        auto b = std::lower_bound(first, last, lo, rel_order);
        auto e = std::upper_bound(first, last, hi, rel_order);
        return {b, e};
    }
    if (object) {
        const auto& idx = by_object_[relation];
        Fact lo{0, relation, *object};
        Fact hi{std::numeric_limits<ObjectId>::max(), relation, *object};
        auto b = std::lower_bound(idx.begin(), idx.end(), lo, obj_order);
        auto e = std::upper_bound(idx.begin(), idx.end(), hi, obj_order);
        return {b, e};
    }
    return {first, last};
}

std::size_t KnowledgeBase::match_count(std::optional<ObjectId> subject, RelationId relation,
                                       std::optional<ObjectId> object) const {
    if (!vocab_.contains(relation))
        throw ValidationError("match on unknown relation id " + std::to_string(relation));

    if (subject && object) return contains({*subject, relation, *object}) ? 1 : 0;

    auto first = facts_.begin() + rel_begin_[relation];
    auto last = facts_.begin() + rel_begin_[relation + 1];
    if (subject) {
        Fact lo{*subject, relation, 0};
        Fact hi{*subject, relation, std::numeric_limits<ObjectId>::max()};
        return std::upper_bound(first, last, hi, rel_order) -
               std::lower_bound(first, last, lo, rel_order);
    }
    if (object) {
        const auto& idx = by_object_[relation];
        Fact lo{0, relation, *object};
        Fact hi{std::numeric_limits<ObjectId>::max(), relation, *object};
        return std::upper_bound(idx.begin(), idx.end(), hi, obj_order) -
               std::lower_bound(idx.begin(), idx.end(), lo, obj_order);
    }
    return static_cast<std::size_t>(last - first);
}

KnowledgeBase KnowledgeBase::without(const std::vector<Fact>& removed) const {
    return without(FactSet(removed.begin(), removed.end()));
}

KnowledgeBase KnowledgeBase::without(const FactSet& removed) const {
    std::vector<Fact> kept;
    kept.reserve(facts_.size());
    for (const Fact& f : facts_)
        if (!removed.count(f)) kept.push_back(f);
    return KnowledgeBase(vocab_, std::move(kept));
}

KnowledgeBase KnowledgeBase::with_facts(const std::vector<Fact>& extra) const {
    std::vector<Fact> all = facts_;
    all.insert(all.end(), extra.begin(), extra.end());
    return KnowledgeBase(vocab_, std::move(all));
}

}  // namespace dub
