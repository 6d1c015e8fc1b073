#pragma once

#include <optional>
#include <vector>

#include "dub/fact.hpp"

namespace dub {

// Immutable, deduplicated fact set with per-relation indexes. "Mutation"
// returns a fresh value (without/with_facts), so indexes can never drift out
// of sync with the fact list and instances are freely shareable across
// threads.
class KnowledgeBase {
public:
    KnowledgeBase() = default;
    explicit KnowledgeBase(Vocabulary vocab) : vocab_(std::move(vocab)) { rebuild(); }
    KnowledgeBase(Vocabulary vocab, std::vector<Fact> facts);

    const Vocabulary& vocabulary() const { return vocab_; }

    // Sorted by (relation, subject, object); duplicates removed.
    const std::vector<Fact>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }
    bool empty() const { return facts_.empty(); }

    bool contains(const Fact& f) const;

    // All facts of `relation` matching the bound fields, in id-sorted order:
    // by (subject, object), except object-only queries which come back sorted
    // by (object, subject).
    std::vector<Fact> match(std::optional<ObjectId> subject, RelationId relation,
                            std::optional<ObjectId> object) const;

    // Number of facts match() would return, without materializing them.
    std::size_t match_count(std::optional<ObjectId> subject, RelationId relation,
                            std::optional<ObjectId> object) const;

    KnowledgeBase without(const std::vector<Fact>& removed) const;
    KnowledgeBase without(const FactSet& removed) const;
    KnowledgeBase with_facts(const std::vector<Fact>& extra) const;

    bool operator==(const KnowledgeBase& other) const {
        return vocab_ == other.vocab_ && facts_ == other.facts_;
    }

private:
    void rebuild();
    void check_relations() const;

    Vocabulary vocab_;
    std::vector<Fact> facts_;              // sorted (r, s, o)
    std::vector<std::size_t> rel_begin_;   // facts_ offset per relation, size vocab+1
    std::vector<std::vector<Fact>> by_object_;  // per relation, sorted (o, s)
};

}  // namespace dub
