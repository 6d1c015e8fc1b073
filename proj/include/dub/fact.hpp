#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dub/errors.hpp"

namespace dub {

using ObjectId = std::uint32_t;
using RelationId = std::uint32_t;

// A ground triple (s, r, o), read as "o is the r of s".
struct Fact {
    ObjectId subject{};
    RelationId relation{};
    ObjectId object{};

    friend auto operator<=>(const Fact&, const Fact&) = default;
};

struct FactHash {
    std::size_t operator()(const Fact& f) const noexcept {
        std::uint64_t h = (std::uint64_t(f.subject) << 32) ^ (std::uint64_t(f.relation) << 20) ^ f.object;
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
        return static_cast<std::size_t>(h);
    }
};

using FactSet = std::unordered_set<Fact, FactHash>;

// Bijective name <-> id interner for entities (people and literal values).
class SymbolTable {
public:
    ObjectId intern(std::string_view name) {
        auto it = ids_.find(std::string(name));
        if (it != ids_.end()) return it->second;
        const ObjectId id = static_cast<ObjectId>(names_.size());
        names_.emplace_back(name);
        ids_.emplace(names_.back(), id);
        return id;
    }

    std::optional<ObjectId> find(std::string_view name) const {
        auto it = ids_.find(std::string(name));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(ObjectId id) const {
        if (id >= names_.size()) throw ValidationError("unknown object id " + std::to_string(id));
        return names_[id];
    }

    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, ObjectId> ids_;
};

// Fixed, ordered list of relation names. Relation ids are indexes into it.
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!ids_.emplace(names_[i], static_cast<RelationId>(i)).second)
                throw ValidationError("duplicate relation name '" + names_[i] + "'");
        }
    }

    // The 11 family relations plus the three biography relations.
    static Vocabulary family_default();

    std::optional<RelationId> find(std::string_view name) const {
        auto it = ids_.find(std::string(name));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    RelationId require(std::string_view name) const {
        auto id = find(name);
        if (!id) throw ValidationError("unknown relation '" + std::string(name) + "'");
        return *id;
    }

    const std::string& name(RelationId id) const {
        if (id >= names_.size()) throw ValidationError("unknown relation id " + std::to_string(id));
        return names_[id];
    }

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool contains(RelationId id) const { return id < names_.size(); }

    // birthyear / birthplace / job hold literal values rather than kinship.
    bool is_biography(RelationId id) const {
        const std::string& n = name(id);
        return n == "birthyear" || n == "birthplace" || n == "job";
    }

    bool operator==(const Vocabulary& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, RelationId> ids_;
};

}  // namespace dub
