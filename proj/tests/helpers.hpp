#pragma once

// Small conveniences shared by the test files.

#include <string>
#include <vector>

#include <dub/fact.hpp>
#include <dub/kb.hpp>

namespace dub::testing {

inline Fact triple(SymbolTable& symbols, const Vocabulary& vocab, const std::string& s,
                   const std::string& r, const std::string& o) {
    return Fact{symbols.intern(s), vocab.require(r), symbols.intern(o)};
}

inline std::vector<Fact> sorted(std::vector<Fact> facts) {
    std::sort(facts.begin(), facts.end());
    return facts;
}

}  // namespace dub::testing
