#include "dub/rules.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "dub/errors.hpp"

namespace dub {

namespace {

// Hand-rolled scanner; the grammar is small enough that a tokenizer would be
// more code than the parser.
struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line_no;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(pos + 1) +
                             ": " + msg,
                         line_no, pos + 1);
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'" +
                 (pos < text.size() ? std::string(" before '") + text[pos] + "'" : " at end of input"));
        ++pos;
    }

    bool try_consume(const char* token) {
        skip_ws();
        std::size_t n = std::char_traits<char>::length(token);
        if (text.compare(pos, n, token) == 0) {
            pos += n;
            return true;
        }
        return false;
    }

    std::string identifier(const char* what) {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                ++pos;
            else
                break;
        }
        if (pos == start) fail(std::string("expected ") + what);
        return text.substr(start, pos - start);
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
};

struct RawAtom {
    std::string subject, relation, object;
};

RawAtom parse_atom(Cursor& cur, const Vocabulary& vocab) {
    cur.expect('(');
    RawAtom atom;
    atom.subject = cur.identifier("variable");
    cur.expect(',');
    cur.skip_ws();
    std::size_t rel_pos = cur.pos;
    atom.relation = cur.identifier("relation");
    if (!vocab.find(atom.relation)) {
        cur.pos = rel_pos;
        cur.fail("unknown relation '" + atom.relation + "'");
    }
    cur.expect(',');
    atom.object = cur.identifier("variable");
    cur.expect(')');
    return atom;
}

}  // namespace

Rule parse_rule(const std::string& text, const Vocabulary& vocab, std::size_t line_no) {
    Cursor cur{text, 0, line_no};

    std::vector<RawAtom> body;
    body.push_back(parse_atom(cur, vocab));
    while (cur.try_consume("&")) body.push_back(parse_atom(cur, vocab));
    if (!cur.try_consume("->")) cur.fail("expected '&' or '->'");
    RawAtom head = parse_atom(cur, vocab);
    if (!cur.at_end()) cur.fail("trailing input after rule");

    // Alpha-canonical variable numbering: first occurrence over body atoms
    // (subject, then object), head last.
    std::map<std::string, VarId> ids;
    auto var_of = [&](const std::string& name) {
        auto it = ids.find(name);
        if (it != ids.end()) return it->second;
        VarId id = static_cast<VarId>(ids.size());
        ids.emplace(name, id);
        return id;
    };

    Rule rule;
    for (const RawAtom& a : body)
        rule.body.push_back({var_of(a.subject), vocab.require(a.relation), var_of(a.object)});

    // Safety: every head variable must already be bound by the body.
    for (const std::string* v : {&head.subject, &head.object}) {
        if (!ids.count(*v))
            throw ParseError("line " + std::to_string(line_no) + ": unsafe head variable '" + *v +
                                 "' (does not occur in the body)",
                             line_no);
    }
    rule.head = {var_of(head.subject), vocab.require(head.relation), var_of(head.object)};
    rule.var_count = static_cast<std::uint32_t>(ids.size());
    return rule;
}

std::string format_rule(const Rule& rule, const Vocabulary& vocab) {
    auto var = [](VarId v) { return "X" + std::to_string(v + 1); };
    std::ostringstream out;
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out << " & ";
        const RuleAtom& a = rule.body[i];
        out << "(" << var(a.subject) << ", " << vocab.name(a.relation) << ", " << var(a.object)
            << ")";
    }
    out << " -> (" << var(rule.head.subject) << ", " << vocab.name(rule.head.relation) << ", "
        << var(rule.head.object) << ")";
    return out.str();
}

RuleSet parse_rule_file(const std::string& text, const Vocabulary& vocab) {
    RuleSet set;
    set.vocab = vocab;

    std::map<Rule, std::size_t> seen;  // canonical rule -> first line
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        Rule rule = parse_rule(line, vocab, line_no);
        auto [it, inserted] = seen.emplace(rule, line_no);
        if (!inserted)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate rule (same as line " +
                                 std::to_string(it->second) + " up to variable renaming)",
                             line_no);
        set.rules.push_back(std::move(rule));
    }
    return set;
}

}  // namespace dub
