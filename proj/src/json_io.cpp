#include "dub/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "dub/errors.hpp"
#include "dub/rules.hpp"

namespace dub {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_json(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), 1);
    }
}

const ordered_json& need(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing key '") + key + "'");
    return *it;
}

ObjectId resolve_object(const ordered_json& v, const SymbolTable& symbols) {
    if (v.is_number_integer() || v.is_number_unsigned()) {
        const std::int64_t id = v.get<std::int64_t>();
        if (id < 0 || static_cast<std::size_t>(id) >= symbols.size())
            throw ValidationError("object id " + std::to_string(id) + " out of range");
        return static_cast<ObjectId>(id);
    }
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        if (auto id = symbols.find(name)) return *id;
        throw ValidationError("unknown object '" + name + "'");
    }
    throw ValidationError("fact element must be an object id or name");
}

RelationId resolve_relation(const ordered_json& v, const Vocabulary& vocab) {
    if (v.is_number_integer() || v.is_number_unsigned()) {
        const std::int64_t id = v.get<std::int64_t>();
        if (id < 0 || static_cast<std::size_t>(id) >= vocab.size())
            throw ValidationError("relation id " + std::to_string(id) + " out of range");
        return static_cast<RelationId>(id);
    }
    if (v.is_string()) return vocab.require(v.get<std::string>());
    throw ValidationError("fact element must be a relation id or name");
}

Fact parse_fact(const ordered_json& triple, const SymbolTable& symbols, const Vocabulary& vocab) {
    if (!triple.is_array() || triple.size() != 3)
        throw ValidationError("a fact must be a [subject, relation, object] triple");
    return Fact{resolve_object(triple[0], symbols), resolve_relation(triple[1], vocab),
                resolve_object(triple[2], symbols)};
}

ordered_json name_triple(const Fact& f, const SymbolTable& symbols, const Vocabulary& vocab) {
    return ordered_json::array(
        {symbols.name(f.subject), vocab.name(f.relation), symbols.name(f.object)});
}

ordered_json ratio_json(const Ratio& r) {
    return ordered_json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

ordered_json ratio_or_null(const std::optional<Ratio>& r) {
    if (!r) return nullptr;
    return ratio_json(*r);
}

Ratio parse_ratio(const ordered_json& j) {
    return Ratio{need(j, "num").get<std::int64_t>(), need(j, "den").get<std::int64_t>()};
}

std::optional<Ratio> parse_ratio_or_null(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    return parse_ratio(j);
}

bool set_order(const MinimalSet& a, const MinimalSet& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
}

void normalize_sets(std::vector<MinimalSet>& sets) {
    for (MinimalSet& s : sets) std::sort(s.members.begin(), s.members.end());
    std::sort(sets.begin(), sets.end(), set_order);
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

ordered_json sweep_report_json(const SweepReport& report, const SymbolTable& symbols,
                               const Vocabulary& vocab) {
    ordered_json j;
    j["target"] = name_triple(report.target, symbols, vocab);
    j["threshold"] = ratio_json(report.threshold);
    ordered_json points = ordered_json::array();
    for (const PointReport& p : report.points) {
        ordered_json pj;
        pj["label"] = p.label;
        pj["recall"] = ratio_json(p.recall_value);
        ordered_json argmax = ordered_json::array();
        for (const Fact& f : p.argmax.members) argmax.push_back(name_triple(f, symbols, vocab));
        pj["argmax"] = argmax;
        pj["accuracy"] = ratio_json(p.accuracy_value);
        pj["relation_accuracy"] = ratio_or_null(p.relation_accuracy);
        pj["biography_accuracy"] = ratio_or_null(p.biography_accuracy);
        pj["superficially_unlearned"] = p.superficially_unlearned;
        points.push_back(std::move(pj));
    }
    j["points"] = points;
    j["acc_at_recall"] = ratio_or_null(report.acc_at_recall);
    j["recall_at_acc"] = ratio_or_null(report.recall_at_acc);
    j["acc_at_superficial"] = ratio_or_null(report.acc_at_superficial);
    return j;
}

SweepReport parse_sweep_report(const ordered_json& j, SymbolTable& symbols,
                               const Vocabulary& vocab) {
    auto intern_fact = [&](const ordered_json& triple) {
        if (!triple.is_array() || triple.size() != 3 || !triple[0].is_string() ||
            !triple[1].is_string() || !triple[2].is_string())
            throw ValidationError("report facts must be name triples");
        return Fact{symbols.intern(triple[0].get<std::string>()),
                    vocab.require(triple[1].get<std::string>()),
                    symbols.intern(triple[2].get<std::string>())};
    };
    SweepReport report;
    report.target = intern_fact(need(j, "target"));
    report.threshold = parse_ratio(need(j, "threshold"));
    for (const ordered_json& pj : need(j, "points")) {
        PointReport p;
        p.label = need(pj, "label").get<std::string>();
        p.recall_value = parse_ratio(need(pj, "recall"));
        p.argmax.target = report.target;
        for (const ordered_json& t : need(pj, "argmax")) p.argmax.members.push_back(intern_fact(t));
        p.accuracy_value = parse_ratio(need(pj, "accuracy"));
        p.relation_accuracy = parse_ratio_or_null(need(pj, "relation_accuracy"));
        p.biography_accuracy = parse_ratio_or_null(need(pj, "biography_accuracy"));
        p.superficially_unlearned = need(pj, "superficially_unlearned").get<bool>();
        report.points.push_back(std::move(p));
    }
    report.acc_at_recall = parse_ratio_or_null(need(j, "acc_at_recall"));
    report.recall_at_acc = parse_ratio_or_null(need(j, "recall_at_acc"));
    report.acc_at_superficial = parse_ratio_or_null(need(j, "acc_at_superficial"));
    return report;
}

}  // namespace

KbFile load_kb_json(const std::string& text) {
    const ordered_json j = parse_json(text);
    KbFile out;

    const ordered_json& objects = need(j, "objects");
    if (!objects.is_array()) throw ValidationError("'objects' must be an array");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const ordered_json& o = objects[i];
        const std::string name = need(o, "name").get<std::string>();
        const std::int64_t id = need(o, "id").get<std::int64_t>();
        if (id != static_cast<std::int64_t>(i))
            throw ValidationError("object ids must be dense and in order; got id " +
                                  std::to_string(id) + " at position " + std::to_string(i));
        if (out.symbols.intern(name) != i)
            throw ValidationError("duplicate object name '" + name + "'");
    }

    const ordered_json& relations = need(j, "relations");
    if (!relations.is_array()) throw ValidationError("'relations' must be an array");
    std::vector<std::string> rel_names;
    for (const ordered_json& r : relations) rel_names.push_back(r.get<std::string>());
    Vocabulary vocab(std::move(rel_names));

    std::vector<Fact> facts;
    for (const ordered_json& t : need(j, "facts"))
        facts.push_back(parse_fact(t, out.symbols, vocab));
    out.kb = KnowledgeBase(std::move(vocab), std::move(facts));
    return out;
}

std::string save_kb_json(const KbFile& kb_file) {
    ordered_json j;
    ordered_json objects = ordered_json::array();
    for (ObjectId i = 0; i < kb_file.symbols.size(); ++i)
        objects.push_back(ordered_json{{"id", i}, {"name", kb_file.symbols.name(i)}});
    j["objects"] = objects;
    j["relations"] = kb_file.kb.vocabulary().names();
    ordered_json facts = ordered_json::array();
    for (const Fact& f : kb_file.kb.facts())
        facts.push_back(ordered_json::array({f.subject, f.relation, f.object}));
    j["facts"] = facts;
    return j.dump(2) + "\n";
}

KbFile load_kb_file(const std::filesystem::path& path) {
    return load_kb_json(read_file(path));
}

std::string save_closure_json(const KbFile& base, const ClosedKB& closed) {
    ordered_json j;
    ordered_json objects = ordered_json::array();
    for (ObjectId i = 0; i < base.symbols.size(); ++i)
        objects.push_back(ordered_json{{"id", i}, {"name", base.symbols.name(i)}});
    j["objects"] = objects;
    j["relations"] = closed.closure.vocabulary().names();
    j["base_count"] = closed.base.size();
    j["derived_count"] = closed.derived_count();
    ordered_json facts = ordered_json::array();
    for (const Fact& f : closed.closure.facts())
        facts.push_back(ordered_json::array({f.subject, f.relation, f.object}));
    j["facts"] = facts;
    return j.dump(2) + "\n";
}

std::string save_provenance_json(const KbFile& base, const ClosedKB& closed) {
    const Vocabulary& vocab = closed.closure.vocabulary();
    ordered_json derived = ordered_json::array();
    for (const Fact& f : closed.closure.facts()) {
        if (closed.base.contains(f)) continue;
        const Witness& w = closed.witnesses.at(f);
        ordered_json dj;
        dj["fact"] = name_triple(f, base.symbols, vocab);
        dj["rule"] = w.rule_index;
        ordered_json body = ordered_json::array();
        for (const Fact& b : w.body) body.push_back(name_triple(b, base.symbols, vocab));
        dj["body"] = body;
        derived.push_back(std::move(dj));
    }
    ordered_json j;
    j["base_count"] = closed.base.size();
    j["derived_count"] = closed.derived_count();
    j["derived"] = derived;
    return j.dump(2) + "\n";
}

std::string save_collection_json(const MinimalSetCollection& collection,
                                 const SymbolTable& symbols, const Vocabulary& vocab,
                                 std::uint64_t seed) {
    ordered_json j;
    j["target"] = name_triple(collection.target, symbols, vocab);
    j["seed"] = seed;
    j["n_seed"] = collection.n_seed;
    ordered_json sets = ordered_json::array();
    for (const MinimalSet& s : collection.sets) {
        ordered_json sj = ordered_json::array();
        for (const Fact& f : s.members) sj.push_back(name_triple(f, symbols, vocab));
        sets.push_back(std::move(sj));
    }
    j["sets"] = sets;
    return j.dump(2) + "\n";
}

MinimalSetCollection load_collection_json(const std::string& text, const SymbolTable& symbols,
                                          const Vocabulary& vocab) {
    const ordered_json j = parse_json(text);
    MinimalSetCollection out;
    out.target = parse_fact(need(j, "target"), symbols, vocab);
    out.n_seed = need(j, "n_seed").get<std::uint64_t>();
    for (const ordered_json& sj : need(j, "sets")) {
        MinimalSet s;
        s.target = out.target;
        for (const ordered_json& t : sj) s.members.push_back(parse_fact(t, symbols, vocab));
        out.sets.push_back(std::move(s));
    }
    if (out.sets.empty()) throw ValidationError("collection has no sets");
    normalize_sets(out.sets);
    return out;
}

UnlearnSubmission load_submission_json(const std::string& text, const KbFile& kb_file,
                                       std::size_t* dropped_count) {
    const ordered_json j = parse_json(text);
    UnlearnSubmission out;
    out.target = parse_fact(need(j, "target"), kb_file.symbols, kb_file.kb.vocabulary());
    std::size_t dropped = 0;
    for (const ordered_json& pj : need(j, "sweep")) {
        SweepPoint point;
        point.label = need(pj, "label").get<std::string>();
        for (const ordered_json& t : need(pj, "removed")) {
            if (!t.is_array() || t.size() != 3)
                throw ValidationError("a fact must be a [subject, relation, object] triple");
            Fact f{};
            try {
                f = parse_fact(t, kb_file.symbols, kb_file.kb.vocabulary());
            } catch (const ValidationError&) {
                ++dropped;  // names the KB has never heard of cannot be in K
                continue;
            }
            if (!kb_file.kb.contains(f)) {
                ++dropped;
                continue;
            }
            point.removed.push_back(f);
        }
        std::sort(point.removed.begin(), point.removed.end());
        point.removed.erase(std::unique(point.removed.begin(), point.removed.end()),
                            point.removed.end());
        out.points.push_back(std::move(point));
    }
    if (dropped_count) *dropped_count = dropped;
    return out;
}

std::string save_submission_json(const UnlearnSubmission& submission,
                                 const SymbolTable& symbols, const Vocabulary& vocab) {
    ordered_json j;
    j["target"] = name_triple(submission.target, symbols, vocab);
    ordered_json sweep = ordered_json::array();
    for (const SweepPoint& p : submission.points) {
        ordered_json pj;
        pj["label"] = p.label;
        ordered_json removed = ordered_json::array();
        for (const Fact& f : p.removed) removed.push_back(name_triple(f, symbols, vocab));
        pj["removed"] = removed;
        sweep.push_back(std::move(pj));
    }
    j["sweep"] = sweep;
    return j.dump(2) + "\n";
}

std::string save_sweep_report_json(const SweepReport& report, const SymbolTable& symbols,
                                   const Vocabulary& vocab) {
    return sweep_report_json(report, symbols, vocab).dump(2) + "\n";
}

std::string save_benchmark_report_json(const BenchmarkReport& report, const SymbolTable& symbols,
                                       const Vocabulary& vocab, std::uint64_t seed) {
    ordered_json j;
    j["model"] = report.model;
    j["method"] = report.method;
    j["seed"] = seed;
    j["threshold"] = ratio_json(report.threshold);
    j["relations"] = vocab.names();
    ordered_json agg;
    auto agg_json = [](const MetricAggregate& a) {
        return ordered_json{{"mean", a.mean}, {"std", a.std_dev}, {"imputed", a.imputed}};
    };
    agg["acc_at_recall"] = agg_json(report.acc_at_recall);
    agg["recall_at_acc"] = agg_json(report.recall_at_acc);
    agg["acc_at_superficial"] = agg_json(report.acc_at_superficial);
    j["aggregates"] = agg;
    ordered_json curve = ordered_json::array();
    for (const CurvePoint& c : report.curve)
        curve.push_back(ordered_json{{"label", c.label},
                                     {"mean_accuracy", c.mean_accuracy},
                                     {"mean_recall", c.mean_recall}});
    j["curve"] = curve;
    ordered_json targets = ordered_json::array();
    for (const SweepReport& t : report.targets)
        targets.push_back(sweep_report_json(t, symbols, vocab));
    j["targets"] = targets;
    return j.dump(2) + "\n";
}

BenchmarkReport load_benchmark_report_json(const std::string& text, SymbolTable& symbols,
                                           Vocabulary& vocab) {
    const ordered_json j = parse_json(text);
    std::vector<std::string> rel_names;
    for (const ordered_json& r : need(j, "relations")) rel_names.push_back(r.get<std::string>());
    vocab = Vocabulary(std::move(rel_names));

    BenchmarkReport report;
    report.model = need(j, "model").get<std::string>();
    report.method = need(j, "method").get<std::string>();
    report.threshold = parse_ratio(need(j, "threshold"));
    const ordered_json& agg = need(j, "aggregates");
    auto parse_agg = [&](const char* key) {
        const ordered_json& a = need(agg, key);
        MetricAggregate m;
        m.mean = need(a, "mean").get<double>();
        m.std_dev = need(a, "std").get<double>();
        m.imputed = need(a, "imputed").get<int>();
        return m;
    };
    report.acc_at_recall = parse_agg("acc_at_recall");
    report.recall_at_acc = parse_agg("recall_at_acc");
    report.acc_at_superficial = parse_agg("acc_at_superficial");
    for (const ordered_json& c : need(j, "curve"))
        report.curve.push_back(CurvePoint{need(c, "label").get<std::string>(),
                                          need(c, "mean_accuracy").get<double>(),
                                          need(c, "mean_recall").get<double>()});
    for (const ordered_json& t : need(j, "targets"))
        report.targets.push_back(parse_sweep_report(t, symbols, vocab));
    return report;
}

std::string curve_csv(const BenchmarkReport& report) {
    std::string out = "label,mean_accuracy,mean_recall\n";
    char buf[64];
    for (const CurvePoint& c : report.curve) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", c.mean_accuracy, c.mean_recall);
        out += csv_field(c.label);
        out += buf;
    }
    return out;
}

GenConfig load_gen_config_json(const std::string& text) {
    const ordered_json j = parse_json(text);
    GenConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "person_target") c.person_target = value.get<int>();
        else if (key == "relation_fact_target") c.relation_fact_target = value.get<int>();
        else if (key == "bio_fact_target") c.bio_fact_target = value.get<int>();
        else if (key == "max_generations") c.max_generations = value.get<int>();
        else if (key == "parent_probability") c.parent_probability = value.get<double>();
        else if (key == "spouse_probability") c.spouse_probability = value.get<double>();
        else if (key == "children_probability") c.children_probability = value.get<double>();
        else if (key == "children_geometric_p") c.children_geometric_p = value.get<double>();
        else if (key == "max_children") c.max_children = value.get<int>();
        else if (key == "lastname_switch_probability") c.lastname_switch_probability = value.get<double>();
        else if (key == "same_birthplace_probability") c.same_birthplace_probability = value.get<double>();
        else if (key == "couple_year_mean") c.couple_year_mean = value.get<double>();
        else if (key == "couple_year_sd") c.couple_year_sd = value.get<double>();
        else if (key == "couple_year_min") c.couple_year_min = value.get<int>();
        else if (key == "couple_year_max") c.couple_year_max = value.get<int>();
        else if (key == "child_year_mean") c.child_year_mean = value.get<double>();
        else if (key == "child_year_sd") c.child_year_sd = value.get<double>();
        else if (key == "child_year_min") c.child_year_min = value.get<int>();
        else if (key == "child_year_max") c.child_year_max = value.get<int>();
        else if (key == "root_base_year") c.root_base_year = value.get<int>();
        else if (key == "generation_year_gap") c.generation_year_gap = value.get<int>();
        else if (key == "root_year_sd") c.root_year_sd = value.get<double>();
        else if (key == "min_birth_year") c.min_birth_year = value.get<int>();
        else if (key == "max_birth_year") c.max_birth_year = value.get<int>();
        else if (key == "max_attempts") c.max_attempts = value.get<int>();
        else throw ValidationError("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

std::string save_gen_config_json(const GenConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["person_target"] = c.person_target;
    j["relation_fact_target"] = c.relation_fact_target;
    j["bio_fact_target"] = c.bio_fact_target;
    j["max_generations"] = c.max_generations;
    j["parent_probability"] = c.parent_probability;
    j["spouse_probability"] = c.spouse_probability;
    j["children_probability"] = c.children_probability;
    j["children_geometric_p"] = c.children_geometric_p;
    j["max_children"] = c.max_children;
    j["lastname_switch_probability"] = c.lastname_switch_probability;
    j["same_birthplace_probability"] = c.same_birthplace_probability;
    j["couple_year_mean"] = c.couple_year_mean;
    j["couple_year_sd"] = c.couple_year_sd;
    j["couple_year_min"] = c.couple_year_min;
    j["couple_year_max"] = c.couple_year_max;
    j["child_year_mean"] = c.child_year_mean;
    j["child_year_sd"] = c.child_year_sd;
    j["child_year_min"] = c.child_year_min;
    j["child_year_max"] = c.child_year_max;
    j["root_base_year"] = c.root_base_year;
    j["generation_year_gap"] = c.generation_year_gap;
    j["root_year_sd"] = c.root_year_sd;
    j["min_birth_year"] = c.min_birth_year;
    j["max_birth_year"] = c.max_birth_year;
    j["max_attempts"] = c.max_attempts;
    return j.dump(2) + "\n";
}

std::string persons_csv(const FamilyGraph& graph) {
    std::string out = "id,name,gender,generation,birth_year,birthplace,job,father,mother,spouse\n";
    auto opt_id = [](const std::optional<std::uint32_t>& v) {
        return v ? std::to_string(*v) : std::string();
    };
    for (const Person& p : graph.persons) {
        out += std::to_string(p.id);
        out += ',';
        out += csv_field(p.full_name());
        out += ',';
        out += p.gender == Gender::male ? "male" : "female";
        out += ',';
        out += std::to_string(p.generation);
        out += ',';
        out += std::to_string(p.birth_year);
        out += ',';
        out += csv_field(p.birthplace);
        out += ',';
        out += csv_field(p.job);
        out += ',';
        out += opt_id(p.father);
        out += ',';
        out += opt_id(p.mother);
        out += ',';
        out += opt_id(p.spouse);
        out += '\n';
    }
    return out;
}

std::string qa_jsonl(const KnowledgeBase& kb, const SymbolTable& symbols) {
    const Vocabulary& vocab = kb.vocabulary();
    std::string out;
    for (const Fact& f : kb.facts()) {
        const QaPair qa = render_qa(f, symbols, vocab);
        ordered_json j;
        j["question"] = qa.question;
        j["answer"] = qa.answer;
        j["fact"] = name_triple(f, symbols, vocab);
        out += j.dump();
        out += '\n';
    }
    return out;
}

void write_dataset_bundle(const Dataset& dataset, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create directory " + dir.string() + ": " + ec.message());
    write_file_atomic(dir / "config.json", save_gen_config_json(dataset.config));
    write_file_atomic(dir / "kb.json", save_kb_json(KbFile{dataset.symbols, dataset.kb}));
    write_file_atomic(dir / "ground.json",
                      save_kb_json(KbFile{dataset.symbols, dataset.ground.base}));
    write_file_atomic(dir / "rules.txt", default_rule_text());
    write_file_atomic(dir / "qa.jsonl", qa_jsonl(dataset.kb, dataset.symbols));
    write_file_atomic(dir / "persons.csv", persons_csv(dataset.graph));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw ValidationError("error while reading " + path.string());
    return content;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ValidationError("error while writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ValidationError("cannot move " + tmp.string() + " into place: " + ec.message());
}

}  // namespace dub
