// dub — deep unlearning benchmark tool.
//
// Subcommands: gen, rules check, closure, mdus, eval, bench, report, qa.
// Exit codes: 0 ok, 1 usage, 2 bad data, 3 resource limit.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dub/errors.hpp"
#include "dub/genkb.hpp"
#include "dub/json_io.hpp"
#include "dub/metrics.hpp"
#include "dub/rng.hpp"
#include "dub/rules.hpp"
#include "dub/unlearn.hpp"

namespace {

using namespace dub;

struct CliError {
    int code;
    std::string type;
    std::string message;
};

void emit_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty() || out_path == "-")
        std::cout << content;
    else
        write_file_atomic(out_path, content);
}

Fact parse_target(const std::string& spec, const SymbolTable& symbols, const Vocabulary& vocab) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
        if (i == spec.size() || spec[i] == '|') {
            parts.push_back(spec.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() != 3)
        throw ValidationError("target must be 'subject|relation|object', got '" + spec + "'");
    auto s = symbols.find(parts[0]);
    if (!s) throw ValidationError("unknown object '" + parts[0] + "'");
    auto o = symbols.find(parts[2]);
    if (!o) throw ValidationError("unknown object '" + parts[2] + "'");
    return Fact{*s, vocab.require(parts[1]), *o};
}

std::string format_target(const Fact& f, const SymbolTable& symbols, const Vocabulary& vocab) {
    return symbols.name(f.subject) + "|" + vocab.name(f.relation) + "|" + symbols.name(f.object);
}

RuleSet rules_for(const KbFile& kb_file, const std::string& rules_path) {
    if (rules_path.empty()) {
        const Vocabulary family = Vocabulary::family_default();
        if (kb_file.kb.vocabulary() == family) return default_rule_set();
        return parse_rule_file(default_rule_text(), kb_file.kb.vocabulary());
    }
    return parse_rule_file(read_file(rules_path), kb_file.kb.vocabulary());
}

// --- gen ---------------------------------------------------------------

struct GenArgs {
    std::string out_dir;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> persons, relation_facts, bio_facts;
};

int run_gen(const GenArgs& args) {
    GenConfig config;
    if (!args.config_path.empty()) config = load_gen_config_json(read_file(args.config_path));
    if (args.seed) config.seed = *args.seed;
    if (args.persons) config.person_target = *args.persons;
    if (args.relation_facts) config.relation_fact_target = *args.relation_facts;
    if (args.bio_facts) config.bio_fact_target = *args.bio_facts;

    const Dataset dataset = generate_dataset(config);
    write_dataset_bundle(dataset, args.out_dir);

    std::size_t relation_facts = 0, bio_facts = 0;
    for (const Fact& f : dataset.kb.facts())
        (dataset.kb.vocabulary().is_biography(f.relation) ? bio_facts : relation_facts) += 1;
    std::cerr << "wrote " << args.out_dir << ": " << dataset.graph.size() << " persons, "
              << relation_facts << " relation facts, " << bio_facts << " biography facts, "
              << dataset.ground.base.size() << " ground-truth kinship facts\n";
    return 0;
}

// --- rules check -------------------------------------------------------

int run_rules_check(const std::string& rules_path, const std::string& kb_path) {
    Vocabulary vocab = Vocabulary::family_default();
    if (!kb_path.empty()) vocab = load_kb_file(kb_path).kb.vocabulary();
    const std::string text = rules_path.empty() ? default_rule_text() : read_file(rules_path);
    const RuleSet rules = parse_rule_file(text, vocab);
    std::cout << "ok: " << rules.size() << " rules\n";
    return 0;
}

// --- closure -----------------------------------------------------------

struct ClosureArgs {
    std::string kb_path, rules_path, out_path, provenance_path;
    std::size_t max_derived = DeductionLimits{}.max_derived;
};

int run_closure(const ClosureArgs& args) {
    const KbFile kb_file = load_kb_file(args.kb_path);
    const RuleSet rules = rules_for(kb_file, args.rules_path);
    const ClosedKB closed = deductive_closure(kb_file.kb, rules, {args.max_derived});
    emit_output(save_closure_json(kb_file, closed), args.out_path);
    if (!args.provenance_path.empty())
        write_file_atomic(args.provenance_path, save_provenance_json(kb_file, closed));
    std::cerr << "closure: " << closed.base.size() << " base + " << closed.derived_count()
              << " derived = " << closed.closure.size() << " facts\n";
    return 0;
}

// --- mdus --------------------------------------------------------------

struct MdusArgs {
    std::string kb_path, rules_path, target_spec, out_path;
    std::uint64_t n_seed = 100, seed = 0;
    std::size_t max_derived = DeductionLimits{}.max_derived;
};

int run_mdus(const MdusArgs& args) {
    const KbFile kb_file = load_kb_file(args.kb_path);
    const RuleSet rules = rules_for(kb_file, args.rules_path);
    const Fact target = parse_target(args.target_spec, kb_file.symbols, kb_file.kb.vocabulary());
    const MinimalSetCollection collection =
        mdus(target, kb_file.kb, rules, args.n_seed, args.seed, {args.max_derived});
    emit_output(save_collection_json(collection, kb_file.symbols, kb_file.kb.vocabulary(),
                                     args.seed),
                args.out_path);
    std::size_t smallest = collection.sets.front().members.size();
    std::size_t largest = collection.sets.back().members.size();
    std::cerr << "mdus: " << collection.sets.size() << " distinct minimal sets (sizes "
              << smallest << ".." << largest << ") from " << args.n_seed << " runs\n";
    return 0;
}

// --- eval --------------------------------------------------------------

struct EvalArgs {
    std::string kb_path, collection_path, submission_path, out_path;
    std::string threshold = "0.8";
};

int run_eval(const EvalArgs& args) {
    const KbFile kb_file = load_kb_file(args.kb_path);
    const MinimalSetCollection collection = load_collection_json(
        read_file(args.collection_path), kb_file.symbols, kb_file.kb.vocabulary());
    std::size_t dropped = 0;
    const UnlearnSubmission submission =
        load_submission_json(read_file(args.submission_path), kb_file, &dropped);
    if (dropped > 0)
        std::cerr << "warning: dropped " << dropped << " removed facts not in the KB\n";
    const SweepReport report =
        evaluate_sweep(submission, kb_file.kb, collection, parse_decimal_ratio(args.threshold));
    emit_output(save_sweep_report_json(report, kb_file.symbols, kb_file.kb.vocabulary()),
                args.out_path);
    return 0;
}

// --- bench -------------------------------------------------------------

struct BenchArgs {
    std::string kb_path, rules_path, out_path;
    std::string model = "reference";
    std::string unlearner, submissions_dir;
    std::string threshold = "0.8";
    double p = 0.2;
    std::uint64_t n_seed = 100, seed = 0;
    int per_relation = 5;
    int jobs = 1;
    bool list_targets = false;
    std::size_t max_derived = DeductionLimits{}.max_derived;
};

constexpr std::uint64_t kTargetPhase = 0x7461726765747321ull;
constexpr std::uint64_t kRefPhase = 0x7265666572656e63ull;

std::vector<Fact> pick_bench_targets(const KnowledgeBase& kb, std::uint64_t seed,
                                     int per_relation) {
    Rng rng(mix_seed(seed, kTargetPhase));
    std::vector<Fact> targets;
    const Vocabulary& vocab = kb.vocabulary();
    for (RelationId r = 0; r < vocab.size(); ++r) {
        if (vocab.is_biography(r)) continue;
        std::vector<Fact> facts = kb.match(std::nullopt, r, std::nullopt);
        deterministic_shuffle(facts, rng);
        const std::size_t take = std::min<std::size_t>(facts.size(),
                                                       static_cast<std::size_t>(per_relation));
        targets.insert(targets.end(), facts.begin(), facts.begin() + take);
    }
    if (targets.empty()) throw ValidationError("KB has no kinship facts to pick targets from");
    return targets;
}

std::string target_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "target_%02zu.json", index);
    return buf;
}

ReferenceUnlearner parse_unlearner(const std::string& name) {
    if (name == "oracle") return ReferenceUnlearner::oracle_minimal;
    if (name == "target-only") return ReferenceUnlearner::target_only;
    if (name == "random-over") return ReferenceUnlearner::random_over;
    throw ValidationError("unknown unlearner '" + name +
                          "' (expected oracle, target-only or random-over)");
}

int run_bench(const BenchArgs& args) {
    const KbFile kb_file = load_kb_file(args.kb_path);
    const RuleSet rules = rules_for(kb_file, args.rules_path);
    const std::vector<Fact> targets =
        pick_bench_targets(kb_file.kb, args.seed, args.per_relation);

    if (args.list_targets) {
        std::string out;
        for (std::size_t i = 0; i < targets.size(); ++i)
            out += target_file_name(i) + "\t" +
                   format_target(targets[i], kb_file.symbols, kb_file.kb.vocabulary()) + "\n";
        emit_output(out, args.out_path);
        return 0;
    }

    const bool has_ref = !args.unlearner.empty();
    const bool has_dir = !args.submissions_dir.empty();
    if (has_ref == has_dir)
        throw ValidationError("exactly one of --unlearner and --submissions is required");
    const Ratio threshold = parse_decimal_ratio(args.threshold);
    const DeductionLimits limits{args.max_derived};

    std::vector<SweepReport> reports(targets.size());
    std::vector<std::exception_ptr> failures(targets.size());

    auto run_target = [&](std::size_t i) {
        const Fact target = targets[i];
        const std::uint64_t target_seed = mix_seed(args.seed, i);
        const MinimalSetCollection collection =
            mdus(target, kb_file.kb, rules, args.n_seed, target_seed, limits);
        UnlearnSubmission submission;
        if (has_ref) {
            submission = reference_unlearner(parse_unlearner(args.unlearner), target, kb_file.kb,
                                             collection, args.p, mix_seed(target_seed, kRefPhase));
        } else {
            const std::filesystem::path path =
                std::filesystem::path(args.submissions_dir) / target_file_name(i);
            submission = load_submission_json(read_file(path), kb_file);
            if (!(submission.target == target))
                throw ValidationError(path.string() + " is for target '" +
                                      format_target(submission.target, kb_file.symbols,
                                                    kb_file.kb.vocabulary()) +
                                      "', expected '" +
                                      format_target(target, kb_file.symbols,
                                                    kb_file.kb.vocabulary()) +
                                      "'");
        }
        reports[i] = evaluate_sweep(submission, kb_file.kb, collection, threshold);
    };

    const int jobs = std::max(1, args.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < targets.size(); ++i) run_target(i);
    } else {
        // Slot-per-target plan: any schedule produces identical reports.
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = static_cast<std::size_t>(w); i < targets.size();
                     i += static_cast<std::size_t>(jobs)) {
                    try {
                        run_target(i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : failures)
            if (e) std::rethrow_exception(e);
    }

    BenchmarkReport report = aggregate(reports);
    report.model = args.model;
    report.method = has_ref ? args.unlearner : "submissions";
    emit_output(
        save_benchmark_report_json(report, kb_file.symbols, kb_file.kb.vocabulary(), args.seed),
        args.out_path);

    auto describe = [](const MetricAggregate& a) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f±%.3f (%d imputed)", a.mean, a.std_dev, a.imputed);
        return std::string(buf);
    };
    std::cerr << "bench: " << targets.size() << " targets, model=" << report.model
              << " method=" << report.method
              << "  acc@recall=" << describe(report.acc_at_recall)
              << "  recall@acc=" << describe(report.recall_at_acc)
              << "  acc@superficial=" << describe(report.acc_at_superficial) << "\n";
    return 0;
}

// --- report ------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string grid_path, curves_path, svg_path;
};

std::string format3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string render_grid_csv(const std::vector<BenchmarkReport>& reports) {
    std::vector<std::string> models, methods;
    for (const BenchmarkReport& r : reports) {
        if (std::find(models.begin(), models.end(), r.model) == models.end())
            models.push_back(r.model);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
    }
    std::string out = "model";
    for (const std::string& m : methods)
        out += "," + m + "/acc_at_recall," + m + "/recall_at_acc";
    out += "\n";
    for (const std::string& model : models) {
        out += model;
        for (const std::string& method : methods) {
            const BenchmarkReport* found = nullptr;
            for (const BenchmarkReport& r : reports)
                if (r.model == model && r.method == method) {
                    found = &r;
                    break;
                }
            if (found)
                out += "," + format3(found->acc_at_recall.mean) + "," +
                       format3(found->recall_at_acc.mean);
            else
                out += ",,";
        }
        out += "\n";
    }
    return out;
}

std::string render_curves_csv(const std::vector<BenchmarkReport>& reports) {
    std::string out = "model,method,label,mean_accuracy,mean_recall\n";
    for (const BenchmarkReport& r : reports)
        for (const CurvePoint& c : r.curve)
            out += r.model + "," + r.method + "," + c.label + "," + format3(c.mean_accuracy) +
                   "," + format3(c.mean_recall) + "\n";
    return out;
}

std::string render_svg(const std::vector<BenchmarkReport>& reports) {
    static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const double width = 640, height = 480;
    const double x0 = 70, y0 = 420, plot_w = 380, plot_h = 360;
    auto px = [&](double recall) { return x0 + recall * plot_w; };
    auto py = [&](double acc) { return y0 - acc * plot_h; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format3(width) +
                      "\" height=\"" + format3(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = t / 5.0;
        svg += "<line x1=\"" + format3(px(v)) + "\" y1=\"" + format3(y0) + "\" x2=\"" +
               format3(px(v)) + "\" y2=\"" + format3(y0 + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + format3(px(v)) + "\" y=\"" + format3(y0 + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + format3(v) + "</text>\n";
        svg += "<line x1=\"" + format3(x0 - 5) + "\" y1=\"" + format3(py(v)) + "\" x2=\"" +
               format3(x0) + "\" y2=\"" + format3(py(v)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + format3(x0 - 10) + "\" y=\"" + format3(py(v) + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + format3(v) + "</text>\n";
    }
    svg += "<line x1=\"" + format3(x0) + "\" y1=\"" + format3(y0) + "\" x2=\"" +
           format3(x0 + plot_w) + "\" y2=\"" + format3(y0) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format3(x0) + "\" y1=\"" + format3(y0) + "\" x2=\"" + format3(x0) +
           "\" y2=\"" + format3(y0 - plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format3(x0 + plot_w / 2) + "\" y=\"" + format3(y0 + 40) +
           "\" font-size=\"14\" text-anchor=\"middle\">mean recall</text>\n";
    svg += "<text x=\"20\" y=\"" + format3(y0 - plot_h / 2) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           format3(y0 - plot_h / 2) + ")\">mean accuracy</text>\n";

    for (std::size_t i = 0; i < reports.size(); ++i) {
        const BenchmarkReport& r = reports[i];
        const char* color = kColors[i % std::size(kColors)];
        if (!r.curve.empty()) {
            std::string pts;
            for (const CurvePoint& c : r.curve)
                pts += format3(px(c.mean_recall)) + "," + format3(py(c.mean_accuracy)) + " ";
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
            for (const CurvePoint& c : r.curve)
                svg += "<circle cx=\"" + format3(px(c.mean_recall)) + "\" cy=\"" +
                       format3(py(c.mean_accuracy)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        const double ly = 40 + 18 * static_cast<double>(i);
        svg += "<rect x=\"480\" y=\"" + format3(ly - 9) +
               "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"498\" y=\"" + format3(ly + 2) + "\" font-size=\"12\">" + r.model +
               " / " + r.method + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

int run_report(const ReportArgs& args) {
    if (args.inputs.empty()) throw ValidationError("report needs at least one benchmark file");
    std::vector<BenchmarkReport> reports;
    for (const std::string& path : args.inputs) {
        SymbolTable symbols;
        Vocabulary vocab;
        reports.push_back(load_benchmark_report_json(read_file(path), symbols, vocab));
    }
    if (!args.grid_path.empty()) write_file_atomic(args.grid_path, render_grid_csv(reports));
    if (!args.curves_path.empty())
        write_file_atomic(args.curves_path, render_curves_csv(reports));
    if (!args.svg_path.empty()) write_file_atomic(args.svg_path, render_svg(reports));
    if (args.grid_path.empty() && args.curves_path.empty() && args.svg_path.empty())
        std::cout << render_grid_csv(reports);
    return 0;
}

// --- qa ----------------------------------------------------------------

int run_qa(const std::string& kb_path, const std::string& out_path) {
    const KbFile kb_file = load_kb_file(kb_path);
    emit_output(qa_jsonl(kb_file.kb, kb_file.symbols), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dub: deep unlearning of deducible facts in knowledge bases"};
    app.require_subcommand(1);
    bool json_errors = false;
    app.add_flag("--json-errors", json_errors, "report errors as JSON on stderr");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic family dataset bundle");
    gen->add_option("--out", gen_args.out_dir, "output directory")->required();
    gen->add_option("--config", gen_args.config_path, "generator config JSON");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--persons", gen_args.persons, "number of persons");
    gen->add_option("--relation-facts", gen_args.relation_facts, "kinship facts in the KB");
    gen->add_option("--bio-facts", gen_args.bio_facts, "biography facts in the KB");

    CLI::App* rules_cmd = app.add_subcommand("rules", "rule file utilities");
    rules_cmd->require_subcommand(1);
    std::string rules_check_path, rules_check_kb;
    CLI::App* rules_check = rules_cmd->add_subcommand("check", "parse and validate a rule file");
    rules_check->add_option("file", rules_check_path, "rule file (built-in rules when omitted)");
    rules_check->add_option("--kb", rules_check_kb, "KB whose relations the rules must use");

    ClosureArgs closure_args;
    CLI::App* closure = app.add_subcommand("closure", "compute the deductive closure of a KB");
    closure->add_option("--kb", closure_args.kb_path, "KB JSON file")->required();
    closure->add_option("--rules", closure_args.rules_path, "rule file (built-in when omitted)");
    closure->add_option("--out", closure_args.out_path, "output file ('-' for stdout)");
    closure->add_option("--provenance", closure_args.provenance_path,
                        "also write witness derivations here");
    closure->add_option("--max-derived", closure_args.max_derived, "derived fact cap");

    MdusArgs mdus_args;
    CLI::App* mdus_cmd =
        app.add_subcommand("mdus", "enumerate minimal deep-unlearning sets for a target");
    mdus_cmd->add_option("--kb", mdus_args.kb_path, "KB JSON file")->required();
    mdus_cmd->add_option("--rules", mdus_args.rules_path, "rule file (built-in when omitted)");
    mdus_cmd->add_option("--target", mdus_args.target_spec, "target fact 'subject|relation|object'")
        ->required();
    mdus_cmd->add_option("--n-seed", mdus_args.n_seed, "number of randomized runs");
    mdus_cmd->add_option("--seed", mdus_args.seed, "master seed");
    mdus_cmd->add_option("--out", mdus_args.out_path, "output file ('-' for stdout)");
    mdus_cmd->add_option("--max-derived", mdus_args.max_derived, "derived fact cap");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a submission against a collection");
    eval_cmd->add_option("--kb", eval_args.kb_path, "KB JSON file")->required();
    eval_cmd->add_option("--collection", eval_args.collection_path, "minimal-set collection JSON")
        ->required();
    eval_cmd->add_option("--submission", eval_args.submission_path, "submission JSON")->required();
    eval_cmd->add_option("--threshold", eval_args.threshold, "recall/accuracy threshold");
    eval_cmd->add_option("--out", eval_args.out_path, "output file ('-' for stdout)");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "run the multi-target benchmark protocol");
    bench->add_option("--kb", bench_args.kb_path, "KB JSON file")->required();
    bench->add_option("--rules", bench_args.rules_path, "rule file (built-in when omitted)");
    bench->add_option("--model", bench_args.model, "model name for the report");
    bench->add_option("--unlearner", bench_args.unlearner,
                      "reference unlearner: oracle, target-only or random-over");
    bench->add_option("--submissions", bench_args.submissions_dir,
                      "directory of target_NN.json submissions");
    bench->add_option("--p", bench_args.p, "over-removal probability for random-over");
    bench->add_option("--n-seed", bench_args.n_seed, "randomized runs per target");
    bench->add_option("--seed", bench_args.seed, "master seed");
    bench->add_option("--threshold", bench_args.threshold, "recall/accuracy threshold");
    bench->add_option("--per-relation", bench_args.per_relation, "targets per kinship relation");
    bench->add_option("--jobs", bench_args.jobs, "worker threads");
    bench->add_flag("--list-targets", bench_args.list_targets,
                    "print the target list and expected submission file names, then exit");
    bench->add_option("--out", bench_args.out_path, "output file ('-' for stdout)");
    bench->add_option("--max-derived", bench_args.max_derived, "derived fact cap");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "combine benchmark reports into tables");
    report->add_option("inputs", report_args.inputs, "benchmark report JSON files")->required();
    report->add_option("--grid", report_args.grid_path, "write the model x method grid CSV here");
    report->add_option("--curves", report_args.curves_path, "write the curve CSV here");
    report->add_option("--svg", report_args.svg_path, "write an accuracy/recall plot here");

    std::string qa_kb_path, qa_out_path;
    CLI::App* qa = app.add_subcommand("qa", "render question/answer pairs for a KB");
    qa->add_option("--kb", qa_kb_path, "KB JSON file")->required();
    qa->add_option("--out", qa_out_path, "output file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    auto fail = [&](const CliError& err) {
        if (json_errors) {
            std::cerr << "{\"error\":{\"type\":\"" << err.type << "\",\"message\":"
                      << nlohmann::json(err.message).dump() << "}}\n";
        } else {
            std::cerr << "error: " << err.message << "\n";
        }
        return err.code;
    };

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (rules_check->parsed()) return run_rules_check(rules_check_path, rules_check_kb);
        if (closure->parsed()) return run_closure(closure_args);
        if (mdus_cmd->parsed()) return run_mdus(mdus_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (report->parsed()) return run_report(report_args);
        if (qa->parsed()) return run_qa(qa_kb_path, qa_out_path);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ResourceLimitError& e) {
        return fail({3, "resource", e.what()});
    } catch (const ParseError& e) {
        return fail({2, "parse", e.what()});
    } catch (const ValidationError& e) {
        return fail({2, "validation", e.what()});
    } catch (const Error& e) {
        return fail({2, "error", e.what()});
    } catch (const std::exception& e) {
        return fail({2, "internal", e.what()});
    }
}
