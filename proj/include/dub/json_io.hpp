#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dub/genkb.hpp"
#include "dub/metrics.hpp"
#include "dub/unlearn.hpp"

namespace dub {

// A KB file couples the fact set with the object names it refers to.
struct KbFile {
    SymbolTable symbols;
    KnowledgeBase kb;
};

// {"objects":[{"id":..,"name":..}], "relations":[..], "facts":[[s,r,o]..]}
// Facts may be id triples (indexes into objects/relations) or name triples;
// duplicates are dropped.
KbFile load_kb_json(const std::string& text);
std::string save_kb_json(const KbFile& kb_file);

KbFile load_kb_file(const std::filesystem::path& path);

std::string save_closure_json(const KbFile& base, const ClosedKB& closed);
std::string save_provenance_json(const KbFile& base, const ClosedKB& closed);

// {"target":[s,r,o], "n_seed":n, "sets":[[[s,r,o],..],..]} with name triples.
std::string save_collection_json(const MinimalSetCollection& collection,
                                 const SymbolTable& symbols, const Vocabulary& vocab,
                                 std::uint64_t seed);
MinimalSetCollection load_collection_json(const std::string& text, const SymbolTable& symbols,
                                          const Vocabulary& vocab);

// {"target":[s,r,o], "sweep":[{"label":..,"removed":[[s,r,o],..]},..]}
// Removed facts outside the KB are dropped; dropped_count reports how many.
UnlearnSubmission load_submission_json(const std::string& text, const KbFile& kb_file,
                                       std::size_t* dropped_count = nullptr);
std::string save_submission_json(const UnlearnSubmission& submission,
                                 const SymbolTable& symbols, const Vocabulary& vocab);

std::string save_sweep_report_json(const SweepReport& report, const SymbolTable& symbols,
                                   const Vocabulary& vocab);
std::string save_benchmark_report_json(const BenchmarkReport& report, const SymbolTable& symbols,
                                       const Vocabulary& vocab, std::uint64_t seed);
BenchmarkReport load_benchmark_report_json(const std::string& text, SymbolTable& symbols,
                                           Vocabulary& vocab);

// "label,mean_accuracy,mean_recall" rows for one report's curve.
std::string curve_csv(const BenchmarkReport& report);

GenConfig load_gen_config_json(const std::string& text);
std::string save_gen_config_json(const GenConfig& config);

std::string persons_csv(const FamilyGraph& graph);
std::string qa_jsonl(const KnowledgeBase& kb, const SymbolTable& symbols);

// kb.json, ground.json, rules.txt, qa.jsonl, config.json, persons.csv.
// Writes are atomic (temp file + rename); same dataset => byte-identical.
void write_dataset_bundle(const Dataset& dataset, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dub
