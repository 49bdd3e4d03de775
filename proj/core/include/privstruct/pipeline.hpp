#pragma once

#include "privstruct/backends.hpp"
#include "privstruct/compliance.hpp"
#include "privstruct/corpus.hpp"
#include "privstruct/dilution.hpp"
#include "privstruct/dpo.hpp"
#include "privstruct/linking.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace privstruct {

struct BackendSelection {
    std::string kind = "heuristic";  // "heuristic" | "lexicon" | "remote"
    RemoteConfig remote;             // used when kind == "remote"
};

struct PipelineConfig {
    BackendSelection heading_backend;
    BackendSelection extraction_backend;
    BackendSelection classifier_backend{.kind = "lexicon"};
    FeedMode feed_mode = FeedMode::Multiple;

    std::size_t chunk_budget = 512;
    std::uint64_t seed = 0;
    DisclosureScope dilution_scope = DisclosureScope::PlusFloating;
    std::size_t n_bins = 20;
    double aug_fraction = 0.5;
    double dpo_beta = 0.4;
    std::size_t workers = 1;

    std::string corpus_dir;
    std::string ds_dir;
    std::string mapping_table;   // optional category-map CSV
    std::string out_dir;
    std::string cache_dir;       // PRIVSTRUCT_CACHE_DIR overrides
    std::string bench_reference; // optional CSV for cmd_bench
    std::string config_path;     // for the run-manifest hash
};

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// TOML-style key/value config ([section] headers flatten to "section.key").
std::map<std::string, std::string> load_config_file(const std::string& path);
PipelineConfig config_from_file(const std::string& path);
void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value);

struct ManifestEntry {
    std::string policy_id;
    std::string app_id;
    std::uint64_t downloads = 0;
    std::string category;
};

struct LoadedCorpus {
    std::vector<PolicyDocument> documents;  // sorted by policy_id, deduplicated
    std::map<std::string, ManifestEntry> manifest;  // by policy_id
};

// Reads <policy_id>.{txt,html} files plus the manifest CSV binding each
// policy to its most-downloaded app.
LoadedCorpus load_corpus(const std::string& corpus_dir,
                         const std::string& manifest_csv = {});

struct PolicyFailure {
    std::string policy_id;
    std::string reason;
};

struct ParseRow {
    std::string policy_id;
    std::size_t heading_count = 0;
    double median = 0.0;
    double iqr = 0.0;
    std::vector<FailureMode> flags;
};

struct ParseRunResult {
    std::vector<ParseRow> rows;
    std::vector<PolicyFailure> failures;
    int exit_code = 0;  // nonzero iff every policy failed
};

ParseRunResult cmd_parse(const PipelineConfig& config);

struct AuditRunResult {
    // (practice, scope) -> matrix; deltas derived per practice.
    std::map<std::pair<PracticeLabel, DisclosureScope>, ComplianceMatrix> matrices;
    std::vector<PolicyFailure> failures;
    std::size_t policies_audited = 0;
    int exit_code = 0;
};

AuditRunResult cmd_audit(const PipelineConfig& config);

struct DpoRunResult {
    DpoDataset dataset;
    double mismatch_rate = 0.0;
    double missed_heading_rate = 0.0;
    int exit_code = 0;
};

DpoRunResult cmd_dpo_build(const PipelineConfig& config, const std::string& teacher_dir,
                           const std::string& student_dir);

struct BenchRow {
    std::string policy_id;
    MentionCounts counts;
    bool in_reference = true;
};

struct BenchRunResult {
    std::vector<BenchRow> rows;
    double avg_item_mentions = 0.0;
    double avg_purpose_mentions = 0.0;
    double avg_purpose_categories = 0.0;
    std::size_t policies_compared = 0;
    int exit_code = 0;
};

BenchRunResult cmd_bench(const PipelineConfig& config);

// Re-emits a human-readable summary from an existing audit output directory.
int cmd_report(const std::string& out_dir);

}  // namespace privstruct
