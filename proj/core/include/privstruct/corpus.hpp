#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace privstruct {

/// One sanitized privacy policy. The corpus unit is one policy per developer,
/// mapped to that developer's most downloaded app (app_refs front).
struct PolicyDocument {
    std::string policy_id;
    std::string text;               // flattened, no markup
    std::size_t size_bytes = 0;     // byte length of sanitized text
    std::vector<std::string> app_refs;
};

struct ChunkId {
    std::string policy_id;
    std::size_t ordinal = 0;

    bool operator==(const ChunkId&) const = default;
    std::string str() const { return policy_id + ":" + std::to_string(ordinal); }
};

/// Contiguous, non-overlapping slice of a document. Concatenating chunk texts
/// in ordinal order byte-equals the source text.
struct Chunk {
    ChunkId chunk_id;
    std::size_t token_begin = 0;  // index of first token
    std::size_t token_end = 0;    // one past last token
    std::size_t char_begin = 0;   // byte offset in document
    std::size_t char_end = 0;
    std::string text;
};

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strips markup (when is_html), collapses horizontal whitespace runs to single
// spaces, preserves line breaks (line structure is a heading cue).
// Throws text::Utf8Error on invalid input naming the byte offset.
PolicyDocument sanitize(const std::string& raw, bool is_html,
                        const std::string& policy_id = {});

// Splits into <= max_tokens whitespace-token chunks, preferring blank-line
// boundaries, then sentence ends, then plain token boundaries.
std::vector<Chunk> chunk(const PolicyDocument& doc, std::size_t max_tokens = 512);

// Keeps documents with size_bytes strictly below max_kb * 1024, order preserved.
std::vector<PolicyDocument> size_filter(const std::vector<PolicyDocument>& corpus,
                                        double max_kb = 50.0);

// Seeded uniform draw of per_bucket documents from each 10KB size bucket
// (k = 0..num_buckets-1). Output sorted by policy_id. Throws CorpusError
// naming any undersized bucket.
std::vector<PolicyDocument> stratified_sample(const std::vector<PolicyDocument>& corpus,
                                              double bucket_kb, std::size_t per_bucket,
                                              std::uint64_t seed,
                                              std::size_t num_buckets = 5);

// Seeded per-bucket train/test split preserving the stratification.
struct CorpusSplit {
    std::vector<PolicyDocument> train;
    std::vector<PolicyDocument> test;
};
CorpusSplit stratified_split(const std::vector<PolicyDocument>& sample,
                             double bucket_kb, std::size_t test_per_bucket,
                             std::uint64_t seed);

// Content-hash dedup; keeps the first document per distinct text.
std::vector<PolicyDocument> dedup_by_content(const std::vector<PolicyDocument>& corpus);

}  // namespace privstruct
