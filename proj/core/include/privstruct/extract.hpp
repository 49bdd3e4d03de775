#pragma once

#include "privstruct/corpus.hpp"
#include "privstruct/headings.hpp"
#include "privstruct/taxonomy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace privstruct {

/// One {data excerpt, purpose excerpt} pair from a chunk. Either side may be
/// empty, never both. Labels attach after the classification pass.
struct ExtractionTuple {
    std::string data_excerpt;
    std::string purpose_excerpt;
    ChunkId chunk_id;
    std::optional<std::size_t> section_index;  // section the chunk midpoint falls in
    std::optional<ItemLabel> item_label;
    std::optional<PurposeLabel> purpose_label;
};

class TupleParseError : public std::runtime_error {
public:
    TupleParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Parses the backend's JSON array of {"data": ..., "purpose": ...} objects.
// Both-empty objects are dropped; unknown keys ignored. Throws TupleParseError
// with the byte offset on malformed input.
std::vector<ExtractionTuple> parse_tuple_output(const std::string& backend_text);

/// Per-chunk generative extraction contract. Remote implementations POST
/// {chunk_id, text, instructions} and read back {tuples_text}.
class ExtractionBackend {
public:
    virtual ~ExtractionBackend() = default;
    virtual std::string extract(const Chunk& chunk) = 0;  // throws BackendError
    virtual std::string id() const = 0;
};

struct ExtractTuplesResult {
    std::vector<ExtractionTuple> tuples;
    std::vector<std::string> dropped_excerpts;  // hallucinated, not grounded in chunk
};

// Runs the backend on one chunk, drops excerpts that do not occur (case-folded,
// whitespace-normalized) in the chunk text, and attaches the section the chunk
// midpoint falls in when a tree is supplied.
ExtractTuplesResult extract_tuples(const Chunk& chunk, ExtractionBackend& backend,
                                   const HeadingTree* tree = nullptr);

// Attaches the section index for the chunk midpoint (nearest preceding content
// section when the midpoint lands inside heading text).
std::optional<std::size_t> section_for_offset(const HeadingTree& tree, std::size_t offset);

struct MentionCounts {
    std::size_t n_item_mentions = 0;
    std::size_t n_purpose_mentions = 0;
    std::size_t n_purpose_categories = 0;
};

// Uniqueness by normalized excerpt string (case-fold, collapse whitespace,
// strip terminal punctuation). Idempotent under input duplication.
MentionCounts count_unique_mentions(const std::vector<ExtractionTuple>& policy_tuples);

/// Deterministic rule-based extractor: sentence-level keyword spotting with
/// "to ..."/"for ..." purpose clauses. The audit pipeline's offline default.
class HeuristicExtractionBackend : public ExtractionBackend {
public:
    std::string extract(const Chunk& chunk) override;
    std::string id() const override { return "heuristic"; }
};

}  // namespace privstruct
