#pragma once

#include "privstruct/corpus.hpp"
#include "privstruct/taxonomy.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace privstruct {

enum class HeadingLevel { Main, Sub };

struct HeadingNode {
    std::string text;          // verbatim document substring at char_offset
    HeadingLevel level = HeadingLevel::Main;
    std::size_t char_offset = 0;
    double norm_position = 0.0;  // char_offset / document length
    std::optional<PracticeLabel> practice;
    std::optional<IntentionLabel> intention;
};

/// Content between a heading and the next one (or document end). A heading-less
/// section is the preamble before the first heading.
struct Section {
    std::optional<std::size_t> heading_index;  // into HeadingTree::nodes
    std::size_t content_begin = 0;
    std::size_t content_end = 0;
    // Section-content practice label from the text route (positional profiles
    // compare it against the heading route).
    std::optional<PracticeLabel> text_practice;
};

struct HeadingTree {
    std::vector<HeadingNode> nodes;  // document order, strictly increasing offsets
    std::vector<Section> sections;
    bool empty_result = false;       // backend produced no usable headings
};

struct TagDiagnostic {
    enum class Kind { MalformedLine, UnmatchedHeading };
    Kind kind;
    std::string line;
};

struct TaggedParseResult {
    std::vector<HeadingNode> nodes;
    std::vector<TagDiagnostic> diagnostics;
    bool empty_result = false;  // zero matched headings
};

// Parses "<main>TEXT</main>" / "<sub>TEXT</sub>" lines and re-anchors each TEXT
// to the document (case-insensitive, whitespace-normalized, left-to-right
// cursor so repeated headings resolve in order). Unmatched or malformed lines
// land in diagnostics, never silently dropped.
TaggedParseResult parse_tagged_output(const std::string& backend_text,
                                      const PolicyDocument& doc);

// Deterministic baseline: short unpunctuated title-case / ALL-CAPS / numbered
// lines become headings.
std::vector<HeadingNode> heuristic_headings(const PolicyDocument& doc);

/// Per-chunk heading extraction contract. Remote implementations POST
/// {policy_id, chunk_id, text, instructions} and read back {tagged_text}.
class HeadingBackend {
public:
    virtual ~HeadingBackend() = default;
    virtual std::string tag_chunk(const Chunk& chunk) = 0;  // throws BackendError
    virtual std::string id() const = 0;
};

class BackendError : public std::runtime_error {
public:
    BackendError(std::string chunk_id, const std::string& what)
        : std::runtime_error(what), chunk_id_(std::move(chunk_id)) {}
    const std::string& chunk_id() const noexcept { return chunk_id_; }

private:
    std::string chunk_id_;
};

struct ExtractHeadingsResult {
    HeadingTree tree;
    std::vector<TagDiagnostic> diagnostics;
};

// Runs the backend per 512-token chunk, re-anchors chunk-relative matches to
// document offsets, merges by (offset, text) and establishes tree invariants.
ExtractHeadingsResult extract_headings(const PolicyDocument& doc, HeadingBackend& backend,
                                       std::size_t max_tokens = 512);

HeadingTree build_tree(std::vector<HeadingNode> nodes, const PolicyDocument& doc);

std::vector<Section> segment(const PolicyDocument& doc, const HeadingTree& tree);

struct FitmentReport {
    std::vector<std::size_t> inter_heading_lengths;  // content chars per heading
    double median = 0.0;
    double iqr = 0.0;  // Q3 - Q1, linear interpolation
    std::size_t heading_count = 0;

    // Appendix-style pathology: fires iff at least ceil(25%) of the
    // inter-heading lengths are zero (empirical lower quartile at zero).
    bool lower_quartile_zero() const;
};

FitmentReport fitment_stats(const HeadingTree& tree, const PolicyDocument& doc);

enum class FailureMode { UniformLevels, SentenceAsHeading, SparseHeadings };

struct FailureThresholds {
    std::size_t uniform_min_count = 4;
    std::size_t sentence_max_tokens = 20;
    std::size_t sparse_bytes_per_heading = 4096;
};

std::vector<FailureMode> detect_failure_modes(const HeadingTree& tree,
                                              const PolicyDocument& doc,
                                              const FailureThresholds& thresholds = {});

// Linear-interpolation quantile over an unsorted sample (q in [0,1]).
double quantile(std::vector<double> values, double q);

}  // namespace privstruct
