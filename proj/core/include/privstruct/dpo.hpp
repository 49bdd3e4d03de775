#pragma once

#include "privstruct/corpus.hpp"
#include "privstruct/headings.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace privstruct {

enum class MismatchKind { Match, MissedHeading, UniformLevels, SentenceAsHeading, Other };

std::string_view to_string(MismatchKind kind);

/// One preference example: the teacher's tagged output is chosen, the
/// student's (or an augmented sentence) rejected.
struct PreferencePair {
    std::string prompt;    // chunk text + extraction instructions
    std::string chosen;
    std::string rejected;
    MismatchKind mismatch_kind = MismatchKind::Other;
    ChunkId chunk_id;
    bool augmented = false;  // rejected is the first non-heading sentence
};

// Compares two parsed extractions as ordered (normalized text, level)
// sequences. First matching rule wins: MissedHeading, then UniformLevels,
// then SentenceAsHeading, then Other.
MismatchKind diff_extractions(const std::vector<HeadingNode>& teacher,
                              const std::vector<HeadingNode>& student);

// First sentence (split on [.?!] + whitespace) whose normalized text matches
// no heading text; empty when the chunk has no such sentence.
std::string first_non_heading_sentence(const Chunk& chunk,
                                       const std::vector<HeadingNode>& headings);

class DpoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DpoDataset {
    std::vector<PreferencePair> pairs;  // (chunk order, base before augmented)
    std::size_t chunk_count = 0;
    std::size_t mismatch_count = 0;
    std::size_t missed_heading_count = 0;
    std::size_t augmented_count = 0;
    double beta = 0.4;  // deviation-penalty metadata for downstream trainers
};

// Pairs mismatched chunks; floor(aug_fraction * missed_heading_count) of the
// MissedHeading chunks (seeded uniform choice) get an additional pair whose
// rejected output is the chunk's first non-heading sentence.
// Inputs are aligned by index with `chunks`; misalignment (by count) throws
// DpoError listing the orphan side.
DpoDataset build_dataset(const std::vector<Chunk>& chunks,
                         const std::vector<std::string>& teacher_out,
                         const std::vector<std::string>& student_out,
                         double aug_fraction, std::uint64_t seed,
                         const std::string& instructions = {});

// JSON-Lines serialization: one object per pair with keys prompt, chosen,
// rejected, mismatch_kind, chunk_id.
std::string to_jsonl(const DpoDataset& dataset);

}  // namespace privstruct
