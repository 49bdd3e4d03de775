#include "privstruct/dpo.hpp"

#include "privstruct/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>
#include <unordered_set>

namespace privstruct {

std::string_view to_string(MismatchKind kind) {
    switch (kind) {
        case MismatchKind::Match: return "Match";
        case MismatchKind::MissedHeading: return "MissedHeading";
        case MismatchKind::UniformLevels: return "UniformLevels";
        case MismatchKind::SentenceAsHeading: return "SentenceAsHeading";
        default: return "Other";
    }
}

namespace {

bool sentence_like(const HeadingNode& node) {
    const std::string trimmed = text::trim(node.text);
    return text::count_tokens(node.text) > 20 || (!trimmed.empty() && trimmed.back() == '.');
}

bool uniform_levels(const std::vector<HeadingNode>& nodes) {
    if (nodes.size() < 2) return false;
    const auto level = nodes.front().level;
    return std::all_of(nodes.begin(), nodes.end(),
                       [&](const auto& n) { return n.level == level; });
}

}  // namespace

MismatchKind diff_extractions(const std::vector<HeadingNode>& teacher,
                              const std::vector<HeadingNode>& student) {
    auto key = [](const HeadingNode& n) {
        return std::make_pair(text::normalize(n.text), n.level);
    };
    if (teacher.size() == student.size()) {
        bool equal = true;
        for (std::size_t i = 0; i < teacher.size(); ++i) {
            if (key(teacher[i]) != key(student[i])) {
                equal = false;
                break;
            }
        }
        if (equal) return MismatchKind::Match;
    }
    std::unordered_set<std::string> student_texts;
    for (const auto& n : student) student_texts.insert(text::normalize(n.text));
    for (const auto& n : teacher) {
        if (student_texts.count(text::normalize(n.text)) == 0) {
            return MismatchKind::MissedHeading;
        }
    }
    if (uniform_levels(student) && !uniform_levels(teacher)) {
        return MismatchKind::UniformLevels;
    }
    if (std::any_of(student.begin(), student.end(), sentence_like)) {
        return MismatchKind::SentenceAsHeading;
    }
    return MismatchKind::Other;
}

std::string first_non_heading_sentence(const Chunk& chunk,
                                       const std::vector<HeadingNode>& headings) {
    std::unordered_set<std::string> heading_texts;
    for (const auto& n : headings) heading_texts.insert(text::normalize(n.text));
    for (const auto& span : text::split_sentences(chunk.text)) {
        std::string sentence =
            text::trim(std::string_view(chunk.text).substr(span.begin, span.end - span.begin));
        // Unpunctuated headings glue onto the following sentence; peel them off.
        std::size_t from = 0;
        while (true) {
            const std::size_t nl = sentence.find('\n', from);
            if (nl == std::string::npos) break;
            const std::string line = text::trim(sentence.substr(from, nl - from));
            if (heading_texts.count(text::normalize(line)) == 0) break;
            from = nl + 1;
        }
        if (from > 0) sentence = text::trim(sentence.substr(from));
        if (sentence.empty()) continue;
        if (heading_texts.count(text::normalize(sentence)) > 0) continue;
        return sentence;
    }
    return {};
}

DpoDataset build_dataset(const std::vector<Chunk>& chunks,
                         const std::vector<std::string>& teacher_out,
                         const std::vector<std::string>& student_out,
                         double aug_fraction, std::uint64_t seed,
                         const std::string& instructions) {
    if (chunks.size() != teacher_out.size() || chunks.size() != student_out.size()) {
        std::string msg = "build_dataset: misaligned inputs (chunks " +
                          std::to_string(chunks.size()) + ", teacher " +
                          std::to_string(teacher_out.size()) + ", student " +
                          std::to_string(student_out.size()) + "); orphan chunk_ids:";
        const std::size_t lo = std::min({chunks.size(), teacher_out.size(), student_out.size()});
        for (std::size_t i = lo; i < chunks.size(); ++i) {
            msg += " " + chunks[i].chunk_id.str();
        }
        throw DpoError(msg);
    }
    if (aug_fraction < 0.0 || aug_fraction > 1.0) {
        throw DpoError("build_dataset: aug_fraction must be in [0, 1]");
    }

    DpoDataset dataset;
    dataset.chunk_count = chunks.size();

    struct ChunkRecord {
        MismatchKind kind;
        std::vector<HeadingNode> teacher_nodes;
    };
    std::vector<ChunkRecord> records(chunks.size(), {MismatchKind::Match, {}});
    std::vector<std::size_t> missed;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        PolicyDocument chunk_doc;
        chunk_doc.policy_id = chunks[i].chunk_id.policy_id;
        chunk_doc.text = chunks[i].text;
        chunk_doc.size_bytes = chunks[i].text.size();
        auto teacher = parse_tagged_output(teacher_out[i], chunk_doc);
        auto student = parse_tagged_output(student_out[i], chunk_doc);
        records[i].kind = diff_extractions(teacher.nodes, student.nodes);
        records[i].teacher_nodes = std::move(teacher.nodes);
        if (records[i].kind == MismatchKind::MissedHeading) missed.push_back(i);
    }

    dataset.missed_heading_count = missed.size();
    const auto aug_count = static_cast<std::size_t>(
        std::floor(aug_fraction * static_cast<double>(missed.size())));
    std::unordered_set<std::size_t> augment;
    {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> pool = missed;
        for (std::size_t i = 0; i < aug_count; ++i) {
            std::uniform_int_distribution<std::size_t> dist(i, pool.size() - 1);
            std::swap(pool[i], pool[dist(rng)]);
            augment.insert(pool[i]);
        }
    }

    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (records[i].kind == MismatchKind::Match) continue;
        ++dataset.mismatch_count;
        PreferencePair base;
        base.prompt = instructions.empty() ? chunks[i].text
                                           : chunks[i].text + "\n\n" + instructions;
        base.chosen = teacher_out[i];
        base.rejected = student_out[i];
        base.mismatch_kind = records[i].kind;
        base.chunk_id = chunks[i].chunk_id;
        dataset.pairs.push_back(base);
        if (augment.count(i) > 0) {
            PreferencePair aug = base;
            aug.rejected = first_non_heading_sentence(chunks[i], records[i].teacher_nodes);
            aug.augmented = true;
            if (text::normalize(aug.rejected) != text::normalize(aug.chosen)) {
                dataset.pairs.push_back(std::move(aug));
                ++dataset.augmented_count;
            }
        }
    }
    return dataset;
}

std::string to_jsonl(const DpoDataset& dataset) {
    std::string out;
    for (const auto& pair : dataset.pairs) {
        nlohmann::json line = {{"prompt", pair.prompt},
                               {"chosen", pair.chosen},
                               {"rejected", pair.rejected},
                               {"mismatch_kind", std::string(to_string(pair.mismatch_kind))},
                               {"chunk_id", pair.chunk_id.str()}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace privstruct
