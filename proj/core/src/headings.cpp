#include "privstruct/headings.hpp"

#include "privstruct/text.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

namespace privstruct {

TaggedParseResult parse_tagged_output(const std::string& backend_text,
                                      const PolicyDocument& doc) {
    static const std::regex tag_re(R"(^<(main|sub)>(.*)</(main|sub)>$)");
    TaggedParseResult result;
    const auto view = text::make_normalized_view(doc.text);
    std::size_t cursor = 0;  // normalized-space search cursor

    for (const auto& line_span : text::split_lines(backend_text)) {
        std::string line = text::trim(
            std::string_view(backend_text).substr(line_span.begin,
                                                  line_span.end - line_span.begin));
        if (line.empty()) continue;
        std::smatch m;
        if (!std::regex_match(line, m, tag_re) || m[1].str() != m[3].str()) {
            result.diagnostics.push_back({TagDiagnostic::Kind::MalformedLine, line});
            continue;
        }
        const std::string needle = text::normalize(m[2].str());
        if (needle.empty()) {
            result.diagnostics.push_back({TagDiagnostic::Kind::MalformedLine, line});
            continue;
        }
        std::size_t norm_pos = 0;
        auto span = view.find(needle, cursor, &norm_pos);
        if (!span) {
            result.diagnostics.push_back({TagDiagnostic::Kind::UnmatchedHeading, line});
            continue;
        }
        cursor = norm_pos + needle.size();
        HeadingNode node;
        node.text = doc.text.substr(span->first, span->second - span->first);
        node.level = m[1].str() == "main" ? HeadingLevel::Main : HeadingLevel::Sub;
        node.char_offset = span->first;
        node.norm_position =
            doc.text.empty() ? 0.0
                             : static_cast<double>(span->first) /
                                   static_cast<double>(doc.text.size());
        result.nodes.push_back(std::move(node));
    }
    result.empty_result = result.nodes.empty();
    return result;
}

namespace {

bool is_all_caps(std::string_view line) {
    bool has_letter = false;
    for (char c : line) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::islower(uc)) return false;
        if (std::isupper(uc)) has_letter = true;
    }
    return has_letter;
}

// Matches "3", "3.", "3.1", "3.1.2)" etc. Returns nesting depth (dot count + 1),
// or 0 when not numbered.
std::size_t numbering_depth(std::string_view line) {
    std::size_t i = 0;
    if (i >= line.size() || std::isdigit(static_cast<unsigned char>(line[i])) == 0) return 0;
    std::size_t depth = 1;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    while (i + 1 < line.size() && line[i] == '.' &&
           std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
        ++depth;
        ++i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    }
    if (i < line.size() && (line[i] == '.' || line[i] == ')')) ++i;
    if (i < line.size() && !text::is_space(line[i])) return 0;
    return depth;
}

bool is_title_case(std::string_view line) {
    const auto tokens = text::tokenize(line);
    std::size_t alpha_tokens = 0, capitalized = 0;
    for (const auto& t : tokens) {
        const char first = line[t.begin];
        const auto uc = static_cast<unsigned char>(first);
        if (std::isalpha(uc) == 0) continue;
        ++alpha_tokens;
        if (std::isupper(uc)) ++capitalized;
    }
    if (alpha_tokens == 0) return false;
    const char lead = line[tokens.front().begin];
    if (std::isupper(static_cast<unsigned char>(lead)) == 0) return false;
    return capitalized * 2 >= alpha_tokens;
}

}  // namespace

std::vector<HeadingNode> heuristic_headings(const PolicyDocument& doc) {
    std::vector<HeadingNode> nodes;
    const std::string_view src(doc.text);
    bool saw_candidate = false;
    for (const auto& line_span : text::split_lines(src)) {
        const std::string_view raw = src.substr(line_span.begin,
                                                line_span.end - line_span.begin);
        std::size_t lead = 0;
        while (lead < raw.size() && text::is_space(raw[lead])) ++lead;
        const std::string_view line = raw.substr(lead);
        std::size_t tail = line.size();
        while (tail > 0 && text::is_space(line[tail - 1])) --tail;
        const std::string_view trimmed = line.substr(0, tail);
        if (trimmed.empty()) continue;
        if (trimmed.back() == '.') continue;  // terminal period: prose, not heading
        if (text::count_tokens(trimmed) > 12) continue;

        const std::size_t depth = numbering_depth(trimmed);
        const bool caps = is_all_caps(trimmed);
        if (depth == 0 && !caps && !is_title_case(trimmed)) continue;

        HeadingLevel level;
        if (depth > 0) {
            level = depth == 1 ? HeadingLevel::Main : HeadingLevel::Sub;
        } else if (caps) {
            level = HeadingLevel::Main;
        } else {
            const bool indented = lead > 0;
            level = (indented && saw_candidate) ? HeadingLevel::Sub : HeadingLevel::Main;
        }
        HeadingNode node;
        node.text = std::string(trimmed);
        node.level = level;
        node.char_offset = line_span.begin + lead;
        node.norm_position = doc.text.empty()
                                 ? 0.0
                                 : static_cast<double>(node.char_offset) /
                                       static_cast<double>(doc.text.size());
        nodes.push_back(std::move(node));
        saw_candidate = true;
    }
    return nodes;
}

HeadingTree build_tree(std::vector<HeadingNode> nodes, const PolicyDocument& doc) {
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) {
        if (a.char_offset != b.char_offset) return a.char_offset < b.char_offset;
        return a.text < b.text;
    });
    // Dedup by (offset, text); chunk retries may report the same heading twice.
    std::vector<HeadingNode> unique;
    for (auto& n : nodes) {
        if (!unique.empty() && unique.back().char_offset == n.char_offset &&
            unique.back().text == n.text) {
            continue;
        }
        unique.push_back(std::move(n));
    }
    // Strictly increasing offsets: drop overlapping duplicates at equal offsets.
    std::vector<HeadingNode> strict;
    for (auto& n : unique) {
        if (!strict.empty() && strict.back().char_offset == n.char_offset) continue;
        strict.push_back(std::move(n));
    }
    HeadingTree tree;
    tree.nodes = std::move(strict);
    tree.empty_result = tree.nodes.empty();
    tree.sections = segment(doc, tree);
    return tree;
}

ExtractHeadingsResult extract_headings(const PolicyDocument& doc, HeadingBackend& backend,
                                       std::size_t max_tokens) {
    ExtractHeadingsResult result;
    std::vector<HeadingNode> all;
    for (const auto& c : chunk(doc, max_tokens)) {
        const std::string tagged = backend.tag_chunk(c);
        PolicyDocument chunk_doc;
        chunk_doc.policy_id = doc.policy_id;
        chunk_doc.text = c.text;
        chunk_doc.size_bytes = c.text.size();
        auto parsed = parse_tagged_output(tagged, chunk_doc);
        for (auto& n : parsed.nodes) {
            n.char_offset += c.char_begin;
            n.norm_position = doc.text.empty()
                                  ? 0.0
                                  : static_cast<double>(n.char_offset) /
                                        static_cast<double>(doc.text.size());
            all.push_back(std::move(n));
        }
        for (auto& d : parsed.diagnostics) result.diagnostics.push_back(std::move(d));
    }
    result.tree = build_tree(std::move(all), doc);
    return result;
}

std::vector<Section> segment(const PolicyDocument& doc, const HeadingTree& tree) {
    std::vector<Section> sections;
    if (tree.nodes.empty()) {
        sections.push_back({std::nullopt, 0, doc.text.size(), std::nullopt});
        return sections;
    }
    if (tree.nodes.front().char_offset > 0) {
        sections.push_back({std::nullopt, 0, tree.nodes.front().char_offset, std::nullopt});
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        const std::size_t begin =
            std::min(node.char_offset + node.text.size(), doc.text.size());
        const std::size_t end = i + 1 < tree.nodes.size()
                                    ? tree.nodes[i + 1].char_offset
                                    : doc.text.size();
        sections.push_back({i, begin, std::max(begin, end), std::nullopt});
    }
    return sections;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

bool FitmentReport::lower_quartile_zero() const {
    if (inter_heading_lengths.empty()) return false;
    const std::size_t zeros = static_cast<std::size_t>(
        std::count(inter_heading_lengths.begin(), inter_heading_lengths.end(), 0u));
    const std::size_t needed = (inter_heading_lengths.size() + 3) / 4;  // ceil(25%)
    return zeros >= needed;
}

FitmentReport fitment_stats(const HeadingTree& tree, const PolicyDocument& doc) {
    FitmentReport report;
    report.heading_count = tree.nodes.size();
    if (tree.nodes.empty()) return report;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        const std::size_t begin =
            std::min(node.char_offset + node.text.size(), doc.text.size());
        const std::size_t end = i + 1 < tree.nodes.size()
                                    ? tree.nodes[i + 1].char_offset
                                    : doc.text.size();
        report.inter_heading_lengths.push_back(end > begin ? end - begin : 0);
    }
    std::vector<double> lengths(report.inter_heading_lengths.begin(),
                                report.inter_heading_lengths.end());
    report.median = quantile(lengths, 0.5);
    report.iqr = quantile(lengths, 0.75) - quantile(lengths, 0.25);
    return report;
}

std::vector<FailureMode> detect_failure_modes(const HeadingTree& tree,
                                              const PolicyDocument& doc,
                                              const FailureThresholds& thresholds) {
    std::vector<FailureMode> flags;
    if (!tree.nodes.empty() && tree.nodes.size() >= thresholds.uniform_min_count) {
        const auto level = tree.nodes.front().level;
        if (std::all_of(tree.nodes.begin(), tree.nodes.end(),
                        [&](const auto& n) { return n.level == level; })) {
            flags.push_back(FailureMode::UniformLevels);
        }
    }
    for (const auto& n : tree.nodes) {
        const std::string trimmed = text::trim(n.text);
        if (text::count_tokens(n.text) > thresholds.sentence_max_tokens ||
            (!trimmed.empty() && trimmed.back() == '.')) {
            flags.push_back(FailureMode::SentenceAsHeading);
            break;
        }
    }
    const std::size_t expected =
        std::max<std::size_t>(2, doc.size_bytes / thresholds.sparse_bytes_per_heading);
    if (tree.nodes.size() < expected) flags.push_back(FailureMode::SparseHeadings);
    return flags;
}

}  // namespace privstruct
