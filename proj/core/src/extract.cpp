#include "privstruct/extract.hpp"

#include "privstruct/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <unordered_set>

namespace privstruct {

using json = nlohmann::json;

std::vector<ExtractionTuple> parse_tuple_output(const std::string& backend_text) {
    json parsed;
    try {
        parsed = json::parse(backend_text);
    } catch (const json::parse_error& e) {
        throw TupleParseError(std::string("tuple output is not valid JSON: ") + e.what(),
                              e.byte);
    }
    if (!parsed.is_array()) {
        throw TupleParseError("tuple output top level must be an array", 0);
    }
    std::vector<ExtractionTuple> out;
    for (const auto& obj : parsed) {
        if (!obj.is_object()) {
            throw TupleParseError("tuple array element is not an object", 0);
        }
        std::string data, purpose;
        if (obj.contains("data")) {
            if (!obj["data"].is_string()) {
                throw TupleParseError("tuple 'data' value is not a string", 0);
            }
            data = obj["data"].get<std::string>();
        }
        if (obj.contains("purpose")) {
            if (!obj["purpose"].is_string()) {
                throw TupleParseError("tuple 'purpose' value is not a string", 0);
            }
            purpose = obj["purpose"].get<std::string>();
        }
        if (text::trim(data).empty() && text::trim(purpose).empty()) continue;
        ExtractionTuple t;
        t.data_excerpt = std::move(data);
        t.purpose_excerpt = std::move(purpose);
        out.push_back(std::move(t));
    }
    return out;
}

std::optional<std::size_t> section_for_offset(const HeadingTree& tree, std::size_t offset) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < tree.sections.size(); ++i) {
        const auto& s = tree.sections[i];
        if (offset >= s.content_begin && offset < s.content_end) return i;
        if (s.content_begin <= offset) best = i;  // nearest preceding section
    }
    return best;
}

ExtractTuplesResult extract_tuples(const Chunk& chunk, ExtractionBackend& backend,
                                   const HeadingTree* tree) {
    ExtractTuplesResult result;
    const std::string raw = backend.extract(chunk);
    auto tuples = parse_tuple_output(raw);

    const std::string norm_chunk = text::normalize(chunk.text);
    auto grounded = [&](const std::string& excerpt) {
        if (text::trim(excerpt).empty()) return true;
        return norm_chunk.find(text::normalize(excerpt)) != std::string::npos;
    };

    const std::size_t midpoint = chunk.char_begin + (chunk.char_end - chunk.char_begin) / 2;
    for (auto& t : tuples) {
        bool ok = true;
        if (!grounded(t.data_excerpt)) {
            result.dropped_excerpts.push_back(t.data_excerpt);
            ok = false;
        }
        if (!grounded(t.purpose_excerpt)) {
            result.dropped_excerpts.push_back(t.purpose_excerpt);
            ok = false;
        }
        if (!ok) continue;
        t.chunk_id = chunk.chunk_id;
        if (tree != nullptr) t.section_index = section_for_offset(*tree, midpoint);
        result.tuples.push_back(std::move(t));
    }
    return result;
}

MentionCounts count_unique_mentions(const std::vector<ExtractionTuple>& policy_tuples) {
    std::unordered_set<std::string> items, purposes;
    std::set<PurposeLabel> categories;
    for (const auto& t : policy_tuples) {
        const std::string d = text::normalize_mention(t.data_excerpt);
        if (!d.empty()) items.insert(d);
        const std::string p = text::normalize_mention(t.purpose_excerpt);
        if (!p.empty()) purposes.insert(p);
        if (t.purpose_label) categories.insert(*t.purpose_label);
    }
    return {items.size(), purposes.size(), categories.size()};
}

namespace {

struct PatternHit {
    std::size_t norm_begin = 0;
    std::size_t norm_end = 0;
    const LexiconRule* rule = nullptr;
};

// First word-start match in table order against a normalized view.
std::optional<PatternHit> first_hit(const text::NormalizedView& view,
                                    const std::vector<LexiconRule>& table,
                                    std::size_t from = 0) {
    std::optional<PatternHit> best;
    for (const auto& rule : table) {
        if (rule.pattern.empty() || rule.pattern.front() == '^') continue;
        std::size_t pos = view.text.find(rule.pattern, from);
        while (pos != std::string::npos) {
            if (pos == 0 ||
                std::isalnum(static_cast<unsigned char>(view.text[pos - 1])) == 0) {
                break;
            }
            pos = view.text.find(rule.pattern, pos + 1);
        }
        if (pos == std::string::npos) continue;
        if (!best || pos < best->norm_begin) {
            best = PatternHit{pos, pos + rule.pattern.size(), &rule};
        }
    }
    return best;
}

// Extends a normalized span left by one token when that token is a determiner.
std::size_t extend_left(const text::NormalizedView& view, std::size_t norm_begin) {
    static const std::unordered_set<std::string> leads = {"your", "our", "the",
                                                          "my", "a", "an", "app"};
    if (norm_begin < 2) return norm_begin;
    std::size_t space = norm_begin - 1;
    if (view.text[space] != ' ') return norm_begin;
    std::size_t b = space;
    while (b > 0 && view.text[b - 1] != ' ') --b;
    if (leads.count(view.text.substr(b, space - b)) > 0) return b;
    return norm_begin;
}

std::string original_span(const std::string& sentence, const text::NormalizedView& view,
                          std::size_t norm_begin, std::size_t norm_end) {
    if (norm_begin >= norm_end || norm_end > view.offset_map.size()) return {};
    const std::size_t b = view.offset_map[norm_begin];
    const std::size_t e = view.offset_map[norm_end - 1] + 1;
    return sentence.substr(b, e - b);
}

std::string strip_terminal_punct(std::string s) {
    while (!s.empty() &&
           (s.back() == '.' || s.back() == '?' || s.back() == '!' || s.back() == ',' ||
            s.back() == ';')) {
        s.pop_back();
    }
    return text::trim(s);
}

}  // namespace

std::string HeuristicExtractionBackend::extract(const Chunk& chunk) {
    const auto& item_table = default_lexicon("item");
    const auto& purpose_table = default_lexicon("purpose");

    json out = json::array();
    for (const auto& span : text::split_sentences(chunk.text)) {
        const std::string sentence = chunk.text.substr(span.begin, span.end - span.begin);
        const auto view = text::make_normalized_view(sentence);
        if (view.text.empty()) continue;

        const auto item_hit = first_hit(view, item_table);
        std::string data, purpose;
        std::size_t purpose_search_from = 0;
        if (item_hit) {
            if (item_hit->rule->label_code == "d22") {
                // Negated collection: the whole clause is the evidence.
                data = strip_terminal_punct(
                    original_span(sentence, view, item_hit->norm_begin, view.text.size()));
            } else {
                const std::size_t b = extend_left(view, item_hit->norm_begin);
                data = original_span(sentence, view, b, item_hit->norm_end);
            }
            purpose_search_from = item_hit->norm_end;
        }

        // A "to ..."/"for ..." clause after the data mention is its purpose.
        if (item_hit && item_hit->rule->label_code != "d22") {
            std::size_t marker = std::string::npos;
            std::size_t clause_begin = 0;
            for (const char* m : {" to ", " for "}) {
                const std::size_t pos = view.text.find(m, purpose_search_from);
                if (pos != std::string::npos && pos < marker) {
                    marker = pos;
                    clause_begin = pos + std::string(m).size();
                }
            }
            if (marker != std::string::npos && clause_begin < view.text.size()) {
                purpose = strip_terminal_punct(
                    original_span(sentence, view, clause_begin, view.text.size()));
            }
        }

        if (!item_hit) {
            // Purpose-only sentences become isolated purpose excerpts.
            if (const auto hit = first_hit(view, purpose_table)) {
                const std::size_t b = extend_left(view, hit->norm_begin);
                purpose = original_span(sentence, view, b, hit->norm_end);
            }
        }

        if (data.empty() && purpose.empty()) continue;
        out.push_back({{"data", data}, {"purpose", purpose}});
    }
    return out.dump();
}

}  // namespace privstruct
