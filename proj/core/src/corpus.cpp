#include "privstruct/corpus.hpp"

#include "privstruct/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_set>

namespace privstruct {

namespace {

// Minimal HTML flattener: drops tags, turns block-level closers and <br> into
// line breaks, strips script/style bodies, decodes the common entities.
std::string strip_markup(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    const std::size_t n = raw.size();
    std::size_t i = 0;
    auto tag_name_at = [&](std::size_t pos) {
        std::string name;
        std::size_t j = pos;
        if (j < n && raw[j] == '/') ++j;
        while (j < n && (std::isalnum(static_cast<unsigned char>(raw[j])) != 0)) {
            name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[j]))));
            ++j;
        }
        return name;
    };
    while (i < n) {
        char c = raw[i];
        if (c == '<') {
            std::size_t close = raw.find('>', i + 1);
            if (close == std::string::npos) {
                out.push_back(c);
                ++i;
                continue;
            }
            const bool is_closing = i + 1 < n && raw[i + 1] == '/';
            const std::string name = tag_name_at(i + 1);
            if (!is_closing && (name == "script" || name == "style")) {
                const std::string end_tag = "</" + name;
                std::size_t body_end = raw.find(end_tag, close + 1);
                if (body_end == std::string::npos) {
                    i = n;
                    continue;
                }
                std::size_t end_close = raw.find('>', body_end);
                i = (end_close == std::string::npos) ? n : end_close + 1;
                continue;
            }
            static const std::unordered_set<std::string> block_tags = {
                "p",  "div", "br", "li", "ul",  "ol",  "tr",  "table", "section",
                "h1", "h2",  "h3", "h4", "h5",  "h6",  "header", "footer", "article"};
            if (block_tags.count(name) > 0) out.push_back('\n');
            i = close + 1;
        } else if (c == '&') {
            struct Entity { const char* name; char value; };
            static const Entity entities[] = {
                {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'},
                {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''}, {"&nbsp;", ' '}};
            bool matched = false;
            for (const auto& e : entities) {
                std::string_view ent(e.name);
                if (raw.compare(i, ent.size(), ent) == 0) {
                    out.push_back(e.value);
                    i += ent.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                out.push_back(c);
                ++i;
            }
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

// Collapse whitespace runs to one space, but keep line breaks: a run that
// contains newlines is replaced by exactly its newlines (blank lines survive).
std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        if (!text::is_space(s[i])) {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        std::size_t newlines = 0;
        while (i < n && text::is_space(s[i])) {
            if (s[i] == '\n') ++newlines;
            ++i;
        }
        if (out.empty()) continue;  // leading whitespace dropped
        if (i >= n) break;          // trailing whitespace dropped
        if (newlines > 0) {
            out.append(newlines, '\n');
        } else {
            out.push_back(' ');
        }
    }
    return out;
}

}  // namespace

PolicyDocument sanitize(const std::string& raw, bool is_html,
                        const std::string& policy_id) {
    text::require_utf8(raw);
    std::string flat = is_html ? strip_markup(raw) : raw;
    PolicyDocument doc;
    doc.policy_id = policy_id;
    doc.text = collapse_whitespace(flat);
    doc.size_bytes = doc.text.size();
    return doc;
}

namespace {

// Boundary quality of the whitespace gap before a token.
enum class GapKind { BlankLine, SentenceEnd, Plain };

GapKind classify_gap(const std::string& doc, const text::TokenSpan& prev,
                     const text::TokenSpan& next) {
    std::size_t newlines = 0;
    for (std::size_t i = prev.end; i < next.begin; ++i) {
        if (doc[i] == '\n') ++newlines;
    }
    if (newlines >= 2) return GapKind::BlankLine;
    std::size_t e = prev.end;
    while (e > prev.begin) {
        char c = doc[e - 1];
        if (c == '"' || c == '\'' || c == ')' || c == ']') {
            --e;
            continue;
        }
        if (c == '.' || c == '?' || c == '!') return GapKind::SentenceEnd;
        break;
    }
    return GapKind::Plain;
}

}  // namespace

std::vector<Chunk> chunk(const PolicyDocument& doc, std::size_t max_tokens) {
    if (max_tokens < 1) throw CorpusError("chunk: max_tokens must be >= 1");
    std::vector<Chunk> out;
    const auto tokens = text::tokenize(doc.text);
    if (tokens.empty()) return out;

    std::size_t tok = 0;             // first token of the current chunk
    std::size_t char_begin = 0;      // chunks partition the full byte range
    while (tok < tokens.size()) {
        const std::size_t remaining = tokens.size() - tok;
        std::size_t cut_tok;  // first token of the next chunk
        if (remaining <= max_tokens) {
            cut_tok = tokens.size();
        } else {
            // Gaps before tokens tok+1 .. tok+max_tokens are candidate cuts.
            std::size_t best_blank = 0, best_sentence = 0;
            for (std::size_t k = tok + 1; k <= tok + max_tokens; ++k) {
                switch (classify_gap(doc.text, tokens[k - 1], tokens[k])) {
                    case GapKind::BlankLine: best_blank = k; break;
                    case GapKind::SentenceEnd: best_sentence = k; break;
                    case GapKind::Plain: break;
                }
            }
            cut_tok = best_blank ? best_blank
                                 : (best_sentence ? best_sentence : tok + max_tokens);
        }
        const std::size_t char_end =
            cut_tok < tokens.size() ? tokens[cut_tok].begin : doc.text.size();
        Chunk c;
        c.chunk_id = {doc.policy_id, out.size()};
        c.token_begin = tok;
        c.token_end = cut_tok;
        c.char_begin = char_begin;
        c.char_end = char_end;
        c.text = doc.text.substr(char_begin, char_end - char_begin);
        out.push_back(std::move(c));
        tok = cut_tok;
        char_begin = char_end;
    }
    return out;
}

std::vector<PolicyDocument> size_filter(const std::vector<PolicyDocument>& corpus,
                                        double max_kb) {
    std::vector<PolicyDocument> out;
    const double limit = max_kb * 1024.0;
    for (const auto& doc : corpus) {
        if (static_cast<double>(doc.size_bytes) < limit) out.push_back(doc);
    }
    return out;
}

namespace {

std::vector<std::vector<std::size_t>> bucketize(const std::vector<PolicyDocument>& corpus,
                                                double bucket_kb, std::size_t num_buckets) {
    std::vector<std::vector<std::size_t>> buckets(num_buckets);
    const double width = bucket_kb * 1024.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto k = static_cast<std::size_t>(
            std::floor(static_cast<double>(corpus[i].size_bytes) / width));
        if (k < num_buckets) buckets[k].push_back(i);
    }
    for (auto& b : buckets) {
        std::sort(b.begin(), b.end(), [&](std::size_t a, std::size_t c) {
            return corpus[a].policy_id < corpus[c].policy_id;
        });
    }
    return buckets;
}

// Partial Fisher-Yates: the first `take` slots after shuffling.
std::vector<std::size_t> seeded_draw(std::vector<std::size_t> pool, std::size_t take,
                                     std::mt19937_64& rng) {
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, pool.size() - 1);
        std::swap(pool[i], pool[dist(rng)]);
    }
    pool.resize(take);
    return pool;
}

}  // namespace

std::vector<PolicyDocument> stratified_sample(const std::vector<PolicyDocument>& corpus,
                                              double bucket_kb, std::size_t per_bucket,
                                              std::uint64_t seed, std::size_t num_buckets) {
    auto buckets = bucketize(corpus, bucket_kb, num_buckets);
    for (std::size_t k = 0; k < num_buckets; ++k) {
        if (buckets[k].size() < per_bucket) {
            throw CorpusError("stratified_sample: bucket " + std::to_string(k) +
                              " has only " + std::to_string(buckets[k].size()) +
                              " documents (need " + std::to_string(per_bucket) + ")");
        }
    }
    std::mt19937_64 rng(seed);
    std::vector<PolicyDocument> out;
    out.reserve(per_bucket * num_buckets);
    for (std::size_t k = 0; k < num_buckets; ++k) {
        for (std::size_t idx : seeded_draw(buckets[k], per_bucket, rng)) {
            out.push_back(corpus[idx]);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.policy_id < b.policy_id;
    });
    return out;
}

CorpusSplit stratified_split(const std::vector<PolicyDocument>& sample, double bucket_kb,
                             std::size_t test_per_bucket, std::uint64_t seed) {
    const std::size_t num_buckets = 5;
    auto buckets = bucketize(sample, bucket_kb, num_buckets);
    std::mt19937_64 rng(seed);
    CorpusSplit split;
    for (std::size_t k = 0; k < num_buckets; ++k) {
        const std::size_t take = std::min(test_per_bucket, buckets[k].size());
        auto test_idx = seeded_draw(buckets[k], take, rng);
        std::unordered_set<std::size_t> in_test(test_idx.begin(), test_idx.end());
        for (std::size_t idx : buckets[k]) {
            (in_test.count(idx) ? split.test : split.train).push_back(sample[idx]);
        }
    }
    auto by_id = [](const auto& a, const auto& b) { return a.policy_id < b.policy_id; };
    std::sort(split.train.begin(), split.train.end(), by_id);
    std::sort(split.test.begin(), split.test.end(), by_id);
    return split;
}

std::vector<PolicyDocument> dedup_by_content(const std::vector<PolicyDocument>& corpus) {
    std::vector<PolicyDocument> out;
    std::unordered_set<std::string> seen;
    for (const auto& doc : corpus) {
        if (seen.insert(text::fnv1a_hex(doc.text)).second) out.push_back(doc);
    }
    return out;
}

}  // namespace privstruct
