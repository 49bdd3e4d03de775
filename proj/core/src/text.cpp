#include "privstruct/text.hpp"

#include <cctype>
#include <cstdint>

namespace privstruct::text {

std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        std::uint32_t cp;
        if (b0 < 0x80) {
            i += 1;
            continue;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(bytes[i + k]);
            if ((b & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (b & 0x3F);
        }
        // Overlong encodings, surrogates, and out-of-range code points.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
            (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
            return i;
        }
        i += len;
    }
    return std::nullopt;
}

void require_utf8(std::string_view bytes) {
    if (auto off = find_invalid_utf8(bytes)) {
        throw Utf8Error(*off, "invalid UTF-8 at byte offset " + std::to_string(*off));
    }
}

bool is_space(char c) noexcept {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::vector<TokenSpan> tokenize(std::string_view s) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        while (i < n && is_space(s[i])) ++i;
        if (i >= n) break;
        std::size_t b = i;
        while (i < n && !is_space(s[i])) ++i;
        out.push_back({b, i});
    }
    return out;
}

std::size_t count_tokens(std::string_view s) {
    std::size_t count = 0;
    bool in_token = false;
    for (char c : s) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            if (!out.empty()) pending_space = true;
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

std::string normalize_mention(std::string_view s) {
    std::string out = normalize(s);
    while (!out.empty()) {
        char last = out.back();
        if (last == '.' || last == '?' || last == '!') {
            out.pop_back();
        } else {
            break;
        }
    }
    return trim(out);
}

NormalizedView make_normalized_view(std::string_view s) {
    NormalizedView v;
    v.text.reserve(s.size());
    v.offset_map.reserve(s.size());
    bool pending_space = false;
    std::size_t pending_offset = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (is_space(c)) {
            if (!v.text.empty() && !pending_space) {
                pending_space = true;
                pending_offset = i;
            }
        } else {
            if (pending_space) {
                v.text.push_back(' ');
                v.offset_map.push_back(pending_offset);
                pending_space = false;
            }
            v.text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            v.offset_map.push_back(i);
        }
    }
    return v;
}

std::optional<std::pair<std::size_t, std::size_t>>
NormalizedView::find(std::string_view needle, std::size_t from,
                     std::size_t* norm_pos_out) const {
    if (needle.empty()) return std::nullopt;
    if (from > text.size()) return std::nullopt;
    const std::size_t pos = text.find(needle, from);
    if (pos == std::string::npos) return std::nullopt;
    if (norm_pos_out) *norm_pos_out = pos;
    const std::size_t begin = offset_map[pos];
    const std::size_t last = offset_map[pos + needle.size() - 1];
    return std::make_pair(begin, last + 1);
}

std::vector<TokenSpan> split_lines(std::string_view s) {
    std::vector<TokenSpan> out;
    std::size_t b = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            out.push_back({b, i});
            b = i + 1;
        }
    }
    // A trailing newline yields a final empty line; keep it only when non-empty input ends without one.
    if (!out.empty() && out.back().begin == out.back().end && !s.empty() && s.back() == '\n') {
        out.pop_back();
    }
    return out;
}

std::vector<TokenSpan> split_sentences(std::string_view s) {
    std::vector<TokenSpan> out;
    std::size_t b = 0;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        char c = s[i];
        if (c == '.' || c == '?' || c == '!') {
            std::size_t j = i + 1;
            while (j < n && (s[j] == '.' || s[j] == '?' || s[j] == '!')) ++j;
            if (j >= n || is_space(s[j])) {
                out.push_back({b, j});
                while (j < n && is_space(s[j])) ++j;
                b = j;
                i = j;
                continue;
            }
            i = j;
        } else {
            ++i;
        }
    }
    if (b < n) out.push_back({b, n});
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace privstruct::text
