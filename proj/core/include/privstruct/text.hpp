#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace privstruct::text {

/// Thrown when input bytes are not valid UTF-8; carries the offending offset.
class Utf8Error : public std::runtime_error {
public:
    Utf8Error(std::size_t offset, const std::string& what)
        : std::runtime_error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Returns the byte offset of the first invalid UTF-8 sequence, or nullopt if valid.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Throws Utf8Error naming the byte offset on invalid input.
void require_utf8(std::string_view bytes);

bool is_space(char c) noexcept;

// A token is a maximal run of non-whitespace bytes.
struct TokenSpan {
    std::size_t begin = 0;  // byte offset of first byte
    std::size_t end = 0;    // one past last byte
};

std::vector<TokenSpan> tokenize(std::string_view s);
std::size_t count_tokens(std::string_view s);

std::string to_lower(std::string_view s);

// Case-fold and collapse whitespace runs to single spaces; trims both ends.
std::string normalize(std::string_view s);

std::string trim(std::string_view s);

// normalize() plus stripping one trailing '.', '?' or '!' (mention dedup rule).
std::string normalize_mention(std::string_view s);

// Lowercased copy of `s` where every whitespace run is collapsed to one space,
// plus a map from each normalized index back to the original byte offset.
struct NormalizedView {
    std::string text;
    std::vector<std::size_t> offset_map;  // offset_map[i] = original offset of text[i]

    // Finds `needle` (already normalized) at or after normalized position `from`.
    // Returns original-byte [begin, end) span, or nullopt.
    std::optional<std::pair<std::size_t, std::size_t>>
    find(std::string_view needle, std::size_t from, std::size_t* norm_pos_out = nullptr) const;
};

NormalizedView make_normalized_view(std::string_view s);

// Splits into lines; each entry is [begin, end) excluding the terminator.
std::vector<TokenSpan> split_lines(std::string_view s);

// Sentence boundaries: split after [.?!] runs followed by whitespace.
std::vector<TokenSpan> split_sentences(std::string_view s);

// FNV-1a 64-bit, hex encoded. Used for cache keys and run manifests.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace privstruct::text
