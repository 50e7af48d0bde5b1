#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ice/error.hpp"

namespace ice {

// Token accounting is a deterministic proxy measure: the gateway never sees a
// model's real tokenizer, so ratios are denominated in one of these units.
enum class TokenizerMode {
    Whitespace,  // maximal runs of non-whitespace bytes
    Byte,        // every byte is a token
    FixedChars,  // ceil(bytes / chars_per_token)
};

// Counts tokens and splits text at token boundaries. Counting is pure and
// byte-oriented; split_at_token guarantees prefix + suffix == text and never
// cuts inside a token.
class TokenCounter {
public:
    // Defaults to whitespace-word counting.
    TokenCounter() = default;

    static TokenCounter whitespace() { return TokenCounter(TokenizerMode::Whitespace, 0); }
    static TokenCounter byte() { return TokenCounter(TokenizerMode::Byte, 0); }
    static TokenCounter fixed_chars(std::uint32_t chars_per_token);

    // Builds a counter from config strings: "whitespace" | "byte" | "fixed_chars".
    static TokenCounter from_config(const std::string& mode, std::uint32_t chars_per_token);

    TokenizerMode mode() const { return mode_; }
    std::uint32_t chars_per_token() const { return chars_per_token_; }
    std::string mode_name() const;

    // Number of tokens in text; the empty string counts zero.
    std::uint64_t count(std::string_view text) const;

    // Byte offset of the boundary immediately after the n-th token (n = 0 is
    // offset 0). Throws OutOfRange when n exceeds count(text).
    std::size_t boundary_offset(std::string_view text, std::uint64_t n) const;

    // Splits so the prefix holds exactly n tokens; round-trip is byte exact.
    std::pair<std::string, std::string> split_at_token(std::string_view text,
                                                       std::uint64_t n) const;

private:
    TokenCounter(TokenizerMode mode, std::uint32_t chars_per_token)
        : mode_(mode), chars_per_token_(chars_per_token) {}

    TokenizerMode mode_ = TokenizerMode::Whitespace;
    std::uint32_t chars_per_token_ = 0;
};

// Running token count for text that arrives in arbitrary byte chunks.
// Appending chunk-by-chunk yields the same count as counting the whole
// buffer at once, without rescanning previous chunks.
class StreamTokenCount {
public:
    explicit StreamTokenCount(const TokenCounter& counter) : counter_(counter) {}

    void append(std::string_view chunk);
    void reset();

    std::uint64_t tokens() const;
    std::uint64_t bytes() const { return bytes_; }

private:
    TokenCounter counter_;
    std::uint64_t bytes_ = 0;
    std::uint64_t whitespace_tokens_ = 0;
    bool in_word_ = false;
};

// Locale-free whitespace test used by all counting modes.
inline bool is_token_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Splits text into whitespace-delimited words (used by lexical matching).
std::vector<std::string> whitespace_words(std::string_view text);

}  // namespace ice
