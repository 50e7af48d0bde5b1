#include "ice/tokenizer.hpp"

namespace ice {

TokenCounter TokenCounter::fixed_chars(std::uint32_t chars_per_token) {
    if (chars_per_token == 0) {
        raise(ErrorCode::InvalidArgument, "fixed_chars tokenizer needs chars_per_token >= 1");
    }
    return TokenCounter(TokenizerMode::FixedChars, chars_per_token);
}

TokenCounter TokenCounter::from_config(const std::string& mode, std::uint32_t chars_per_token) {
    if (mode == "whitespace") return whitespace();
    if (mode == "byte") return byte();
    if (mode == "fixed_chars") return fixed_chars(chars_per_token == 0 ? 4 : chars_per_token);
    raise(ErrorCode::InvalidArgument, "unknown tokenizer.mode '" + mode + "'");
}

std::string TokenCounter::mode_name() const {
    switch (mode_) {
        case TokenizerMode::Whitespace: return "whitespace";
        case TokenizerMode::Byte: return "byte";
        case TokenizerMode::FixedChars: return "fixed_chars";
    }
    return "?";
}

std::uint64_t TokenCounter::count(std::string_view text) const {
    switch (mode_) {
        case TokenizerMode::Byte:
            return text.size();
        case TokenizerMode::FixedChars:
            return (text.size() + chars_per_token_ - 1) / chars_per_token_;
        case TokenizerMode::Whitespace: {
            std::uint64_t n = 0;
            bool in_word = false;
            for (char c : text) {
                if (is_token_space(c)) {
                    in_word = false;
                } else if (!in_word) {
                    in_word = true;
                    ++n;
                }
            }
            return n;
        }
    }
    return 0;
}

std::size_t TokenCounter::boundary_offset(std::string_view text, std::uint64_t n) const {
    if (n == 0) return 0;
    switch (mode_) {
        case TokenizerMode::Byte:
            if (n > text.size()) {
                raise(ErrorCode::OutOfRange, "split index exceeds token count");
            }
            return static_cast<std::size_t>(n);
        case TokenizerMode::FixedChars: {
            std::uint64_t total = count(text);
            if (n > total) {
                raise(ErrorCode::OutOfRange, "split index exceeds token count");
            }
            std::uint64_t offset = n * chars_per_token_;
            return offset >= text.size() ? text.size() : static_cast<std::size_t>(offset);
        }
        case TokenizerMode::Whitespace: {
            std::uint64_t seen = 0;
            bool in_word = false;
            for (std::size_t i = 0; i < text.size(); ++i) {
                if (is_token_space(text[i])) {
                    in_word = false;
                } else {
                    if (!in_word) {
                        in_word = true;
                        ++seen;
                    }
                    // Boundary sits right after the last byte of the n-th word.
                    if (seen == n && (i + 1 == text.size() || is_token_space(text[i + 1]))) {
                        return i + 1;
                    }
                }
            }
            raise(ErrorCode::OutOfRange, "split index exceeds token count");
        }
    }
    raise(ErrorCode::Internal, "unreachable tokenizer mode");
}

std::pair<std::string, std::string> TokenCounter::split_at_token(std::string_view text,
                                                                 std::uint64_t n) const {
    std::size_t at = boundary_offset(text, n);
    return {std::string(text.substr(0, at)), std::string(text.substr(at))};
}

void StreamTokenCount::append(std::string_view chunk) {
    bytes_ += chunk.size();
    if (counter_.mode() == TokenizerMode::Whitespace) {
        for (char c : chunk) {
            if (is_token_space(c)) {
                in_word_ = false;
            } else if (!in_word_) {
                in_word_ = true;
                ++whitespace_tokens_;
            }
        }
    }
}

void StreamTokenCount::reset() {
    bytes_ = 0;
    whitespace_tokens_ = 0;
    in_word_ = false;
}

std::uint64_t StreamTokenCount::tokens() const {
    switch (counter_.mode()) {
        case TokenizerMode::Byte:
            return bytes_;
        case TokenizerMode::FixedChars:
            return (bytes_ + counter_.chars_per_token() - 1) / counter_.chars_per_token();
        case TokenizerMode::Whitespace:
            return whitespace_tokens_;
    }
    return 0;
}

std::vector<std::string> whitespace_words(std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_token_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_token_space(text[i])) ++i;
        if (i > start) words.emplace_back(text.substr(start, i - start));
    }
    return words;
}

}  // namespace ice
