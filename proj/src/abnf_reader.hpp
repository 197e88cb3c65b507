// SPDX-License-Identifier: Apache-2.0
// Internal: character cursor and element parser shared by the ABNF and annotated-dialect readers.
#pragma once

#include <string>
#include <string_view>

#include "zebu/abnf.hpp"

namespace zebu::detail {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool at_end() const noexcept { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const noexcept {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char get();
    bool at_newline() const noexcept { return peek() == '\n' || peek() == '\r'; }

    SourceSpan span() const noexcept { return {line_, column_ + 1}; }
    int column() const noexcept { return column_; }
    std::size_t offset() const noexcept { return pos_; }
    std::string_view text() const noexcept { return text_; }

    void skip_blanks();
    void skip_comment();
    void skip_newline();

    /// Skips blanks and comments, and crosses line breaks only when the next content line is
    /// indented deeper than `ruleColumn` (ABNF continuation). Returns true if anything was skipped.
    bool skip_rule_space(int ruleColumn);

    /// Skips blanks, newlines and (when enabled) `;` comments.
    void skip_all_space(bool comments = true);

    bool consume(char c);
    bool consume_word(std::string_view word);
    std::string read_identifier();

    [[noreturn]] void fail(const std::string& message) const;
    [[noreturn]] static void fail_at(SourceSpan span, const std::string& message);

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 0;
};

bool is_name_start(char c) noexcept;
bool is_name_char(char c) noexcept;

/// Recursive-descent parser for an ABNF alternation. With `annotations` enabled it accepts the
/// `:name[:type][:lazy]` postfix and stops at `{`/`}`.
class ElementParser {
public:
    ElementParser(Cursor& cursor, int ruleColumn, bool annotations, std::string ruleName)
        : c_(cursor), ruleColumn_(ruleColumn), annotations_(annotations), ruleName_(std::move(ruleName)) {}

    Element parse_alternation();

private:
    Element parse_concatenation();
    Element parse_repetition();
    Element parse_element();
    Element parse_num_val(SourceSpan start);
    Element parse_char_val(SourceSpan start, bool caseSensitive);
    Element parse_annotation(Element inner);
    bool starts_element(char c) const noexcept;

    Cursor& c_;
    int ruleColumn_;
    bool annotations_;
    std::string ruleName_;
};

}  // namespace zebu::detail
