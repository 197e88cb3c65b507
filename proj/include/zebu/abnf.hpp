// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace zebu {

/// 1-based line and column into a grammar source file. Zero means "unknown".
struct SourceSpan {
    int line = 0;
    int column = 0;
};

std::string to_string(const SourceSpan& span);

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(SourceSpan span, const std::string& message);
    const SourceSpan& span() const noexcept { return span_; }

private:
    SourceSpan span_;
};

/// Heap box with value semantics, used to make the recursive Element variant copyable.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    const T& operator*() const { return *ptr_; }
    T& operator*() { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    T* operator->() { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

inline constexpr std::uint32_t kUnbounded = std::numeric_limits<std::uint32_t>::max();

/// Storage shape of a named subfield.
enum class Shape { RawSlice, Uint16, Uint32, Struct, Union, Enum };

std::string_view to_string(Shape shape);
std::optional<Shape> shape_from_keyword(std::string_view keyword);

struct Element;

struct LiteralCI {
    std::string text;
    bool operator==(const LiteralCI&) const = default;
};

struct CharCodes {
    std::string bytes;
    bool operator==(const CharCodes&) const = default;
};

struct CharRange {
    unsigned char lo = 0;
    unsigned char hi = 0;
    bool operator==(const CharRange&) const = default;
};

struct RuleRef {
    std::string name;
    bool operator==(const RuleRef&) const = default;
};

struct Sequence {
    std::vector<Element> items;
    bool operator==(const Sequence&) const;
};

struct Alternation {
    std::vector<Element> branches;
    bool operator==(const Alternation&) const;
};

struct Repetition {
    std::uint32_t min = 0;
    std::uint32_t max = kUnbounded;
    Box<Element> inner;
    bool operator==(const Repetition&) const = default;
};

/// Reference-site subfield annotation of the annotated dialect (`elem:name[:type][:lazy]`).
/// Plain ABNF never produces this node.
struct Named {
    std::string name;
    std::optional<Shape> shape;
    bool lazy = false;
    Box<Element> inner;
    bool operator==(const Named&) const = default;
};

struct Element {
    using Node = std::variant<LiteralCI, CharCodes, CharRange, RuleRef, Sequence, Alternation, Repetition, Named>;

    Node node;
    SourceSpan span;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }
    template <typename T>
    bool is() const { return std::holds_alternative<T>(node); }

    // Spans are diagnostics only; structural equality ignores them.
    friend bool operator==(const Element& a, const Element& b) { return a.node == b.node; }
};

inline bool Sequence::operator==(const Sequence& o) const { return items == o.items; }
inline bool Alternation::operator==(const Alternation& o) const { return branches == o.branches; }

struct Rule {
    std::string name;
    Element body;
    SourceSpan span;
    /// Definition-site type annotation (`Name:type = ...`), annotated dialect only.
    std::optional<Shape> shape;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.name == b.name && a.body == b.body && a.shape == b.shape;
    }
};

/// Rules in source order. Lookup is case-insensitive and resolves to the first definition;
/// later definitions of the same name are retained so the verifier can report them.
class Grammar {
public:
    void add(Rule rule);
    const Rule* find(std::string_view name) const;
    Rule* find_mutable(std::string_view name);
    const std::vector<Rule>& rules() const noexcept { return rules_; }
    bool empty() const noexcept { return rules_.empty(); }

    friend bool operator==(const Grammar& a, const Grammar& b) { return a.rules_ == b.rules_; }

private:
    std::vector<Rule> rules_;
    std::map<std::string, std::size_t> index_;
};

std::string fold_case(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

/// Parses RFC 5234 ABNF. Repetition shorthands are normalized; no semantic checks.
Grammar parse_abnf(std::string_view source);

/// ALPHA, BIT, CHAR, CR, CRLF, CTL, DIGIT, DQUOTE, HEXDIG, HTAB, LF, LWSP, OCTET, SP, VCHAR, WSP.
const Grammar& core_rules();

/// Looks a name up in `grammar`, falling back to the core rules.
const Rule* resolve_rule(const Grammar& grammar, std::string_view name);

std::string to_abnf(const Element& element);
std::string to_abnf(const Rule& rule);
std::string to_abnf(const Grammar& grammar);

}  // namespace zebu
