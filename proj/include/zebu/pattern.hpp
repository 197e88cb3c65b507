// SPDX-License-Identifier: Apache-2.0
// Inlined match patterns with captures, a backtracking matcher, and a reference matcher
// that walks the grammar directly.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "zebu/abnf.hpp"
#include "zebu/analysis.hpp"
#include "zebu/zebu.hpp"

namespace zebu {

class InliningDepthExceeded : public std::runtime_error {
public:
    explicit InliningDepthExceeded(const std::string& rule)
        : std::runtime_error("rule inlining exceeded the depth bound at '" + rule + "'") {}
};

class MatchBudgetExceeded : public std::runtime_error {
public:
    MatchBudgetExceeded() : std::runtime_error("match step budget exhausted") {}
};

class RecursionBudgetExceeded : public std::runtime_error {
public:
    RecursionBudgetExceeded() : std::runtime_error("reference matcher budget exhausted") {}
};

inline constexpr std::size_t kDefaultMatchBudget = 1'000'000;

struct PatternNode;

struct PLiteral {
    std::string lower;  // matched case-insensitively
    bool operator==(const PLiteral&) const = default;
};

struct PBytes {
    std::string bytes;
    bool operator==(const PBytes&) const = default;
};

struct PByteSet {
    ByteSet set;
    bool operator==(const PByteSet&) const = default;
};

struct PSequence {
    std::vector<PatternNode> items;
    bool operator==(const PSequence&) const;
};

struct PAlternation {
    std::vector<PatternNode> branches;
    int slot = -1;  ///< capture whose branch index this alternation records
    bool operator==(const PAlternation&) const;
};

struct PRepeat {
    std::uint32_t min = 0;
    std::uint32_t max = kUnbounded;
    Box<PatternNode> inner;
    bool operator==(const PRepeat&) const = default;
};

struct PCapture {
    int id = 0;
    bool lazy = false;
    ByteSet skipSet;          ///< lazy only: bytes the deferred skip may consume
    std::size_t skipMin = 0;  ///< lazy only: shortest derivation of the inner element
    int lazyRoot = -1;        ///< lazy only: index into Pattern::lazyRoots
    Box<PatternNode> inner;
    bool operator==(const PCapture&) const = default;
};

struct PatternNode {
    std::variant<PLiteral, PBytes, PByteSet, PSequence, PAlternation, PRepeat, PCapture> node;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }
    friend bool operator==(const PatternNode& a, const PatternNode& b) { return a.node == b.node; }
};

inline bool PSequence::operator==(const PSequence& o) const { return items == o.items; }
inline bool PAlternation::operator==(const PAlternation& o) const { return branches == o.branches && slot == o.slot; }

struct CaptureInfo {
    std::string name;
    std::vector<std::string> path;  ///< from the entry root, e.g. {"uri", "host"}
    Shape shape = Shape::RawSlice;
    bool lazy = false;
    int parent = -1;
    std::vector<int> children;
    std::string rule;  ///< referenced rule, empty for inline elements
    bool repeated = false;
    bool operator==(const CaptureInfo&) const = default;
};

struct Pattern {
    PatternNode root;
    std::vector<CaptureInfo> captures;
    std::map<std::string, int> captureIndex;                ///< dotted path -> capture id
    std::vector<PatternNode> lazyRoots;                     ///< inner patterns of lazy captures
    std::map<std::string, RangeConstraint> deferredRangeChecks;  ///< dotted path -> range

    std::vector<int> top_level() const;
    bool operator==(const Pattern&) const = default;
};

/// Inlines `body` against `g` (user rules first, then core rules) into a Pattern.
Pattern compile_pattern(const Element& body, const Grammar& g);

/// compile_pattern plus the range checks recorded for `entry` ("statusLine", "CSeq", ...).
Pattern compile_entry(const AnnotatedGrammar& g, const Element& body, std::string_view entry);

struct CaptureSpan {
    bool set = false;
    std::size_t start = 0;
    std::size_t end = 0;
    int branch = -1;    ///< enum/union: alternation branch taken
    int lazyRoot = -1;  ///< lazy: which lazy pattern produced the span
    bool operator==(const CaptureSpan&) const = default;
};

struct MatchResult {
    bool matched = false;
    std::vector<CaptureSpan> captures;  ///< indexed by capture id; empty when not matched
};

/// Strict runs every capture; Deferred skips over lazy captures using their byte sets.
enum class MatchMode { Strict, Deferred };

/// Full match of `subject` against the pattern. Branches in source order, greedy repetition,
/// full backtracking. Throws MatchBudgetExceeded after `budget` steps.
MatchResult match_full(const Pattern& p, std::string_view subject, MatchMode mode = MatchMode::Strict,
                       std::size_t budget = kDefaultMatchBudget);

/// Strict full match of one of `p.lazyRoots`; capture ids are those of `p`.
MatchResult match_lazy(const Pattern& p, int lazyRoot, std::string_view subject,
                       std::size_t budget = kDefaultMatchBudget);

/// Independent oracle: interprets the grammar directly (no inlining, no captures) and decides
/// whether `subject` is derivable from `entry`.
bool reference_match(const Element& entry, const Grammar& g, std::string_view subject,
                     std::size_t budget = 5'000'000);

}  // namespace zebu
