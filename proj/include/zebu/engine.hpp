// SPDX-License-Identifier: Apache-2.0
// Two-level message parsing: a line scanner, on-demand header matching, lazy subfields,
// typed values and constraint enforcement.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "zebu/pattern.hpp"
#include "zebu/verifier.hpp"
#include "zebu/zebu.hpp"

namespace zebu {

class CompileError : public std::runtime_error {
public:
    explicit CompileError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

struct HeaderEntry {
    std::string name;
    std::vector<std::string> keys;  ///< case-folded
    Mandatory mandatoryIn = Mandatory::None;
    bool multiple = false;
    bool readOnly = false;
    Pattern pattern;
    std::vector<Constraint> constraints;  ///< bound, not lifted to ranges
    bool operator==(const HeaderEntry&) const = default;
};

struct CompiledGrammar {
    std::string protocolName;
    Pattern requestLinePattern;
    Pattern statusLinePattern;
    std::vector<HeaderEntry> headers;                 ///< declaration order
    std::map<std::string, std::size_t> headerTable;   ///< folded key -> index into headers
    std::vector<Constraint> requestConstraints;
    std::vector<Constraint> responseConstraints;
    std::set<std::string> lazySet;                    ///< "Entry.path" of every lazy subfield
    std::string source;                               ///< the annotated grammar text
    std::shared_ptr<const AnnotatedGrammar> annotated;  ///< bound IR, rebuilt from `source`

    const HeaderEntry* find_header(std::string_view name) const;
    std::optional<std::size_t> header_index(std::string_view name) const;
};

/// Verifies, binds and compiles. Throws CompileError when verification reports errors.
CompiledGrammar compile_grammar(const AnnotatedGrammar& g, std::string source = {});

/// parse_zebu + compile_grammar.
CompiledGrammar compile_source(std::string_view source, std::string defaultProtocol = "zebu");

/// Accessor names in the `<proto>_<Entry>_get<Subfield>` convention, one per capture plus the
/// per-header, parse_headers and lazy-forcing entry points.
std::vector<std::string> accessor_names(const CompiledGrammar& g);

// ---------------------------------------------------------------------------

enum class ReasonCode { Syntax, Constraint, Range, MandatoryMissing, DuplicateHeader, Folding, Budget };
std::string_view to_string(ReasonCode code);

struct Reason {
    ReasonCode code = ReasonCode::Syntax;
    int line = 0;  ///< 1-based physical line, 0 when not tied to a line
    std::string message;
    bool operator==(const Reason&) const = default;
};

class ParseFailure : public std::runtime_error {
public:
    explicit ParseFailure(Reason r) : std::runtime_error(r.message), reason_(std::move(r)) {}
    const Reason& reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

class UnknownSubfield : public std::runtime_error {
public:
    explicit UnknownSubfield(const std::string& path) : std::runtime_error("unknown subfield '" + path + "'") {}
};

struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
    bool operator==(const ByteSpan&) const = default;
};

struct HeaderLine {
    ByteSpan key;                    ///< trailing SP/HTAB before the colon excluded
    std::vector<ByteSpan> segments;  ///< first: after the colon; then each continuation line
    int line = 0;
};

struct LineIndex {
    ByteSpan commandLine;
    std::vector<HeaderLine> headers;
    ByteSpan body;
    std::vector<Reason> errors;  ///< SYNTAX / FOLDING problems found by the scan
    bool ok() const noexcept { return errors.empty(); }
};

LineIndex index_message(std::string_view raw);

/// Joins the value segments of a header line, one SP per fold, leading whitespace dropped.
std::string unfold_value(std::string_view raw, const HeaderLine& h);

// ---------------------------------------------------------------------------

struct TypedValue;
using FieldMap = std::map<std::string, TypedValue>;

struct Absent {
    bool operator==(const Absent&) const = default;
};
struct RawSlice {
    std::string text;
    bool operator==(const RawSlice&) const = default;
};
struct U16 {
    std::uint16_t value = 0;
    bool operator==(const U16&) const = default;
};
struct U32 {
    std::uint32_t value = 0;
    bool operator==(const U32&) const = default;
};
struct EnumTag {
    int branch = 0;
    std::string text;
    bool operator==(const EnumTag&) const = default;
};
struct StructVal {
    std::shared_ptr<const FieldMap> fields;
    bool operator==(const StructVal& o) const;
};
struct UnionVal {
    int branch = 0;
    std::shared_ptr<const FieldMap> fields;
    bool operator==(const UnionVal& o) const;
};
/// Handle to an unparsed lazy subfield; resolve with Session::force_lazy.
struct LazyPending {
    int entry = 0;       ///< header index, or kRequestLineEntry / kStatusLineEntry
    int occurrence = 0;
    int capture = 0;
    int lazyRoot = 0;
    std::string text;    ///< raw span, not yet matched
    bool operator==(const LazyPending&) const = default;
};

struct TypedValue {
    std::variant<Absent, RawSlice, U16, U32, EnumTag, StructVal, UnionVal, LazyPending> v;

    template <typename T>
    const T* as() const { return std::get_if<T>(&v); }
    template <typename T>
    bool is() const { return std::holds_alternative<T>(v); }
    friend bool operator==(const TypedValue& a, const TypedValue& b) { return a.v == b.v; }
};

inline bool StructVal::operator==(const StructVal& o) const {
    return fields == o.fields || (fields && o.fields && *fields == *o.fields);
}
inline bool UnionVal::operator==(const UnionVal& o) const {
    return branch == o.branch && (fields == o.fields || (fields && o.fields && *fields == *o.fields));
}

/// Canonical text rendering, used by the CLI and in test failure messages.
std::string to_string(const TypedValue& v);

inline constexpr int kRequestLineEntry = -1;
inline constexpr int kStatusLineEntry = -2;

struct ParsedHeader {
    enum class State { Unparsed, Absent, ParsedOk, ParseFailed };
    int entry = 0;
    int occurrence = 0;
    int line = 0;
    std::string rawValue;  ///< unfolded
    State state = State::Unparsed;
    std::optional<Reason> failure;
    FieldMap subfields;  ///< top-level subfields
};

/// Single-owner parsing session over one message: line index, memo tables and counters.
class Session {
public:
    Session(const CompiledGrammar& g, std::string raw);

    const LineIndex& index() const noexcept { return index_; }
    std::string_view raw() const noexcept { return raw_; }

    /// Throws ParseFailure(SYNTAX) when the command line matches neither pattern.
    MessageKind message_type();
    const ParsedHeader& command_line();

    std::size_t occurrences(std::string_view header) const;
    const ParsedHeader& parse_header(std::string_view header) { return parse_header_nth(header, 0); }
    const ParsedHeader& parse_header_nth(std::string_view header, std::size_t n);
    /// Like parse_header_nth but by header index and without the duplicate check.
    const ParsedHeader& parse_occurrence(std::size_t entry, std::size_t n);
    /// Header lines (indices into index().headers) carrying a key of header `entry`.
    std::vector<std::size_t> lines_of(std::size_t entry) const;
    /// Declared header index per header line, -1 for undeclared keys.
    const std::vector<int>& line_entries() const noexcept { return lineEntry_; }

    /// Dotted path inside a parsed header. Lazy fields come back as LazyPending.
    TypedValue get_subfield(const ParsedHeader& h, std::string_view path);
    /// Throws ParseFailure on malformed content; memoized, including failures.
    TypedValue force_lazy(const LazyPending& handle);

    /// `Entry.sub.sub` selector; lazy fields along the path are forced when `force`.
    TypedValue select(std::string_view selector, bool force = true);

    std::size_t exec_counter() const noexcept { return execs_; }
    std::size_t lazy_counter() const noexcept { return lazyExecs_; }

private:
    const Pattern& pattern_for(int entry) const;
    TypedValue walk(const Pattern& p, TypedValue cur, const std::vector<std::string>& path, std::size_t from,
                    bool force);
    TypedValue convert(const Pattern& p, const MatchResult& m, int id, std::string_view text, bool deferred,
                       int entry, int occurrence, int lineNo) const;
    void fill(ParsedHeader& h, const Pattern& p, const MatchResult& m, bool deferred);

    const CompiledGrammar& g_;
    std::string raw_;
    LineIndex index_;
    std::vector<int> lineEntry_;
    std::optional<MessageKind> kind_;
    std::optional<Reason> kindFailure_;
    ParsedHeader command_;
    std::map<std::pair<int, int>, ParsedHeader> memo_;
    struct LazyMemo {
        std::optional<TypedValue> value;
        std::optional<Reason> failure;
    };
    std::map<std::tuple<int, int, int>, LazyMemo> lazyMemo_;
    std::size_t execs_ = 0;
    std::size_t lazyExecs_ = 0;
};

struct Verdict {
    bool accept = true;
    std::vector<Reason> reasons;
    std::optional<MessageKind> kind;
    std::string render() const;  ///< `ACCEPT` or one `REJECT <code> line:N <message>` per reason
};

/// Full validation: every declared header present is parsed, every lazy field forced,
/// mandatory/duplicate checks and all constraints evaluated. Reasons are exhaustive.
Verdict validate(const CompiledGrammar& g, std::string_view raw);
Verdict validate(const CompiledGrammar& g, Session& session);

/// Evaluates one bound constraint over a session; nullopt when a referenced field is unavailable.
std::optional<bool> evaluate_constraint(const CompiledGrammar& g, const Constraint& c, Session& s, MessageKind kind);

}  // namespace zebu
