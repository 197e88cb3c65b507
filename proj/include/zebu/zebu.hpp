// SPDX-License-Identifier: Apache-2.0
//
// The annotated grammar dialect: ABNF plus entry points (requestLine, statusLine, header),
// request/response blocks, header flags, constraint expressions and typed subfields.
// See docs/zebu-dialect.md for the concrete syntax.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "zebu/abnf.hpp"

namespace zebu {

class DuplicateEntryPoint : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class UnknownAnnotation : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class UnresolvedFieldRef : public std::runtime_error {
public:
    UnresolvedFieldRef(std::string path, std::string constraint, SourceSpan span);
    const std::string& path() const noexcept { return path_; }
    const std::string& constraint() const noexcept { return constraint_; }
    const SourceSpan& span() const noexcept { return span_; }

private:
    std::string path_;
    std::string constraint_;
    SourceSpan span_;
};

enum class MessageKind { Request, Response };
std::string_view to_string(MessageKind kind);

enum class Mandatory { None, Request, Response, Both };
bool mandatory_in(Mandatory m, MessageKind kind);

// ---------------------------------------------------------------------------
// Constraint expressions

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view to_string(CompareOp op);

enum class EntryKind { RequestLine, StatusLine, Header, Message };

/// Where a field reference points once bound: an entry point plus a subfield path inside it.
/// `Message` is the built-in `message.kind`.
struct FieldBinding {
    EntryKind kind = EntryKind::Header;
    std::string entry;                ///< "requestLine", "statusLine" or the declared header name
    std::vector<std::string> path;    ///< subfield path within the entry
    Shape shape = Shape::RawSlice;    ///< shape of the final subfield
    bool caseInsensitive = false;     ///< text derives from case-insensitive literals only
    bool operator==(const FieldBinding&) const = default;
};

struct IntLiteral {
    std::uint64_t value = 0;
    bool operator==(const IntLiteral&) const = default;
};

struct StringLiteral {
    std::string value;
    bool operator==(const StringLiteral&) const = default;
};

struct FieldRef {
    std::vector<std::string> path;
    std::optional<FieldBinding> binding;
    bool operator==(const FieldRef&) const = default;
};

struct ConstraintExpr;

struct Compare {
    CompareOp op = CompareOp::Eq;
    Box<ConstraintExpr> lhs;
    Box<ConstraintExpr> rhs;
    bool operator==(const Compare&) const = default;
};

struct Logical {
    bool isAnd = true;
    std::vector<ConstraintExpr> operands;
    bool operator==(const Logical&) const;
};

struct Not {
    Box<ConstraintExpr> operand;
    bool operator==(const Not&) const = default;
};

struct ConstraintExpr {
    std::variant<IntLiteral, StringLiteral, FieldRef, Compare, Logical, Not> node;
    SourceSpan span;

    template <typename T>
    const T* as() const { return std::get_if<T>(&node); }

    friend bool operator==(const ConstraintExpr& a, const ConstraintExpr& b) { return a.node == b.node; }
};

inline bool Logical::operator==(const Logical& o) const { return isAnd == o.isAnd && operands == o.operands; }

struct Constraint {
    ConstraintExpr expr;
    std::string text;   ///< source text, for diagnostics
    SourceSpan span;
    /// Set when the constraint is a pure numeric range on one subfield of its own entry point;
    /// it is then enforced at parse time (RANGE) instead of at validation (CONSTRAINT).
    bool liftedToRange = false;

    friend bool operator==(const Constraint& a, const Constraint& b) {
        return a.expr == b.expr && a.text == b.text && a.liftedToRange == b.liftedToRange;
    }
};

std::string to_string(const ConstraintExpr& expr);
std::vector<const FieldRef*> field_refs(const ConstraintExpr& expr);

/// Inclusive lower bound, upper bound exclusive when `hiStrict`.
struct RangeConstraint {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool hiStrict = false;
    bool contains(std::uint64_t v) const noexcept { return v >= lo && (hiStrict ? v < hi : v <= hi); }
    bool operator==(const RangeConstraint&) const = default;
};

// ---------------------------------------------------------------------------
// Entry points

struct SubfieldAnnotation {
    std::string name;
    Shape shape = Shape::RawSlice;
    bool lazy = false;
    std::string attachedTo;  ///< referenced rule name, or empty for an inline element
    SourceSpan span;
};

struct HeaderDecl {
    std::string name;
    Element keyPattern;   ///< case-insensitive literal or alternation of them
    Element body;         ///< value grammar, key and delimiter removed
    Mandatory mandatoryIn = Mandatory::None;
    bool multiple = false;
    bool readOnly = false;  ///< accepted and recorded; carries no enforcement
    std::vector<SubfieldAnnotation> subfields;
    std::vector<Constraint> localConstraints;
    SourceSpan span;
};

/// All literal keys a header can be written with.
std::vector<std::string> header_keys(const HeaderDecl& decl);

struct AnnotatedGrammar {
    std::string protocolName;
    Grammar baseGrammar;
    std::optional<Rule> requestLine;
    std::optional<Rule> statusLine;
    std::vector<HeaderDecl> headers;
    std::vector<Constraint> requestBlock;
    std::vector<Constraint> responseBlock;
    /// Keyed by "<entry>.<subfield path>", e.g. "CSeq.number" or "statusLine.code".
    std::map<std::string, RangeConstraint> rangeConstraints;

    const HeaderDecl* find_header(std::string_view name) const;
};

/// Parses an annotated grammar. `defaultProtocol` names the protocol when the file has no
/// `protocol` directive.
AnnotatedGrammar parse_zebu(std::string_view source, std::string defaultProtocol = "zebu");

// ---------------------------------------------------------------------------
// Subfield namespaces

/// One named subfield as seen from an entry point, after following rule references.
struct SubfieldNode {
    std::string name;
    Shape shape = Shape::RawSlice;
    bool lazy = false;
    bool underRepetition = false;  ///< sits under an unbounded repetition
    bool caseInsensitive = false;  ///< content is an alternation of case-insensitive literals
    int unionBranch = -1;          ///< branch of the enclosing union, if any
    SourceSpan span;
    std::string attachedTo;
    std::vector<SubfieldNode> children;  ///< only for struct/union shapes
};

struct SubfieldIssue {
    enum class Kind { Duplicate, ShapeCollision, DepthExceeded } kind;
    std::string name;
    SourceSpan span;
    std::string message;
};

struct SubfieldScan {
    std::vector<SubfieldNode> roots;
    std::vector<SubfieldIssue> issues;
};

/// Collects the subfield tree of an entry body. Names may repeat only across alternation
/// branches (mutually exclusive positions) and only with identical shape and laziness.
SubfieldScan scan_subfields(const Element& body, const Grammar& grammar);

/// Binds every field reference of every constraint and lifts pure range constraints.
/// Throws UnresolvedFieldRef on the first reference that does not resolve. Idempotent.
AnnotatedGrammar resolve_constraint_refs(AnnotatedGrammar g);

/// Entry body for a binding target (`requestLine`, `statusLine` or a header name); null if unknown.
const Element* entry_body(const AnnotatedGrammar& g, EntryKind kind, std::string_view entry);

}  // namespace zebu
