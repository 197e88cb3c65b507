// SPDX-License-Identifier: Apache-2.0
#include "zebu/zebu.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>

#include "abnf_reader.hpp"

namespace zebu {

UnresolvedFieldRef::UnresolvedFieldRef(std::string path, std::string constraint, SourceSpan span)
    : std::runtime_error(to_string(span) + ": unresolved field reference '" + path + "' in constraint '" +
                         constraint + "'"),
      path_(std::move(path)),
      constraint_(std::move(constraint)),
      span_(span) {}

std::string_view to_string(MessageKind kind) { return kind == MessageKind::Request ? "request" : "response"; }

bool mandatory_in(Mandatory m, MessageKind kind) {
    switch (m) {
        case Mandatory::None: return false;
        case Mandatory::Both: return true;
        case Mandatory::Request: return kind == MessageKind::Request;
        case Mandatory::Response: return kind == MessageKind::Response;
    }
    return false;
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "==";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "==";
}

namespace {

std::string join_path(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) {
        if (!out.empty()) out += '.';
        out += p;
    }
    return out;
}

void print_expr(std::string& out, const ConstraintExpr& e, int parentPrec) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLiteral>) {
                out += std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, StringLiteral>) {
                out += '"' + n.value + '"';
            } else if constexpr (std::is_same_v<T, FieldRef>) {
                out += join_path(n.path);
            } else if constexpr (std::is_same_v<T, Compare>) {
                print_expr(out, *n.lhs, 4);
                out += ' ';
                out += to_string(n.op);
                out += ' ';
                print_expr(out, *n.rhs, 4);
            } else if constexpr (std::is_same_v<T, Logical>) {
                int prec = n.isAnd ? 2 : 1;
                if (prec < parentPrec) out += '(';
                for (std::size_t i = 0; i < n.operands.size(); ++i) {
                    if (i) out += n.isAnd ? " && " : " || ";
                    print_expr(out, n.operands[i], prec + 1);
                }
                if (prec < parentPrec) out += ')';
            } else if constexpr (std::is_same_v<T, Not>) {
                out += "!(";
                print_expr(out, *n.operand, 0);
                out += ')';
            }
        },
        e.node);
}

void collect_refs(const ConstraintExpr& e, std::vector<const FieldRef*>& out) {
    if (auto* f = e.as<FieldRef>()) out.push_back(f);
    else if (auto* c = e.as<Compare>()) {
        collect_refs(*c->lhs, out);
        collect_refs(*c->rhs, out);
    } else if (auto* l = e.as<Logical>()) {
        for (const auto& o : l->operands) collect_refs(o, out);
    } else if (auto* n = e.as<Not>()) {
        collect_refs(*n->operand, out);
    }
}

}  // namespace

std::string to_string(const ConstraintExpr& expr) {
    std::string out;
    print_expr(out, expr, 0);
    return out;
}

std::vector<const FieldRef*> field_refs(const ConstraintExpr& expr) {
    std::vector<const FieldRef*> out;
    collect_refs(expr, out);
    return out;
}

std::vector<std::string> header_keys(const HeaderDecl& decl) {
    std::vector<std::string> keys;
    std::function<void(const Element&)> walk = [&](const Element& e) {
        if (auto* lit = e.as<LiteralCI>()) keys.push_back(lit->text);
        else if (auto* alt = e.as<Alternation>())
            for (const auto& b : alt->branches) walk(b);
    };
    walk(decl.keyPattern);
    return keys;
}

const HeaderDecl* AnnotatedGrammar::find_header(std::string_view name) const {
    for (const auto& h : headers)
        if (iequals(h.name, name)) return &h;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Reader

namespace {

using detail::Cursor;
using detail::ElementParser;

struct PendingMandatory {
    std::string header;
    MessageKind kind;
    SourceSpan span;
};

class ExpressionParser {
public:
    explicit ExpressionParser(Cursor& c) : c_(c) {}

    ConstraintExpr parse() { return parse_or(); }

private:
    void skip() { c_.skip_all_space(false); }

    bool consume_op(std::string_view op) {
        skip();
        auto rest = c_.text().substr(c_.offset());
        if (rest.substr(0, op.size()) != op) return false;
        for (std::size_t i = 0; i < op.size(); ++i) c_.get();
        return true;
    }

    ConstraintExpr parse_or() {
        auto start = c_.span();
        std::vector<ConstraintExpr> operands;
        operands.push_back(parse_and());
        while (consume_op("||") || (skip(), c_.consume_word("OR"))) operands.push_back(parse_and());
        if (operands.size() == 1) return std::move(operands.front());
        return ConstraintExpr{Logical{false, std::move(operands)}, start};
    }

    ConstraintExpr parse_and() {
        auto start = c_.span();
        std::vector<ConstraintExpr> operands;
        operands.push_back(parse_not());
        while (consume_op("&&") || (skip(), c_.consume_word("AND"))) operands.push_back(parse_not());
        if (operands.size() == 1) return std::move(operands.front());
        return ConstraintExpr{Logical{true, std::move(operands)}, start};
    }

    ConstraintExpr parse_not() {
        skip();
        auto start = c_.span();
        if ((c_.peek() == '!' && c_.peek(1) != '=') || c_.consume_word("NOT")) {
            if (c_.peek() == '!') c_.get();
            return ConstraintExpr{Not{Box<ConstraintExpr>(parse_not())}, start};
        }
        return parse_compare();
    }

    ConstraintExpr parse_compare() {
        skip();
        auto start = c_.span();
        ConstraintExpr lhs = parse_primary();
        static constexpr std::pair<std::string_view, CompareOp> ops[] = {
            {"==", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<=", CompareOp::Le},
            {">=", CompareOp::Ge}, {"<", CompareOp::Lt},  {">", CompareOp::Gt},
        };
        for (const auto& [text, op] : ops) {
            if (consume_op(text)) {
                ConstraintExpr rhs = parse_primary();
                return ConstraintExpr{Compare{op, Box<ConstraintExpr>(std::move(lhs)), Box<ConstraintExpr>(std::move(rhs))},
                                      start};
            }
        }
        return lhs;
    }

    ConstraintExpr parse_primary() {
        skip();
        auto start = c_.span();
        char ch = c_.peek();
        if (ch == '(') {
            c_.get();
            ConstraintExpr inner = parse_or();
            skip();
            if (!c_.consume(')')) c_.fail("expected ')' in constraint");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::uint64_t value = 0;
            while (std::isdigit(static_cast<unsigned char>(c_.peek()))) {
                auto d = static_cast<std::uint64_t>(c_.get() - '0');
                if (value > (std::numeric_limits<std::uint64_t>::max() - d) / 10) c_.fail("integer literal too large");
                value = value * 10 + d;
            }
            return ConstraintExpr{IntLiteral{value}, start};
        }
        if (ch == '"') {
            c_.get();
            std::string text;
            while (c_.peek() != '"') {
                if (c_.at_end() || c_.at_newline()) Cursor::fail_at(start, "unterminated string in constraint");
                text.push_back(c_.get());
            }
            c_.get();
            return ConstraintExpr{StringLiteral{std::move(text)}, start};
        }
        if (detail::is_name_start(ch)) {
            FieldRef ref;
            ref.path.push_back(c_.read_identifier());
            while (c_.peek() == '.') {
                c_.get();
                auto part = c_.read_identifier();
                if (part.empty()) c_.fail("expected identifier after '.'");
                ref.path.push_back(std::move(part));
            }
            return ConstraintExpr{std::move(ref), start};
        }
        c_.fail(ch ? std::string("unexpected character '") + ch + "' in constraint" : "unexpected end of constraint");
    }

    Cursor& c_;
};

bool is_literal_key(const Element& e) {
    if (e.is<LiteralCI>()) return true;
    if (auto* alt = e.as<Alternation>())
        return std::all_of(alt->branches.begin(), alt->branches.end(), [](const Element& b) { return is_literal_key(b); });
    return false;
}

enum class BlockOwner { Header, RequestLine, StatusLine };

class ZebuReader {
public:
    ZebuReader(std::string_view source, AnnotatedGrammar& g) : c_(source), g_(g) {}

    void run() {
        for (;;) {
            c_.skip_all_space();
            if (c_.at_end()) break;
            auto start = c_.span();
            int column = c_.column();
            auto word = c_.read_identifier();
            if (word.empty()) c_.fail("expected rule, entry point or block");
            c_.skip_blanks();
            char next = c_.peek();
            if (word == "protocol" && next != '=' && next != ':') {
                auto name = c_.read_identifier();
                if (name.empty()) c_.fail("expected protocol name");
                g_.protocolName = name;
            } else if ((word == "request" || word == "response") && next == '{') {
                parse_block(word == "request" ? MessageKind::Request : MessageKind::Response);
            } else if (word == "header" && detail::is_name_start(next)) {
                parse_header(start, column);
            } else if (word == "requestLine" || word == "statusLine") {
                parse_entry_line(word == "requestLine" ? MessageKind::Request : MessageKind::Response, start, column);
            } else {
                parse_plain_rule(std::move(word), start, column);
            }
        }
        apply_pending_mandatory();
    }

private:
    void expect_equals(const std::string& what) {
        c_.skip_blanks();
        if (!c_.consume('=')) c_.fail("missing '=' after " + what);
    }

    Element parse_body(int column, const std::string& name) {
        c_.skip_rule_space(column);
        ElementParser parser(c_, column, true, name);
        Element body = parser.parse_alternation();
        c_.skip_rule_space(column);
        if (!c_.at_end() && !c_.at_newline() && c_.peek() != '{' && c_.peek() != '}')
            c_.fail(std::string("unexpected character '") + c_.peek() + "'");
        return body;
    }

    bool next_is_block() {
        c_.skip_all_space();
        return c_.peek() == '{';
    }

    void parse_plain_rule(std::string name, SourceSpan start, int column) {
        std::optional<Shape> shape;
        if (c_.consume(':')) {
            auto kw = c_.read_identifier();
            shape = shape_from_keyword(kw);
            if (!shape) throw UnknownAnnotation(c_.span(), "unknown rule type '" + kw + "'");
        }
        c_.skip_blanks();
        if (!c_.consume('=')) c_.fail("missing '=' after rule name '" + name + "'");
        bool incremental = c_.consume('/');
        Element body = parse_body(column, name);
        if (next_is_block())
            throw UnknownAnnotation(c_.span(), "annotation block on plain rule '" + name +
                                                   "'; only entry points and headers take annotations");
        if (incremental) {
            Rule* existing = g_.baseGrammar.find_mutable(name);
            if (!existing) Cursor::fail_at(start, "incremental alternative for undefined rule '" + name + "'");
            Alternation merged;
            if (auto* alt = existing->body.as<Alternation>()) merged = *alt;
            else merged.branches.push_back(existing->body);
            if (auto* alt = body.as<Alternation>()) {
                for (auto& b : alt->branches) merged.branches.push_back(b);
            } else {
                merged.branches.push_back(std::move(body));
            }
            existing->body = Element{std::move(merged), existing->body.span};
            return;
        }
        g_.baseGrammar.add(Rule{std::move(name), std::move(body), start, shape});
    }

    void parse_entry_line(MessageKind kind, SourceSpan start, int column) {
        std::string name = kind == MessageKind::Request ? "requestLine" : "statusLine";
        expect_equals(name);
        Element body = parse_body(column, name);
        auto& slot = kind == MessageKind::Request ? g_.requestLine : g_.statusLine;
        if (slot) throw DuplicateEntryPoint(start, "duplicate " + name + " declaration (first at " + to_string(slot->span) + ")");
        slot = Rule{name, std::move(body), start, std::nullopt};
        if (next_is_block()) parse_annotations(kind == MessageKind::Request ? BlockOwner::RequestLine : BlockOwner::StatusLine,
                                               nullptr, kind);
    }

    void parse_block(MessageKind kind) {
        c_.consume('{');
        c_.skip_all_space();
        auto start = c_.span();
        int column = c_.column();
        auto word = c_.read_identifier();
        std::string expected = kind == MessageKind::Request ? "requestLine" : "statusLine";
        if (word != expected)
            Cursor::fail_at(start, "expected '" + expected + "' inside " + std::string(to_string(kind)) + " block");
        parse_entry_line(kind, start, column);
        c_.skip_all_space();
        if (!c_.consume('}')) c_.fail("expected '}' closing " + std::string(to_string(kind)) + " block");
    }

    void parse_header(SourceSpan start, int column) {
        HeaderDecl decl;
        decl.span = start;
        decl.name = c_.read_identifier();
        c_.skip_blanks();
        if (c_.consume('{')) {
            c_.skip_all_space();
            ElementParser parser(c_, -1, false, decl.name);
            decl.keyPattern = parser.parse_alternation();
            c_.skip_all_space();
            if (!c_.consume('}')) c_.fail("expected '}' after header key variants");
            if (!is_literal_key(decl.keyPattern))
                Cursor::fail_at(decl.keyPattern.span, "header key variants must be quoted strings separated by '/'");
        } else {
            decl.keyPattern = Element{LiteralCI{decl.name}, start};
        }
        expect_equals("header " + decl.name);
        decl.body = parse_body(column, decl.name);
        collect_direct_subfields(decl.body, decl.subfields);
        g_.headers.push_back(std::move(decl));
        if (next_is_block()) parse_annotations(BlockOwner::Header, &g_.headers.back(), MessageKind::Request);
    }

    static void collect_direct_subfields(const Element& e, std::vector<SubfieldAnnotation>& out) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Named>) {
                    std::string attached;
                    if (auto* ref = n.inner->template as<RuleRef>()) attached = ref->name;
                    out.push_back({n.name, n.shape.value_or(Shape::RawSlice), n.lazy, attached, e.span});
                } else if constexpr (std::is_same_v<T, Sequence>) {
                    for (const auto& i : n.items) collect_direct_subfields(i, out);
                } else if constexpr (std::is_same_v<T, Alternation>) {
                    for (const auto& b : n.branches) collect_direct_subfields(b, out);
                } else if constexpr (std::is_same_v<T, Repetition>) {
                    collect_direct_subfields(*n.inner, out);
                }
            },
            e.node);
    }

    void parse_annotations(BlockOwner owner, HeaderDecl* header, MessageKind kind) {
        c_.consume('{');
        for (;;) {
            c_.skip_all_space(false);
            if (c_.consume('}')) return;
            if (c_.at_end()) c_.fail("unterminated annotation block");
            if (c_.consume(';')) continue;
            parse_statement(owner, header, kind);
            c_.skip_all_space(false);
            if (c_.consume(';')) continue;
            if (c_.peek() == '}') continue;
            c_.fail("expected ';' or '}' in annotation block");
        }
    }

    bool at_statement_end() {
        c_.skip_blanks();
        c_.skip_all_space(false);
        return c_.peek() == ';' || c_.peek() == '}';
    }

    void parse_statement(BlockOwner owner, HeaderDecl* header, MessageKind kind) {
        auto start = c_.span();
        auto startOffset = c_.offset();
        if (detail::is_name_start(c_.peek())) {
            // Keyword statements; anything else is rewound and parsed as an expression.
            Cursor saved = c_;
            auto word = c_.read_identifier();
            bool isPath = c_.peek() == '.';
            if (!isPath && word == "mandatory") {
                if (owner == BlockOwner::Header) {
                    if (!at_statement_end()) c_.fail("'mandatory' in a header block takes no argument");
                    header->mandatoryIn = Mandatory::Both;
                } else {
                    c_.skip_blanks();
                    auto target = c_.read_identifier();
                    if (target.empty()) c_.fail("expected header name after 'mandatory'");
                    pending_.push_back({target, kind, start});
                }
                return;
            }
            if (!isPath && (word == "multiple" || word == "readonly")) {
                if (owner != BlockOwner::Header)
                    throw UnknownAnnotation(start, "'" + word + "' applies only to header declarations");
                if (!at_statement_end()) c_.fail("'" + word + "' takes no argument");
                if (word == "multiple") header->multiple = true;
                else header->readOnly = true;
                return;
            }
            c_ = saved;
        }
        ExpressionParser parser(c_);
        ConstraintExpr expr = parser.parse();
        if (expr.as<FieldRef>() || expr.as<IntLiteral>() || expr.as<StringLiteral>()) {
            std::string word = expr.as<FieldRef>() ? join_path(expr.as<FieldRef>()->path) : "literal";
            throw UnknownAnnotation(start, "unknown annotation '" + word + "'");
        }
        std::string text(c_.text().substr(startOffset, c_.offset() - startOffset));
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
        Constraint constraint{std::move(expr), std::move(text), start, false};
        switch (owner) {
            case BlockOwner::Header: header->localConstraints.push_back(std::move(constraint)); break;
            case BlockOwner::RequestLine: g_.requestBlock.push_back(std::move(constraint)); break;
            case BlockOwner::StatusLine: g_.responseBlock.push_back(std::move(constraint)); break;
        }
    }

    void apply_pending_mandatory() {
        for (const auto& p : pending_) {
            HeaderDecl* decl = nullptr;
            for (auto& h : g_.headers)
                if (iequals(h.name, p.header)) {
                    decl = &h;
                    break;
                }
            if (!decl) throw SyntaxError(p.span, "'mandatory' names undeclared header '" + p.header + "'");
            Mandatory add = p.kind == MessageKind::Request ? Mandatory::Request : Mandatory::Response;
            if (decl->mandatoryIn == Mandatory::None) decl->mandatoryIn = add;
            else if (decl->mandatoryIn != add) decl->mandatoryIn = Mandatory::Both;
        }
    }

    Cursor c_;
    AnnotatedGrammar& g_;
    std::vector<PendingMandatory> pending_;
};

}  // namespace

AnnotatedGrammar parse_zebu(std::string_view source, std::string defaultProtocol) {
    AnnotatedGrammar g;
    g.protocolName = std::move(defaultProtocol);
    ZebuReader reader(source, g);
    reader.run();
    return g;
}

// ---------------------------------------------------------------------------
// Subfield namespaces

namespace {

constexpr int kMaxScanDepth = 256;

const Element* strip_to_alternation(const Element* e, const Grammar& g, int depth = 0) {
    while (e && depth++ < kMaxScanDepth) {
        if (e->is<Alternation>()) return e;
        if (auto* ref = e->as<RuleRef>()) {
            const Rule* r = resolve_rule(g, ref->name);
            e = r ? &r->body : nullptr;
        } else if (auto* named = e->as<Named>()) {
            e = &*named->inner;
        } else {
            return nullptr;
        }
    }
    return nullptr;
}

bool ci_literals_only(const Element& e, const Grammar& g, int depth = 0) {
    if (depth > kMaxScanDepth) return false;
    if (e.is<LiteralCI>()) return true;
    if (auto* alt = e.as<Alternation>())
        return std::all_of(alt->branches.begin(), alt->branches.end(),
                           [&](const Element& b) { return ci_literals_only(b, g, depth + 1); });
    if (auto* ref = e.as<RuleRef>()) {
        const Rule* r = resolve_rule(g, ref->name);
        return r && ci_literals_only(r->body, g, depth + 1);
    }
    if (auto* named = e.as<Named>()) return ci_literals_only(*named->inner, g, depth + 1);
    return false;
}

class SubfieldScanner {
public:
    SubfieldScanner(const Grammar& g, std::vector<SubfieldIssue>& issues) : g_(g), issues_(issues) {}

    std::vector<SubfieldNode> walk(const Element& e, bool underRep, int depth) {
        if (depth > kMaxScanDepth) {
            if (!depthReported_) {
                issues_.push_back({SubfieldIssue::Kind::DepthExceeded, "", e.span, "rule nesting too deep (cycle?)"});
                depthReported_ = true;
            }
            return {};
        }
        std::vector<SubfieldNode> out;
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, RuleRef>) {
                    if (const Rule* r = resolve_rule(g_, n.name)) out = walk(r->body, underRep, depth + 1);
                } else if constexpr (std::is_same_v<T, Sequence>) {
                    for (const auto& item : n.items) merge_disjoint(out, walk(item, underRep, depth + 1));
                } else if constexpr (std::is_same_v<T, Alternation>) {
                    for (const auto& b : n.branches) merge_exclusive(out, walk(b, underRep, depth + 1));
                } else if constexpr (std::is_same_v<T, Repetition>) {
                    out = walk(*n.inner, underRep || n.max > 1, depth + 1);
                } else if constexpr (std::is_same_v<T, Named>) {
                    out.push_back(named_node(n, e.span, underRep, depth));
                }
            },
            e.node);
        return out;
    }

private:
    SubfieldNode named_node(const Named& n, SourceSpan span, bool underRep, int depth) {
        SubfieldNode node;
        node.name = n.name;
        node.lazy = n.lazy;
        node.span = span;
        node.underRepetition = underRep;
        std::optional<Shape> defShape;
        if (auto* ref = n.inner->as<RuleRef>()) {
            node.attachedTo = ref->name;
            if (const Rule* r = resolve_rule(g_, ref->name)) defShape = r->shape;
        }
        if (n.shape && defShape)
            issues_.push_back({SubfieldIssue::Kind::ShapeCollision, n.name, span,
                               "subfield '" + n.name + "' is typed both at the reference and at the definition of '" +
                                   node.attachedTo + "'"});
        node.shape = n.shape ? *n.shape : defShape.value_or(Shape::RawSlice);
        node.caseInsensitive = ci_literals_only(*n.inner, g_);
        if (node.shape == Shape::Struct) {
            node.children = walk(*n.inner, false, depth + 1);
        } else if (node.shape == Shape::Union) {
            if (const Element* altElem = strip_to_alternation(&*n.inner, g_)) {
                const auto& alt = *altElem->as<Alternation>();
                for (std::size_t i = 0; i < alt.branches.size(); ++i) {
                    auto branch = walk(alt.branches[i], false, depth + 1);
                    std::vector<SubfieldNode> scoped;
                    merge_disjoint(scoped, std::move(branch));
                    for (auto& c : scoped) {
                        c.unionBranch = static_cast<int>(i);
                        node.children.push_back(std::move(c));
                    }
                }
            }
        }
        return node;
    }

    void merge_disjoint(std::vector<SubfieldNode>& into, std::vector<SubfieldNode> more) {
        for (auto& m : more) {
            auto it = std::find_if(into.begin(), into.end(), [&](const SubfieldNode& x) { return x.name == m.name; });
            if (it != into.end()) {
                issues_.push_back({SubfieldIssue::Kind::Duplicate, m.name, m.span,
                                   "duplicate subfield '" + m.name + "' (first declared at " + to_string(it->span) + ")"});
                continue;
            }
            into.push_back(std::move(m));
        }
    }

    void merge_exclusive(std::vector<SubfieldNode>& into, std::vector<SubfieldNode> more) {
        for (auto& m : more) {
            auto it = std::find_if(into.begin(), into.end(), [&](const SubfieldNode& x) { return x.name == m.name; });
            if (it == into.end()) {
                into.push_back(std::move(m));
                continue;
            }
            if (it->shape != m.shape || it->lazy != m.lazy) {
                issues_.push_back({SubfieldIssue::Kind::Duplicate, m.name, m.span,
                                   "subfield '" + m.name + "' redeclared with a different type in another branch"});
                continue;
            }
            it->underRepetition = it->underRepetition || m.underRepetition;
            it->caseInsensitive = it->caseInsensitive && m.caseInsensitive;
            merge_exclusive(it->children, std::move(m.children));
        }
    }

    const Grammar& g_;
    std::vector<SubfieldIssue>& issues_;
    bool depthReported_ = false;
};

}  // namespace

SubfieldScan scan_subfields(const Element& body, const Grammar& grammar) {
    SubfieldScan scan;
    SubfieldScanner scanner(grammar, scan.issues);
    scan.roots = scanner.walk(body, false, 0);
    return scan;
}

const Element* entry_body(const AnnotatedGrammar& g, EntryKind kind, std::string_view entry) {
    switch (kind) {
        case EntryKind::RequestLine: return g.requestLine ? &g.requestLine->body : nullptr;
        case EntryKind::StatusLine: return g.statusLine ? &g.statusLine->body : nullptr;
        case EntryKind::Header: {
            const HeaderDecl* h = g.find_header(entry);
            return h ? &h->body : nullptr;
        }
        case EntryKind::Message: return nullptr;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Binding

namespace {

struct OwnEntry {
    EntryKind kind;
    std::string name;
};

class Binder {
public:
    explicit Binder(AnnotatedGrammar& g) : g_(g) {}

    void bind(Constraint& c, const OwnEntry& own) {
        bind_expr(c.expr, c);
        c.liftedToRange = try_lift(c, own);
    }

private:
    const std::vector<SubfieldNode>& roots_for(EntryKind kind, const std::string& entry) {
        std::string key = std::to_string(static_cast<int>(kind)) + ":" + fold_case(entry);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const Element* body = entry_body(g_, kind, entry);
        std::vector<SubfieldNode> roots;
        if (body) roots = scan_subfields(*body, g_.baseGrammar).roots;
        return cache_.emplace(key, std::move(roots)).first->second;
    }

    void bind_expr(ConstraintExpr& e, const Constraint& owner) {
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FieldRef>) {
                    n.binding = resolve(n, owner, e.span);
                } else if constexpr (std::is_same_v<T, Compare>) {
                    bind_expr(*n.lhs, owner);
                    bind_expr(*n.rhs, owner);
                } else if constexpr (std::is_same_v<T, Logical>) {
                    for (auto& o : n.operands) bind_expr(o, owner);
                } else if constexpr (std::is_same_v<T, Not>) {
                    bind_expr(*n.operand, owner);
                }
            },
            e.node);
    }

    FieldBinding resolve(const FieldRef& ref, const Constraint& owner, SourceSpan span) {
        auto fail = [&]() -> FieldBinding { throw UnresolvedFieldRef(join_path(ref.path), owner.text, span); };
        if (ref.path.size() < 2) return fail();
        FieldBinding b;
        const std::string& head = ref.path[0];
        if (head == "message") {
            if (ref.path.size() != 2 || ref.path[1] != "kind") return fail();
            b.kind = EntryKind::Message;
            b.entry = "message";
            b.path = {"kind"};
            b.caseInsensitive = true;
            return b;
        }
        if (head == "requestLine" && g_.requestLine) {
            b.kind = EntryKind::RequestLine;
            b.entry = "requestLine";
        } else if (head == "statusLine" && g_.statusLine) {
            b.kind = EntryKind::StatusLine;
            b.entry = "statusLine";
        } else if (const HeaderDecl* h = g_.find_header(head)) {
            b.kind = EntryKind::Header;
            b.entry = h->name;
        } else {
            return fail();
        }
        const std::vector<SubfieldNode>* scope = &roots_for(b.kind, b.entry);
        const SubfieldNode* node = nullptr;
        for (std::size_t i = 1; i < ref.path.size(); ++i) {
            if (!scope) return fail();
            auto it = std::find_if(scope->begin(), scope->end(),
                                   [&](const SubfieldNode& n) { return n.name == ref.path[i]; });
            if (it == scope->end()) return fail();
            node = &*it;
            b.path.push_back(node->name);
            scope = node->children.empty() ? nullptr : &node->children;
        }
        b.shape = node->shape;
        b.caseInsensitive = node->caseInsensitive;
        return b;
    }

    static bool is_numeric(Shape s) { return s == Shape::Uint16 || s == Shape::Uint32; }

    bool try_lift(const Constraint& c, const OwnEntry& own) {
        std::vector<const Compare*> comparisons;
        if (auto* cmp = c.expr.as<Compare>()) {
            comparisons.push_back(cmp);
        } else if (auto* logical = c.expr.as<Logical>(); logical && logical->isAnd) {
            for (const auto& o : logical->operands) {
                auto* cmp = o.as<Compare>();
                if (!cmp) return false;
                comparisons.push_back(cmp);
            }
        } else {
            return false;
        }

        const FieldBinding* target = nullptr;
        RangeConstraint range{0, std::numeric_limits<std::uint64_t>::max(), false};
        auto effective_max = [](const RangeConstraint& r) -> std::int64_t {
            if (r.hiStrict) return r.hi == 0 ? -1 : static_cast<std::int64_t>(r.hi - 1);
            return r.hi > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())
                       ? std::numeric_limits<std::int64_t>::max()
                       : static_cast<std::int64_t>(r.hi);
        };
        for (const Compare* cmp : comparisons) {
            const FieldRef* field = cmp->lhs->as<FieldRef>();
            const IntLiteral* lit = cmp->rhs->as<IntLiteral>();
            CompareOp op = cmp->op;
            if (!field || !lit) {
                field = cmp->rhs->as<FieldRef>();
                lit = cmp->lhs->as<IntLiteral>();
                // Mirror so the field is on the left.
                switch (op) {
                    case CompareOp::Lt: op = CompareOp::Gt; break;
                    case CompareOp::Le: op = CompareOp::Ge; break;
                    case CompareOp::Gt: op = CompareOp::Lt; break;
                    case CompareOp::Ge: op = CompareOp::Le; break;
                    default: break;
                }
            }
            if (!field || !lit || !field->binding) return false;
            if (!is_numeric(field->binding->shape)) return false;
            if (target && !(target->kind == field->binding->kind && target->entry == field->binding->entry &&
                            target->path == field->binding->path))
                return false;
            target = &*field->binding;
            std::uint64_t v = lit->value;
            RangeConstraint next = range;
            switch (op) {
                case CompareOp::Eq:
                    next.lo = std::max(range.lo, v);
                    next.hi = v;
                    next.hiStrict = false;
                    break;
                case CompareOp::Ne: return false;
                case CompareOp::Lt: next.hi = v; next.hiStrict = true; break;
                case CompareOp::Le: next.hi = v; next.hiStrict = false; break;
                case CompareOp::Gt:
                    if (v == std::numeric_limits<std::uint64_t>::max()) return false;
                    next.lo = std::max(range.lo, v + 1);
                    break;
                case CompareOp::Ge: next.lo = std::max(range.lo, v); break;
            }
            if (op == CompareOp::Lt || op == CompareOp::Le || op == CompareOp::Eq) {
                if (effective_max(next) > effective_max(range)) {
                    next.hi = range.hi;
                    next.hiStrict = range.hiStrict;
                }
            }
            range = next;
        }
        if (!target) return false;
        if (target->kind != own.kind) return false;
        if (target->kind == EntryKind::Header && !iequals(target->entry, own.name)) return false;

        std::string key = target->entry + "." + join_path(target->path);
        auto [it, inserted] = g_.rangeConstraints.emplace(key, range);
        if (!inserted) {
            RangeConstraint& existing = it->second;
            existing.lo = std::max(existing.lo, range.lo);
            if (effective_max(range) < effective_max(existing)) {
                existing.hi = range.hi;
                existing.hiStrict = range.hiStrict;
            }
        }
        return true;
    }

    AnnotatedGrammar& g_;
    std::map<std::string, std::vector<SubfieldNode>> cache_;
};

}  // namespace

AnnotatedGrammar resolve_constraint_refs(AnnotatedGrammar g) {
    g.rangeConstraints.clear();
    Binder binder(g);
    for (auto& c : g.requestBlock) binder.bind(c, {EntryKind::RequestLine, "requestLine"});
    for (auto& c : g.responseBlock) binder.bind(c, {EntryKind::StatusLine, "statusLine"});
    for (auto& h : g.headers)
        for (auto& c : h.localConstraints) binder.bind(c, {EntryKind::Header, h.name});
    return g;
}

}  // namespace zebu
