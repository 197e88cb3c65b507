// SPDX-License-Identifier: Apache-2.0
#include "zebu/mutation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace zebu {

namespace {

using Node = DerivationNode;

std::uint64_t splitmix(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : e_(seed) {}
    std::uint64_t next() { return e_(); }
    std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(e_() % n) : 0; }
    bool coin() { return e_() & 1; }
    std::size_t geometric(std::size_t cap) {
        std::size_t k = 0;
        while (k < cap && coin()) ++k;
        return k;
    }
    double unit() { return static_cast<double>(e_() >> 11) * 0x1.0p-53; }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 e_;
};

bool is_ws(char c) { return c == ' ' || c == '\t'; }
bool is_crlf_byte(unsigned char c) { return c == '\r' || c == '\n'; }

std::string escape(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (c >= 0x21 && c < 0x7F && c != '\\') {
            out += static_cast<char>(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02X", c);
            out += buf;
        }
    }
    return out;
}

std::uint64_t pow10(std::size_t k) {
    std::uint64_t v = 1;
    while (k--) v *= 10;
    return v;
}

std::size_t digits_of(std::uint64_t v) { return std::to_string(v).size(); }

std::uint64_t shape_max(Shape s) { return s == Shape::Uint16 ? 0xFFFFull : 0xFFFFFFFFull; }
bool is_numeric(Shape s) { return s == Shape::Uint16 || s == Shape::Uint32; }

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : ".") + p;
    return out;
}

std::string binding_key(const FieldBinding& b) {
    std::string out = b.entry;
    for (const auto& p : b.path) out += "." + p;
    return out;
}

struct Equality {
    std::string lhs, rhs, text;
    bool ci = false;
};

void collect_equalities(const ConstraintExpr& e, const std::string& text, std::vector<Equality>& out) {
    if (auto* l = e.as<Logical>()) {
        if (l->isAnd)
            for (const auto& o : l->operands) collect_equalities(o, text, out);
        return;
    }
    auto* c = e.as<Compare>();
    if (!c || c->op != CompareOp::Eq) return;
    auto* a = c->lhs->as<FieldRef>();
    auto* b = c->rhs->as<FieldRef>();
    if (!a || !b || !a->binding || !b->binding) return;
    if (a->binding->kind == EntryKind::Message || b->binding->kind == EntryKind::Message) return;
    out.push_back(Equality{binding_key(*a->binding), binding_key(*b->binding), text,
                           a->binding->caseInsensitive && b->binding->caseInsensitive});
}

std::vector<Equality> equalities(const AnnotatedGrammar& a, MessageKind kind) {
    std::vector<Equality> out;
    for (const auto& c : kind == MessageKind::Request ? a.requestBlock : a.responseBlock)
        collect_equalities(c.expr, c.text, out);
    for (const auto& h : a.headers)
        for (const auto& c : h.localConstraints) collect_equalities(c.expr, c.text, out);
    return out;
}

const AnnotatedGrammar& annotated(const CompiledGrammar& g) {
    if (!g.annotated) throw std::logic_error("compiled grammar carries no annotated source");
    return *g.annotated;
}

// ---------------------------------------------------------------------------

class Deriver {
public:
    Deriver(const CompiledGrammar& g, Rng& rng, std::size_t budget)
        : a_(annotated(g)), base_(a_.baseGrammar), rng_(rng), budget_(budget) {}

    DerivationTree run(MessageKind kind) {
        for (const auto& eq : equalities(a_, kind)) {
            partners_[eq.lhs] = eq.rhs;
            partners_[eq.rhs] = eq.lhs;
        }
        Node root;
        root.kind = Node::Kind::Message;
        root.label = std::string(to_string(kind));
        open(root);

        const Rule& cmd = kind == MessageKind::Request ? *a_.requestLine : *a_.statusLine;
        entry_ = kind == MessageKind::Request ? "requestLine" : "statusLine";
        Node line;
        line.kind = Node::Kind::Line;
        line.label = line.key = entry_;
        line.entry = kind == MessageKind::Request ? kRequestLineEntry : kStatusLineEntry;
        open(line);
        derive(cmd.body);
        terminal(Node::Term::Structural, "CRLF", "\r\n");
        close();

        std::vector<std::size_t> order(a_.headers.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng_.shuffle(order);
        for (std::size_t i : order) {
            const HeaderDecl& decl = a_.headers[i];
            if (!mandatory_in(decl.mandatoryIn, kind) && !rng_.coin()) continue;
            std::size_t count = decl.multiple ? 1 + rng_.geometric(1) : 1;
            auto keys = header_keys(decl);
            for (std::size_t occ = 0; occ < count; ++occ) {
                Node h;
                h.kind = Node::Kind::Line;
                h.label = h.key = decl.name;
                h.entry = static_cast<int>(i);
                open(h);
                const std::string& key = keys[rng_.below(keys.size())];
                terminal(Node::Term::CaseInsensitive, key, key);
                terminal(Node::Term::Exact, ":", ":");
                terminal(Node::Term::Exact, "SP", " ");
                entry_ = decl.name;
                derive(decl.body);
                terminal(Node::Term::Structural, "CRLF", "\r\n");
                close();
            }
        }
        terminal(Node::Term::Structural, "CRLF", "\r\n");
        close();
        return DerivationTree{std::move(out_), kind, std::move(nodes_)};
    }

    /// Fresh derivation of one named field, for constraint mutants.
    std::string sample(const Node& named) {
        auto dot = named.key.find('.');
        entry_ = named.key.substr(0, dot);
        std::string rest = named.key.substr(dot + 1);
        path_.clear();
        for (std::size_t p = 0, q; (q = rest.find('.', p)) != std::string::npos; p = q + 1)
            path_.push_back(rest.substr(p, q - p));
        derive(*named.element);
        return out_;
    }

private:
    int open(Node n) {
        n.begin = out_.size();
        n.parent = stack_.empty() ? -1 : stack_.back();
        nodes_.push_back(std::move(n));
        stack_.push_back(static_cast<int>(nodes_.size()) - 1);
        return stack_.back();
    }
    void close() {
        Node& n = nodes_[stack_.back()];
        n.end = out_.size();
        n.last = static_cast<int>(nodes_.size());
        stack_.pop_back();
    }
    void terminal(Node::Term term, std::string label, std::string_view bytes, unsigned char lo = 0,
                  unsigned char hi = 0) {
        Node n;
        n.kind = Node::Kind::Terminal;
        n.term = term;
        n.label = std::move(label);
        n.lo = lo;
        n.hi = hi;
        open(std::move(n));
        out_ += bytes;
        close();
    }

    bool safe(const Element& e) {
        if (auto it = safe_.find(&e); it != safe_.end()) return it->second;
        bool ok = std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, LiteralCI>) {
                    return x.text.find_first_of("\r\n") == std::string::npos;
                } else if constexpr (std::is_same_v<T, CharCodes>) {
                    return x.bytes.find_first_of("\r\n") == std::string::npos;
                } else if constexpr (std::is_same_v<T, CharRange>) {
                    for (unsigned b = x.lo; b <= x.hi; ++b)
                        if (!is_crlf_byte(static_cast<unsigned char>(b))) return true;
                    return false;
                } else if constexpr (std::is_same_v<T, RuleRef>) {
                    const Rule* r = resolve_rule(base_, x.name);
                    return r && safe(r->body);
                } else if constexpr (std::is_same_v<T, Sequence>) {
                    return std::all_of(x.items.begin(), x.items.end(), [&](const Element& i) { return safe(i); });
                } else if constexpr (std::is_same_v<T, Alternation>) {
                    return std::any_of(x.branches.begin(), x.branches.end(), [&](const Element& b) { return safe(b); });
                } else if constexpr (std::is_same_v<T, Repetition>) {
                    return x.min == 0 || safe(*x.inner);
                } else {
                    return safe(*x.inner);
                }
            },
            e.node);
        safe_[&e] = ok;
        return ok;
    }

    void derive(const Element& e) {
        if (auto* lit = e.as<LiteralCI>()) {
            terminal(Node::Term::CaseInsensitive, lit->text, lit->text);
        } else if (auto* codes = e.as<CharCodes>()) {
            terminal(Node::Term::Exact, escape(codes->bytes), codes->bytes);
        } else if (auto* range = e.as<CharRange>()) {
            std::vector<unsigned char> pool;
            for (unsigned b = range->lo; b <= range->hi; ++b)
                if (!is_crlf_byte(static_cast<unsigned char>(b))) pool.push_back(static_cast<unsigned char>(b));
            char c = static_cast<char>(pool[rng_.below(pool.size())]);
            terminal(Node::Term::Range, escape(std::string(1, c)), std::string_view(&c, 1), range->lo, range->hi);
        } else if (auto* ref = e.as<RuleRef>()) {
            const Rule* r = resolve_rule(base_, ref->name);
            if (!r) throw BudgetExhausted("undefined rule '" + ref->name + "'");
            Node n;
            n.kind = Node::Kind::Rule;
            n.label = r->name;
            open(n);
            derive(r->body);
            close();
        } else if (auto* seq = e.as<Sequence>()) {
            for (const auto& item : seq->items) derive(item);
        } else if (auto* alt = e.as<Alternation>()) {
            std::vector<std::size_t> ok;
            for (std::size_t i = 0; i < alt->branches.size(); ++i)
                if (safe(alt->branches[i])) ok.push_back(i);
            std::size_t b = ok[rng_.below(ok.size())];
            Node n;
            n.kind = Node::Kind::Alternation;
            n.branch = static_cast<int>(b);
            open(n);
            derive(alt->branches[b]);
            close();
        } else if (auto* rep = e.as<Repetition>()) {
            std::uint32_t count = rep->min;
            if (safe(*rep->inner)) {
                if (rep->max != kUnbounded && rep->max - rep->min <= 8)
                    count = rep->min + static_cast<std::uint32_t>(rng_.below(rep->max - rep->min + 1));
                else {
                    std::size_t cap = rep->max == kUnbounded ? budget_ : std::min<std::size_t>(budget_, rep->max - rep->min);
                    count = rep->min + static_cast<std::uint32_t>(rng_.geometric(cap));
                }
            }
            Node n;
            n.kind = Node::Kind::Repetition;
            n.min = rep->min;
            n.max = rep->max;
            n.count = static_cast<int>(count);
            open(n);
            for (std::uint32_t i = 0; i < count; ++i) {
                Node it;
                it.kind = Node::Kind::Iteration;
                open(it);
                derive(*rep->inner);
                close();
            }
            close();
        } else if (auto* named = e.as<Named>()) {
            derive_named(e, *named);
        }
    }

    void derive_named(const Element& e, const Named& named) {
        Shape shape = Shape::RawSlice;
        if (named.shape) shape = *named.shape;
        else if (auto* ref = named.inner->as<RuleRef>())
            if (const Rule* r = resolve_rule(base_, ref->name); r && r->shape) shape = *r->shape;
        path_.push_back(named.name);
        std::string key = entry_ + "." + join(path_);
        Node n;
        n.kind = Node::Kind::Named;
        n.label = named.name;
        n.key = key;
        n.element = &e;
        n.shape = shape;
        int self = open(n);

        bool done = false;
        if (auto p = partners_.find(key); p != partners_.end())
            if (auto src = fields_.find(p->second); src != fields_.end()) done = copy_field(src->second, *named.inner);
        if (!done) {
            if (is_numeric(shape)) numeric(*named.inner, shape, key);
            else derive(*named.inner);
        }
        fields_.emplace(key, self);
        path_.pop_back();
        close();
    }

    bool copy_field(int src, const Element& inner) {
        const Node s = nodes_[src];
        std::string text = out_.substr(s.begin, s.end - s.begin);
        if (!reference_match(inner, base_, text)) return false;
        const int self = stack_.back();
        const std::size_t begin = out_.size();
        for (int i = src + 1; i < s.last; ++i) {
            Node c = nodes_[i];
            c.begin = c.begin - s.begin + begin;
            c.end = c.end - s.begin + begin;
            c.parent = c.parent - src + self;
            c.last = c.last - src + self;
            nodes_.push_back(std::move(c));
        }
        out_ += text;
        return true;
    }

    std::uint64_t pick_value(std::uint64_t lo, std::uint64_t hi) {
        switch (rng_.below(8)) {
            case 0: return lo;
            case 1: return hi;
            default: break;
        }
        std::size_t dlo = digits_of(lo), dhi = digits_of(hi);
        std::size_t d = dlo + rng_.below(dhi - dlo + 1);
        std::uint64_t a = std::max(lo, d == 1 ? 0 : pow10(d - 1));
        std::uint64_t b = std::min(hi, pow10(d) - 1);
        return a + rng_.below(static_cast<std::size_t>(b - a + 1));
    }

    void numeric(const Element& inner, Shape shape, const std::string& key) {
        std::uint64_t lo = 0, hi = shape_max(shape);
        if (auto r = a_.rangeConstraints.find(key); r != a_.rangeConstraints.end()) {
            lo = std::max(lo, r->second.lo);
            if (r->second.hiStrict && r->second.hi == 0) throw BudgetExhausted("empty range for " + key);
            hi = std::min(hi, r->second.hiStrict ? r->second.hi - 1 : r->second.hi);
        }
        if (lo > hi) throw BudgetExhausted("empty range for " + key);
        const std::size_t width = min_length(inner, base_);
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::string text = std::to_string(pick_value(lo, hi));
            if (text.size() < width) text.insert(0, width - text.size(), '0');
            if (reference_match(inner, base_, text)) {
                emit_digits(inner, text);
                return;
            }
        }
        throw BudgetExhausted("no value of " + key + " inside its range matches the grammar");
    }

    // Digits of a numeric field, with the rule and repetition structure of the common
    // `n*mDIGIT` shapes kept so repetition mutants can target them.
    void emit_digits(const Element& inner, const std::string& text) {
        const Element* e = &inner;
        int opened = 0;
        while (auto* ref = e->as<RuleRef>()) {
            const Rule* r = resolve_rule(base_, ref->name);
            if (iequals(r->name, "DIGIT")) break;
            Node n;
            n.kind = Node::Kind::Rule;
            n.label = r->name;
            open(n);
            ++opened;
            e = &r->body;
        }
        auto digit = [&](char c) { terminal(Node::Term::Range, "DIGIT", std::string_view(&c, 1), '0', '9'); };
        if (auto* rep = e->as<Repetition>(); rep && text.size() >= rep->min && text.size() <= rep->max) {
            Node n;
            n.kind = Node::Kind::Repetition;
            n.min = rep->min;
            n.max = rep->max;
            n.count = static_cast<int>(text.size());
            open(n);
            for (char c : text) {
                Node it;
                it.kind = Node::Kind::Iteration;
                open(it);
                digit(c);
                close();
            }
            close();
        } else {
            for (char c : text) digit(c);
        }
        while (opened--) close();
    }

    const AnnotatedGrammar& a_;
    const Grammar& base_;
    Rng& rng_;
    std::size_t budget_;
    std::string out_;
    std::vector<Node> nodes_;
    std::vector<int> stack_;
    std::string entry_;
    std::vector<std::string> path_;
    std::map<std::string, std::string> partners_;
    std::map<std::string, int> fields_;
    std::map<const Element*, bool> safe_;
};

// ---------------------------------------------------------------------------

bool confirmed(const CompiledGrammar& g, const std::string& bytes, bool wantValid) {
    try {
        return reference_validate(g, bytes).valid == wantValid;
    } catch (const RecursionBudgetExceeded&) {
        return false;
    }
}

std::string splice(const std::string& s, std::size_t pos, std::size_t del, std::string_view ins) {
    return s.substr(0, pos) + std::string(ins) + s.substr(pos + del);
}

std::string context_of(const DerivationTree& t, int i) {
    std::string where;
    for (int p = t.nodes[i].parent; p >= 0; p = t.nodes[p].parent) {
        const Node& n = t.nodes[p];
        if (where.empty() && (n.kind == Node::Kind::Rule || n.kind == Node::Kind::Named)) where = n.label;
        if (n.kind == Node::Kind::Line) return n.label + (where.empty() ? "" : "/" + where);
    }
    return where;
}

std::vector<int> children(const DerivationTree& t, int i) {
    std::vector<int> out;
    for (int c = i + 1; c < t.nodes[i].last; c = t.nodes[c].last) out.push_back(c);
    return out;
}

Mutant make(MutationRule rule, GroundTruth truth, std::string bytes, int node, std::string description,
            std::uint64_t seed, std::string coverage) {
    Mutant m;
    m.bytes = std::move(bytes);
    m.rule = rule;
    m.groundTruth = truth;
    m.sourceNode = node;
    m.description = std::move(description);
    m.seed = seed;
    m.coverage = std::move(coverage);
    return m;
}

std::string numeric_text(std::uint64_t v, std::size_t width) {
    std::string s = std::to_string(v);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

// Start of the value area of a header line: after key, ':' and the SP that follows it.
std::size_t value_begin(const DerivationTree& t, int line) {
    auto kids = children(t, line);
    return kids.size() >= 3 ? t.nodes[kids[2]].end : t.nodes[line].begin;
}

bool is_header_line(const Node& n) { return n.kind == Node::Kind::Line && n.entry >= 0; }

struct Edit {
    std::size_t pos = 0;
    std::size_t del = 0;
    std::string ins;
    std::string what;
};

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(MutationRule r) {
    switch (r) {
        case MutationRule::Charset: return "CHARSET";
        case MutationRule::Repetition: return "REPETITION";
        case MutationRule::Constraint: return "CONSTRAINT";
        case MutationRule::Torture: return "TORTURE";
    }
    return "?";
}

std::string_view to_string(GroundTruth t) { return t == GroundTruth::Valid ? "VALID" : "INVALID"; }

std::string_view to_string(Position p) {
    switch (p) {
        case Position::First: return "FIRST";
        case Position::Middle: return "MIDDLE";
        case Position::Last: return "LAST";
    }
    return "?";
}

DerivationTree derive_valid(const CompiledGrammar& g, std::uint64_t seed, std::size_t sizeBudget) {
    const AnnotatedGrammar& a = annotated(g);
    Rng rng(seed);
    std::string last = "no entry point";
    for (int attempt = 0; attempt < 64; ++attempt) {
        MessageKind kind = !a.statusLine ? MessageKind::Request
                           : !a.requestLine ? MessageKind::Response
                           : rng.coin() ? MessageKind::Request : MessageKind::Response;
        if ((kind == MessageKind::Request && !a.requestLine) || (kind == MessageKind::Response && !a.statusLine))
            break;
        try {
            Deriver d(g, rng, sizeBudget);
            DerivationTree t = d.run(kind);
            auto v = reference_validate(g, t.message);
            if (v.valid) return t;
            last = v.reason;
        } catch (const BudgetExhausted& e) {
            last = e.what();
        } catch (const RecursionBudgetExceeded& e) {
            last = e.what();
        }
    }
    throw BudgetExhausted("could not derive a valid message: " + last);
}

ReferenceVerdict reference_validate(const CompiledGrammar& g, std::string_view raw) {
    const AnnotatedGrammar& a = annotated(g);
    auto reject = [](std::string why) { return ReferenceVerdict{false, std::move(why)}; };

    std::vector<std::string_view> lines;
    for (std::size_t pos = 0;;) {
        std::size_t eol = raw.find("\r\n", pos);
        if (eol == std::string_view::npos) return reject("header section not closed by an empty line");
        std::string_view line = raw.substr(pos, eol - pos);
        if (line.find_first_of("\r\n") != std::string_view::npos) return reject("stray CR or LF");
        pos = eol + 2;
        if (line.empty()) {
            if (lines.empty()) return reject("empty command line");
            break;
        }
        lines.push_back(line);
    }

    MessageKind kind;
    if (a.requestLine && reference_match(a.requestLine->body, a.baseGrammar, lines[0])) kind = MessageKind::Request;
    else if (a.statusLine && reference_match(a.statusLine->body, a.baseGrammar, lines[0])) kind = MessageKind::Response;
    else return reject("command line not derivable");

    struct Logical {
        std::string key;
        std::vector<std::string_view> parts;
    };
    std::vector<Logical> headers;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (is_ws(line[0])) {
            if (headers.empty()) return reject("continuation before the first header");
            if (std::all_of(line.begin(), line.end(), is_ws)) return reject("blank continuation line");
            headers.back().parts.push_back(line);
            continue;
        }
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) return reject("header line without colon");
        std::string_view key = line.substr(0, colon);
        while (!key.empty() && is_ws(key.back())) key.remove_suffix(1);
        if (key.empty()) return reject("empty header name");
        for (unsigned char c : key)
            if (c <= 0x20 || c >= 0x7F || std::string_view("()<>@,;:\\\"/[]?={}").find(static_cast<char>(c)) !=
                                              std::string_view::npos)
                return reject("bad header name");
        headers.push_back(Logical{std::string(key), {line.substr(colon + 1)}});
    }

    std::vector<std::size_t> count(a.headers.size(), 0);
    for (const auto& h : headers) {
        std::string value(h.parts[0]);
        for (std::size_t i = 1; i < h.parts.size(); ++i) {
            std::string_view p = h.parts[i];
            while (!p.empty() && is_ws(p.front())) p.remove_prefix(1);
            value += ' ';
            value += p;
        }
        value.erase(0, value.find_first_not_of(" \t") == std::string::npos ? value.size()
                                                                             : value.find_first_not_of(" \t"));
        int decl = -1;
        for (std::size_t d = 0; d < a.headers.size() && decl < 0; ++d)
            for (const auto& k : header_keys(a.headers[d]))
                if (iequals(k, h.key)) decl = static_cast<int>(d);
        if (decl < 0) {
            for (unsigned char c : value)
                if ((c < 0x20 && c != '\t') || c == 0x7F) return reject("control byte in undeclared header " + h.key);
            continue;
        }
        ++count[decl];
        if (!reference_match(a.headers[decl].body, a.baseGrammar, value))
            return reject("value of " + a.headers[decl].name + " not derivable");
    }
    for (std::size_t d = 0; d < a.headers.size(); ++d) {
        if (count[d] == 0 && mandatory_in(a.headers[d].mandatoryIn, kind))
            return reject("missing mandatory " + a.headers[d].name);
        if (count[d] > 1 && !a.headers[d].multiple) return reject("repeated " + a.headers[d].name);
    }

    Verdict v = validate(g, raw);
    for (const auto& r : v.reasons)
        if (r.code == ReasonCode::Range || r.code == ReasonCode::Constraint) return reject(r.message);
    return ReferenceVerdict{};
}

// ---------------------------------------------------------------------------

Mutant mutate_charset(const CompiledGrammar& g, const DerivationTree& t, Position position, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> cands;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& n = t.nodes[i];
        if (n.kind == Node::Kind::Terminal && n.term != Node::Term::Structural && n.end > n.begin)
            cands.push_back(static_cast<int>(i));
    }
    rng.shuffle(cands);
    int tries = 0;
    for (int i : cands) {
        if (++tries > 64) break;
        const Node& n = t.nodes[i];
        std::size_t len = n.end - n.begin;
        std::size_t off = position == Position::First ? 0 : position == Position::Middle ? len / 2 : len - 1;
        std::size_t at = n.begin + off;
        unsigned char old = static_cast<unsigned char>(t.message[at]);
        if (is_crlf_byte(old)) continue;
        ByteSet valid;
        switch (n.term) {
            case Node::Term::CaseInsensitive:
                valid.set(static_cast<unsigned char>(std::tolower(old)));
                valid.set(static_cast<unsigned char>(std::toupper(old)));
                break;
            case Node::Term::Range:
                for (unsigned b = n.lo; b <= n.hi; ++b) valid.set(b);
                break;
            default: valid.set(old);
        }
        std::vector<unsigned char> outside;
        for (unsigned b = 0; b < 256; ++b)
            if (!valid.test(b) && !is_crlf_byte(static_cast<unsigned char>(b))) outside.push_back(static_cast<unsigned char>(b));
        for (int k = 0; k < 4 && !outside.empty(); ++k) {
            unsigned char b = outside[rng.below(outside.size())];
            std::string bytes = t.message;
            bytes[at] = static_cast<char>(b);
            if (!confirmed(g, bytes, false)) continue;
            std::string desc = "charset " + std::string(to_string(position)) + " of " + n.label + " in " +
                               context_of(t, i) + " at byte " + std::to_string(at) + ": " +
                               escape(std::string(1, static_cast<char>(old))) + " -> " +
                               escape(std::string(1, static_cast<char>(b)));
            return make(MutationRule::Charset, GroundTruth::Invalid, std::move(bytes), i, std::move(desc), seed,
                        std::string(to_string(position)));
        }
    }
    throw Exhausted("no invalidating character replacement found");
}

Mutant mutate_repetition(const CompiledGrammar& g, const DerivationTree& t, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> cands;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& n = t.nodes[i];
        if (n.kind == Node::Kind::Repetition && (n.min > 0 || (n.max != kUnbounded && n.count > 0)))
            cands.push_back(static_cast<int>(i));
    }
    rng.shuffle(cands);
    int tries = 0;
    for (int i : cands) {
        if (++tries > 48) break;
        const Node& n = t.nodes[i];
        auto iters = children(t, i);
        bool canBelow = n.min > 0;
        bool canAbove = n.max != kUnbounded && !iters.empty();
        if (!canBelow && !canAbove) continue;
        bool below = canBelow && (!canAbove || rng.coin());
        std::size_t target;
        std::string bytes;
        if (below) {
            target = rng.below(n.min);
            std::size_t keepEnd = target == 0 ? n.begin : t.nodes[iters[target - 1]].end;
            bytes = splice(t.message, keepEnd, n.end - keepEnd, "");
        } else {
            target = static_cast<std::size_t>(n.max) + 1 + rng.below(3);
            std::string extra;
            for (std::size_t k = iters.size(); k < target; ++k) {
                const Node& it = t.nodes[iters[rng.below(iters.size())]];
                extra += t.message.substr(it.begin, it.end - it.begin);
            }
            bytes = splice(t.message, n.end, 0, extra);
        }
        if (!confirmed(g, bytes, false)) continue;
        std::string bound = n.max == kUnbounded ? std::to_string(n.min) + "*" : std::to_string(n.min) + "*" + std::to_string(n.max);
        std::string desc = "repetition " + bound + " in " + context_of(t, i) + " count " + std::to_string(n.count) +
                           " -> " + std::to_string(target);
        return make(MutationRule::Repetition, GroundTruth::Invalid, std::move(bytes), i, std::move(desc), seed,
                    below ? "below-min" : "above-max");
    }
    throw Exhausted("no bounded repetition to push out of range");
}

Mutant mutate_constraint(const CompiledGrammar& g, const DerivationTree& t, std::uint64_t seed) {
    const AnnotatedGrammar& a = annotated(g);
    Rng rng(seed);
    enum class Kind { Range, Mandatory, Duplicate, Equality };
    struct Option {
        Kind kind;
        int node = -1;
        std::size_t index = 0;
    };
    std::vector<Option> options;
    std::map<std::string, int> fields;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& n = t.nodes[i];
        if (n.kind == Node::Kind::Named) {
            fields.emplace(n.key, static_cast<int>(i));
            if (is_numeric(n.shape) && a.rangeConstraints.count(n.key)) options.push_back({Kind::Range, static_cast<int>(i), 0});
        }
        if (is_header_line(n) && !a.headers[n.entry].multiple) options.push_back({Kind::Duplicate, static_cast<int>(i), 0});
    }
    for (std::size_t d = 0; d < a.headers.size(); ++d)
        if (mandatory_in(a.headers[d].mandatoryIn, t.kind)) options.push_back({Kind::Mandatory, -1, d});
    auto eqs = equalities(a, t.kind);
    for (std::size_t e = 0; e < eqs.size(); ++e)
        if (fields.count(eqs[e].lhs) && fields.count(eqs[e].rhs)) options.push_back({Kind::Equality, -1, e});
    // strategies first, then targets, so rare strategies are not drowned by header counts
    rng.shuffle(options);
    std::vector<int> rank{0, 1, 2, 3};
    rng.shuffle(rank);
    std::stable_sort(options.begin(), options.end(),
                     [&](const Option& x, const Option& y) { return rank[int(x.kind)] < rank[int(y.kind)]; });

    for (const auto& opt : options) {
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::string bytes, desc, cover;
            int node = opt.node;
            if (opt.kind == Kind::Range) {
                const Node& n = t.nodes[opt.node];
                const RangeConstraint& r = a.rangeConstraints.at(n.key);
                const Element& inner = *n.element->as<Named>()->inner;
                std::vector<std::uint64_t> values;
                std::uint64_t above = r.hiStrict ? r.hi : r.hi + 1;
                std::uint64_t top = std::max(above, std::min<std::uint64_t>(above * 2, 99'999'999'999ull));
                values.push_back(above);
                values.push_back(above + rng.below(static_cast<std::size_t>(top - above + 1)));
                if (r.lo > 0) {
                    values.push_back(r.lo - 1);
                    values.push_back(rng.below(static_cast<std::size_t>(r.lo)));
                }
                std::uint64_t v = values[rng.below(values.size())];
                std::string text = numeric_text(v, min_length(inner, a.baseGrammar));
                if (!reference_match(inner, a.baseGrammar, text)) continue;
                bytes = splice(t.message, n.begin, n.end - n.begin, text);
                desc = "range " + n.key + " " + t.message.substr(n.begin, n.end - n.begin) + " -> " + text;
                cover = "range " + n.key;
            } else if (opt.kind == Kind::Mandatory) {
                const std::string& name = a.headers[opt.index].name;
                bytes = t.message;
                for (std::size_t i = t.nodes.size(); i-- > 0;) {
                    const Node& n = t.nodes[i];
                    if (is_header_line(n) && static_cast<std::size_t>(n.entry) == opt.index) {
                        bytes = splice(bytes, n.begin, n.end - n.begin, "");
                        node = static_cast<int>(i);
                    }
                }
                desc = "mandatory " + name + " removed";
                cover = "mandatory " + name;
            } else if (opt.kind == Kind::Duplicate) {
                const Node& n = t.nodes[opt.node];
                std::vector<std::size_t> starts;
                for (const auto& m : t.nodes)
                    if (m.kind == Node::Kind::Line && m.entry != kRequestLineEntry && m.entry != kStatusLineEntry) starts.push_back(m.begin);
                starts.push_back(t.message.size() - 2);
                std::size_t at = starts[rng.below(starts.size())];
                if (at < t.nodes[1].end) at = t.nodes[1].end;
                bytes = splice(t.message, at, 0, t.message.substr(n.begin, n.end - n.begin));
                desc = "duplicate " + a.headers[n.entry].name + " inserted at byte " + std::to_string(at);
                cover = "duplicate " + a.headers[n.entry].name;
            } else {
                const Equality& eq = eqs[opt.index];
                bool left = rng.coin();
                const Node& n = t.nodes[fields.at(left ? eq.lhs : eq.rhs)];
                const Node& other = t.nodes[fields.at(left ? eq.rhs : eq.lhs)];
                std::string otherText = t.message.substr(other.begin, other.end - other.begin);
                Rng sub(rng.next());
                std::string text;
                try {
                    text = Deriver(g, sub, 4).sample(n);
                } catch (const BudgetExhausted&) {
                    continue;
                }
                if (eq.ci ? iequals(text, otherText) : text == otherText) continue;
                node = fields.at(left ? eq.lhs : eq.rhs);
                bytes = splice(t.message, n.begin, n.end - n.begin, text);
                desc = "equality '" + eq.text + "' " + n.key + " " + escape(t.message.substr(n.begin, n.end - n.begin)) +
                       " -> " + escape(text);
                cover = "equality " + eq.text;
            }
            if (!confirmed(g, bytes, false)) continue;
            return make(MutationRule::Constraint, GroundTruth::Invalid, std::move(bytes), node, std::move(desc), seed,
                        std::move(cover));
        }
    }
    throw Exhausted("no constraint to violate");
}

std::string fold_at_whitespace(const DerivationTree& t, std::size_t lineNode, std::uint64_t seed) {
    Rng rng(seed);
    const Node& line = t.nodes[lineNode];
    std::size_t vb = value_begin(t, static_cast<int>(lineNode));
    std::size_t ve = line.end - 2;
    std::vector<std::size_t> points;  // index of the SP that becomes the fold
    for (std::size_t i = vb; i < ve; ++i)
        if (t.message[i] == ' ' && i + 1 < ve && !is_ws(t.message[i + 1])) points.push_back(i);
    if (points.empty()) return t.message;
    std::size_t at = points[rng.below(points.size())];
    static const char* const folds[] = {"\r\n ", "\r\n\t", "\r\n  "};
    return splice(t.message, at, 1, folds[rng.below(3)]);
}

Mutant mutate_torture(const CompiledGrammar& g, const DerivationTree& t, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> ci, headerLines, reps;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& n = t.nodes[i];
        if (n.kind == Node::Kind::Terminal && n.term == Node::Term::CaseInsensitive &&
            std::any_of(t.message.begin() + n.begin, t.message.begin() + n.end, [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
            ci.push_back(static_cast<int>(i));
        if (is_header_line(n)) headerLines.push_back(static_cast<int>(i));
        if (n.kind == Node::Kind::Repetition &&
            (static_cast<std::uint32_t>(n.count) > n.min ||
             (n.max != kUnbounded && static_cast<std::uint32_t>(n.count) < n.max && n.count > 0 && n.max - n.count <= 16)))
            reps.push_back(static_cast<int>(i));
    }
    auto ws = [&](std::size_t k) {
        std::string s;
        for (std::size_t i = 0; i < k; ++i) s += rng.coin() ? ' ' : '\t';
        return s;
    };

    for (int attempt = 0; attempt < 16; ++attempt) {
        std::vector<Edit> edits;
        std::size_t transforms = 1 + rng.below(3);
        for (std::size_t k = 0; k < transforms; ++k) {
            switch (rng.below(5)) {
                case 0: {
                    if (ci.empty()) break;
                    const Node& n = t.nodes[ci[rng.below(ci.size())]];
                    std::string text = t.message.substr(n.begin, n.end - n.begin), flipped = text;
                    for (char& c : flipped)
                        if (std::isalpha(static_cast<unsigned char>(c)) && rng.coin())
                            c = std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                                                           : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                    if (flipped == text) {
                        auto p = std::find_if(flipped.begin(), flipped.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
                        *p = std::islower(static_cast<unsigned char>(*p)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(*p)))
                                                                          : static_cast<char>(std::tolower(static_cast<unsigned char>(*p)));
                    }
                    edits.push_back({n.begin, text.size(), flipped, "case " + escape(text) + "->" + escape(flipped)});
                    break;
                }
                case 1: {
                    if (headerLines.empty()) break;
                    int l = headerLines[rng.below(headerLines.size())];
                    auto kids = children(t, l);
                    std::string s = ws(1 + rng.below(3));
                    edits.push_back({t.nodes[kids[0]].end, 0, s, "ws-before-colon " + t.nodes[l].label + " +" + std::to_string(s.size())});
                    break;
                }
                case 2: {
                    if (headerLines.empty()) break;
                    int l = headerLines[rng.below(headerLines.size())];
                    auto kids = children(t, l);
                    std::string s = ws(1 + rng.below(3));
                    edits.push_back({t.nodes[kids[1]].end, 0, s, "ws-after-colon " + t.nodes[l].label + " +" + std::to_string(s.size())});
                    break;
                }
                case 3: {
                    if (headerLines.empty()) break;
                    int l = headerLines[rng.below(headerLines.size())];
                    std::size_t vb = value_begin(t, l), ve = t.nodes[l].end - 2;
                    std::vector<std::size_t> points;
                    for (std::size_t i = vb - 1; i < ve; ++i)
                        if (t.message[i] == ' ' && i + 1 < ve && !is_ws(t.message[i + 1])) points.push_back(i);
                    if (points.empty()) break;
                    std::size_t at = points[rng.below(points.size())];
                    edits.push_back({at, 1, rng.coin() ? "\r\n " : "\r\n\t", "fold " + t.nodes[l].label + " at byte " + std::to_string(at)});
                    break;
                }
                default: {
                    if (reps.empty()) break;
                    int r = reps[rng.below(reps.size())];
                    const Node& n = t.nodes[r];
                    auto iters = children(t, r);
                    bool toMin = static_cast<std::uint32_t>(n.count) > n.min &&
                                 (n.max == kUnbounded || n.count == 0 || n.max - n.count > 16 || rng.coin());
                    if (toMin) {
                        std::size_t keepEnd = n.min == 0 ? n.begin : t.nodes[iters[n.min - 1]].end;
                        edits.push_back({keepEnd, n.end - keepEnd, "", "boundary " + context_of(t, r) + " count " +
                                                                           std::to_string(n.count) + "->" + std::to_string(n.min)});
                    } else {
                        std::string extra;
                        for (std::uint32_t c = static_cast<std::uint32_t>(n.count); c < n.max; ++c) {
                            const Node& it = t.nodes[iters[rng.below(iters.size())]];
                            extra += t.message.substr(it.begin, it.end - it.begin);
                        }
                        edits.push_back({n.end, 0, extra, "boundary " + context_of(t, r) + " count " +
                                                              std::to_string(n.count) + "->" + std::to_string(n.max)});
                    }
                }
            }
        }
        if (edits.empty()) continue;
        std::stable_sort(edits.begin(), edits.end(), [](const Edit& x, const Edit& y) { return x.pos < y.pos; });
        std::vector<Edit> kept;
        for (auto& e : edits) {
            if (!kept.empty() && (e.pos < kept.back().pos + kept.back().del || e.pos == kept.back().pos)) continue;
            kept.push_back(std::move(e));
        }
        std::string bytes = t.message;
        for (auto it = kept.rbegin(); it != kept.rend(); ++it) bytes = splice(bytes, it->pos, it->del, it->ins);
        if (!confirmed(g, bytes, true)) continue;
        std::string desc = "torture-style";
        for (const auto& e : kept) desc += " " + e.what + ";";
        desc.pop_back();
        return make(MutationRule::Torture, GroundTruth::Valid, std::move(bytes), -1, std::move(desc), seed, "torture");
    }
    return make(MutationRule::Torture, GroundTruth::Valid, t.message, 0, "torture-style identity", seed, "identity");
}

// ---------------------------------------------------------------------------

Mix Mix::parse(std::string_view text) {
    Mix m;
    m.weights = {0, 0, 0, 0};
    static const char* const names[] = {"charset", "repetition", "constraint", "torture"};
    std::string s(text);
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        std::string name = fold_case(item.substr(0, eq));
        double w = 1;
        if (eq != std::string::npos) {
            try {
                std::size_t used = 0;
                w = std::stod(item.substr(eq + 1), &used);
                if (used != item.size() - eq - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::invalid_argument("bad weight in mix item '" + item + "'");
            }
        }
        if (w < 0) throw std::invalid_argument("negative weight in mix item '" + item + "'");
        auto it = std::find(std::begin(names), std::end(names), name);
        if (it == std::end(names)) throw std::invalid_argument("unknown mutation rule '" + name + "'");
        m.weights[it - std::begin(names)] = w;
    }
    double total = m.weights[0] + m.weights[1] + m.weights[2] + m.weights[3];
    if (total <= 0) throw std::invalid_argument("mix has no positive weight");
    return m;
}

Mix Mix::only(MutationRule r) {
    Mix m;
    m.weights = {0, 0, 0, 0};
    m.weights[static_cast<int>(r)] = 1;
    return m;
}

std::string Mix::render() const {
    static const char* const names[] = {"charset", "repetition", "constraint", "torture"};
    std::string out;
    for (int i = 0; i < 4; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%s=%g", i ? "," : "", names[i], weights[i]);
        out += buf;
    }
    return out;
}

std::size_t MutationReport::missed() const {
    std::size_t m = 0;
    for (const auto& r : perRule) m += r.missed;
    return m;
}

std::size_t MutationReport::false_rejects() const {
    std::size_t m = 0;
    for (const auto& r : perRule) m += r.falseRejects;
    return m;
}

void MutationReport::merge(const MutationReport& o) {
    n += o.n;
    for (int i = 0; i < 4; ++i) {
        perRule[i].emitted += o.perRule[i].emitted;
        perRule[i].detected += o.perRule[i].detected;
        perRule[i].missed += o.perRule[i].missed;
        perRule[i].accepted += o.perRule[i].accepted;
        perRule[i].falseRejects += o.perRule[i].falseRejects;
    }
    exhausted += o.exhausted;
    for (int i = 0; i < 3; ++i) positions[i] += o.positions[i];
    for (const auto& [k, v] : o.constraintsHit) constraintsHit[k] += v;
}

std::string MutationReport::render() const {
    std::string out;
    char buf[256];
    auto pct = [](std::size_t a, std::size_t b) {
        char p[16];
        if (b == 0) return std::string("-");
        std::snprintf(p, sizeof p, "%.2f%%", 100.0 * static_cast<double>(a) / static_cast<double>(b));
        return std::string(p);
    };
    std::snprintf(buf, sizeof buf, "seed %llu  n %zu  mix %s\n", static_cast<unsigned long long>(seed), n, mix.render().c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %10s\n", "rule", "emitted", "detected", "missed", "detection");
    out += buf;
    for (int i = 0; i < 3; ++i) {
        if (mix.weights[i] <= 0) continue;
        const auto& r = perRule[i];
        std::snprintf(buf, sizeof buf, "%-12s %9zu %9zu %9zu %10s\n", std::string(to_string(static_cast<MutationRule>(i))).c_str(),
                      r.emitted, r.detected, r.missed, pct(r.detected, r.emitted).c_str());
        out += buf;
    }
    if (mix.weights[3] > 0) {
        const auto& r = perRule[3];
        std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %10s\n", "torture", "emitted", "accepted", "falseRej", "acceptance");
        out += buf;
        std::snprintf(buf, sizeof buf, "%-12s %9zu %9zu %9zu %10s\n", "TORTURE", r.emitted, r.accepted, r.falseRejects,
                      pct(r.accepted, r.emitted).c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "total missed %zu  falseRejects %zu  exhausted %zu\n", missed(), false_rejects(), exhausted);
    out += buf;
    if (mix.weights[0] > 0) {
        std::snprintf(buf, sizeof buf, "coverage charset  FIRST %zu  MIDDLE %zu  LAST %zu\n", positions[0], positions[1], positions[2]);
        out += buf;
    }
    for (const auto& [k, v] : constraintsHit) {
        std::snprintf(buf, sizeof buf, "coverage constraint  %-40s %6zu\n", k.c_str(), v);
        out += buf;
    }
    return out;
}

std::uint64_t mutant_seed(std::uint64_t campaignSeed, std::size_t index) {
    return splitmix(campaignSeed * 0xD1B54A32D192ED03ull + splitmix(index));
}

Mutant generate_mutant(const CompiledGrammar& g, MutationRule rule, std::uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::uint64_t baseSeed = rng.next(), mseed = rng.next();
        Position pos = static_cast<Position>(rng.below(3));
        DerivationTree t = derive_valid(g, baseSeed);
        try {
            Mutant m;
            switch (rule) {
                case MutationRule::Charset: m = mutate_charset(g, t, pos, mseed); break;
                case MutationRule::Repetition: m = mutate_repetition(g, t, mseed); break;
                case MutationRule::Constraint: m = mutate_constraint(g, t, mseed); break;
                case MutationRule::Torture: m = mutate_torture(g, t, mseed); break;
            }
            m.seed = seed;
            return m;
        } catch (const Exhausted&) {
        }
    }
    throw Exhausted(std::string("no ") + std::string(to_string(rule)) + " mutant found");
}

MutationReport run_campaign(const CompiledGrammar& g, const Target& target, std::size_t n, std::uint64_t seed,
                            const Mix& mix, unsigned jobs, const std::function<void(const CampaignItem&)>& sink) {
    if (n == 0) throw std::invalid_argument("campaign size must be positive");
    double total = mix.weights[0] + mix.weights[1] + mix.weights[2] + mix.weights[3];
    if (total <= 0) throw std::invalid_argument("mix has no positive weight");

    std::vector<std::optional<CampaignItem>> items(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureLock;
    auto work = [&]() {
        for (std::size_t i; (i = next++) < n;) {
            try {
                Rng r(mutant_seed(seed, i));
                double u = r.unit() * total;
                int rule = -1;
                for (int k = 0; k < 4; ++k) {
                    if (mix.weights[k] <= 0) continue;
                    rule = k;
                    if (u < mix.weights[k]) break;
                    u -= mix.weights[k];
                }
                std::uint64_t ms = r.next();
                try {
                    Mutant m = generate_mutant(g, static_cast<MutationRule>(rule), ms);
                    bool accepted = target(m.bytes);
                    items[i] = CampaignItem{i, std::move(m), accepted};
                } catch (const Exhausted&) {
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failureLock);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    jobs = std::max(1u, jobs);
    if (jobs == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    MutationReport rep;
    rep.seed = seed;
    rep.n = n;
    rep.mix = mix;
    for (const auto& item : items) {
        if (!item) {
            ++rep.exhausted;
            continue;
        }
        const Mutant& m = item->mutant;
        RuleTally& t = rep.perRule[static_cast<int>(m.rule)];
        ++t.emitted;
        if (m.groundTruth == GroundTruth::Invalid) (item->accepted ? t.missed : t.detected)++;
        else (item->accepted ? t.accepted : t.falseRejects)++;
        if (m.rule == MutationRule::Charset) {
            for (int p = 0; p < 3; ++p)
                if (m.coverage == to_string(static_cast<Position>(p))) ++rep.positions[p];
        } else if (m.rule == MutationRule::Constraint) {
            ++rep.constraintsHit[m.coverage];
        }
        if (sink) sink(*item);
    }
    return rep;
}

std::string manifest_line(const CampaignItem& item) {
    return std::to_string(item.index) + " " + std::string(to_string(item.mutant.rule)) + " " +
           std::string(to_string(item.mutant.groundTruth)) + " " + std::to_string(item.mutant.seed) + " " +
           item.mutant.description;
}

}  // namespace zebu
