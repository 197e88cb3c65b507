// SPDX-License-Identifier: Apache-2.0
#include "zebu/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "zebu/analysis.hpp"

namespace zebu {

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string_view to_string(DiagCode c) {
    switch (c) {
        case DiagCode::UndefinedRule: return "UNDEFINED_RULE";
        case DiagCode::DuplicateRule: return "DUPLICATE_RULE";
        case DiagCode::RuleCycle: return "RULE_CYCLE";
        case DiagCode::TypeMismatch: return "TYPE_MISMATCH";
        case DiagCode::UnresolvedRef: return "UNRESOLVED_REF";
        case DiagCode::UnreachableRule: return "UNREACHABLE_RULE";
        case DiagCode::DuplicateSubfield: return "DUPLICATE_SUBFIELD";
        case DiagCode::RepeatedCapture: return "REPEATED_CAPTURE";
    }
    return "UNKNOWN";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::string out(file);
    out += ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": ";
    out += to_string(d.severity);
    out += "[";
    out += to_string(d.code);
    out += "]: " + d.message;
    return out;
}

namespace {

struct Body {
    std::string owner;
    const Element* element;
};

std::vector<Body> entry_bodies(const AnnotatedGrammar& g) {
    std::vector<Body> out;
    if (g.requestLine) out.push_back({"requestLine", &g.requestLine->body});
    if (g.statusLine) out.push_back({"statusLine", &g.statusLine->body});
    for (const auto& h : g.headers) out.push_back({"header " + h.name, &h.body});
    return out;
}

std::vector<Body> all_bodies(const AnnotatedGrammar& g) {
    std::vector<Body> out;
    for (const auto& r : g.baseGrammar.rules()) out.push_back({r.name, &r.body});
    auto entries = entry_bodies(g);
    out.insert(out.end(), entries.begin(), entries.end());
    return out;
}

Diagnostic error(DiagCode code, std::string message, SourceSpan span) {
    return Diagnostic{Severity::Error, code, std::move(message), span, {}};
}

Diagnostic warning(DiagCode code, std::string message, SourceSpan span) {
    return Diagnostic{Severity::Warning, code, std::move(message), span, {}};
}

/// Reference graph over the user grammar (core rules are acyclic leaves and omitted).
struct RefGraph {
    std::vector<std::string> names;  // source-case names, by node id
    std::vector<std::vector<std::size_t>> edges;
    std::map<std::string, std::size_t> id;  // folded name -> node

    explicit RefGraph(const Grammar& g) {
        for (const auto& r : g.rules()) {
            auto key = fold_case(r.name);
            if (id.count(key)) continue;
            id[key] = names.size();
            names.push_back(r.name);
        }
        edges.resize(names.size());
        for (const auto& r : g.rules()) {
            std::size_t from = id[fold_case(r.name)];
            if (&r != g.find(r.name)) continue;  // later duplicates are not used
            for (const auto& [ref, span] : referenced_rules(r.body)) {
                auto it = id.find(fold_case(ref));
                if (it == id.end()) continue;
                auto& out = edges[from];
                if (std::find(out.begin(), out.end(), it->second) == out.end()) out.push_back(it->second);
            }
        }
    }
};

}  // namespace

std::vector<Diagnostic> check_no_omission(const AnnotatedGrammar& g) {
    std::vector<Diagnostic> out;
    std::set<std::string> reported;
    for (const auto& body : all_bodies(g)) {
        for (const auto& [name, span] : referenced_rules(*body.element)) {
            if (resolve_rule(g.baseGrammar, name)) continue;
            if (!reported.insert(fold_case(name)).second) continue;
            out.push_back(error(DiagCode::UndefinedRule,
                                "rule '" + name + "' is referenced in '" + body.owner + "' but never defined", span));
        }
    }
    if (!g.requestLine) out.push_back(error(DiagCode::UndefinedRule, "no requestLine entry point declared", {1, 1}));
    if (!g.statusLine) out.push_back(error(DiagCode::UndefinedRule, "no statusLine entry point declared", {1, 1}));
    return out;
}

std::vector<Diagnostic> check_no_duplicates(const AnnotatedGrammar& g) {
    std::vector<Diagnostic> out;
    std::map<std::string, SourceSpan> seen;
    for (const auto& r : g.baseGrammar.rules()) {
        auto [it, inserted] = seen.emplace(fold_case(r.name), r.span);
        if (!inserted)
            out.push_back(error(DiagCode::DuplicateRule,
                                "rule '" + r.name + "' is defined more than once (first at " + to_string(it->second) + ")",
                                r.span));
    }
    std::map<std::string, SourceSpan> headers;
    std::map<std::string, std::string> keys;
    for (const auto& h : g.headers) {
        auto [it, inserted] = headers.emplace(fold_case(h.name), h.span);
        if (!inserted) {
            out.push_back(error(DiagCode::DuplicateRule,
                                "header '" + h.name + "' is declared more than once (first at " + to_string(it->second) + ")",
                                h.span));
            continue;
        }
        for (const auto& key : header_keys(h)) {
            auto [kit, kinserted] = keys.emplace(fold_case(key), h.name);
            if (!kinserted && !iequals(kit->second, h.name))
                out.push_back(error(DiagCode::DuplicateRule,
                                    "header key '" + key + "' of '" + h.name + "' is already used by '" + kit->second + "'",
                                    h.span));
        }
    }
    return out;
}

std::vector<Diagnostic> check_no_cycles(const AnnotatedGrammar& g) {
    RefGraph graph(g.baseGrammar);
    const std::size_t n = graph.names.size();

    // Tarjan's strongly connected components, iterative to stay safe on deep grammars.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> onStack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    int counter = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
        while (!work.empty()) {
            auto& [v, edge] = work.back();
            if (edge == 0 && index[v] == -1) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                onStack[v] = true;
            }
            if (edge < graph.edges[v].size()) {
                std::size_t w = graph.edges[v][edge++];
                if (index[w] == -1) {
                    work.emplace_back(w, 0);
                } else if (onStack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    onStack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                components.push_back(std::move(comp));
            }
            std::size_t finished = v;
            work.pop_back();
            if (!work.empty()) {
                std::size_t parent = work.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }

    std::vector<Diagnostic> out;
    std::vector<std::vector<std::size_t>> cyclic;
    for (auto& comp : components) {
        std::sort(comp.begin(), comp.end());
        bool selfLoop = comp.size() == 1 && std::find(graph.edges[comp[0]].begin(), graph.edges[comp[0]].end(),
                                                      comp[0]) != graph.edges[comp[0]].end();
        if (comp.size() > 1 || selfLoop) cyclic.push_back(comp);
    }
    std::sort(cyclic.begin(), cyclic.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (const auto& comp : cyclic) {
        std::set<std::size_t> members(comp.begin(), comp.end());
        std::size_t start = comp.front();
        // Shortest path start -> ... -> start inside the component.
        std::map<std::size_t, std::size_t> parent;
        std::deque<std::size_t> queue;
        std::vector<std::size_t> path;
        for (std::size_t w : graph.edges[start]) {
            if (!members.count(w)) continue;
            if (w == start) {
                path = {start, start};
                break;
            }
            if (!parent.count(w)) {
                parent[w] = start;
                queue.push_back(w);
            }
        }
        while (path.empty() && !queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t w : graph.edges[v]) {
                if (!members.count(w)) continue;
                if (w == start) {
                    std::vector<std::size_t> rev{start, v};
                    for (std::size_t p = v; p != start; p = parent[p]) rev.push_back(parent[p]);
                    path.assign(rev.rbegin(), rev.rend());
                    break;
                }
                if (!parent.count(w)) {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        Diagnostic d = error(DiagCode::RuleCycle, "", g.baseGrammar.find(graph.names[start])->span);
        std::string text;
        for (std::size_t v : path) {
            d.cyclePath.push_back(graph.names[v]);
            if (!text.empty()) text += " -> ";
            text += graph.names[v];
        }
        d.message = "rule reference cycle: " + text;
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Empty string when `inner` fits `shape`, otherwise the reason it does not.
std::string shape_mismatch(const Element& inner, Shape shape, const Grammar& g) {
    switch (shape) {
        case Shape::RawSlice: return {};
        case Shape::Uint16:
        case Shape::Uint32: {
            const std::uint64_t max = shape == Shape::Uint16 ? 0xFFFFull : 0xFFFFFFFFull;
            if (auto lang = finite_language(inner, g, 1024)) {
                for (const auto& s : *lang) {
                    if (!all_digits(s)) return "'" + s + "' is not an unsigned decimal integer";
                    if (s.size() > 20 || std::stoull(s) > max)
                        return "'" + s + "' does not fit in " + std::string(to_string(shape));
                }
                return {};
            }
            ByteSet bytes = all_bytes(inner, g);
            for (unsigned b = 0; b < 256; ++b)
                if (bytes.test(b) && !(b >= '0' && b <= '9'))
                    return "derives non-digit characters and cannot be a " + std::string(to_string(shape));
            if (min_length(inner, g) == 0) return "may derive the empty string";
            return {};  // digit run: range enforced when the message is parsed
        }
        case Shape::Enum:
        case Shape::Union: {
            const Element* e = &inner;
            for (int depth = 0; e && depth < 256; ++depth) {
                if (e->is<Alternation>()) return {};
                if (auto* ref = e->as<RuleRef>()) {
                    const Rule* r = resolve_rule(g, ref->name);
                    e = r ? &r->body : nullptr;
                } else if (auto* named = e->as<Named>()) {
                    e = &*named->inner;
                } else {
                    break;
                }
            }
            return std::string(to_string(shape)) + " requires an alternation";
        }
        case Shape::Struct:
            if (scan_subfields(inner, g).roots.empty()) return "struct collects no named subfields";
            return {};
    }
    return {};
}

void check_named_nodes(const Element& e, const Grammar& g, std::vector<Diagnostic>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Named>) {
                std::optional<Shape> defShape;
                if (auto* ref = n.inner->template as<RuleRef>())
                    if (const Rule* r = resolve_rule(g, ref->name)) defShape = r->shape;
                if (n.shape && !defShape) {  // both given: reported by the subfield scan
                    auto why = shape_mismatch(*n.inner, *n.shape, g);
                    if (!why.empty())
                        out.push_back(error(DiagCode::TypeMismatch, "subfield '" + n.name + "': " + why, e.span));
                }
                check_named_nodes(*n.inner, g, out);
            } else if constexpr (std::is_same_v<T, Sequence>) {
                for (const auto& i : n.items) check_named_nodes(i, g, out);
            } else if constexpr (std::is_same_v<T, Alternation>) {
                for (const auto& b : n.branches) check_named_nodes(b, g, out);
            } else if constexpr (std::is_same_v<T, Repetition>) {
                check_named_nodes(*n.inner, g, out);
            }
        },
        e.node);
}

void report_repeated(const std::vector<SubfieldNode>& nodes, const std::string& owner, std::vector<Diagnostic>& out) {
    for (const auto& n : nodes) {
        if (n.underRepetition)
            out.push_back(warning(DiagCode::RepeatedCapture,
                                  "subfield '" + n.name + "' of '" + owner +
                                      "' sits under a repetition; only the last occurrence is kept",
                                  n.span));
        report_repeated(n.children, owner, out);
    }
}

}  // namespace

std::vector<Diagnostic> check_type_annotations(const AnnotatedGrammar& g) {
    std::vector<Diagnostic> out;
    for (const auto& r : g.baseGrammar.rules()) {
        if (r.shape) {
            auto why = shape_mismatch(r.body, *r.shape, g.baseGrammar);
            if (!why.empty())
                out.push_back(error(DiagCode::TypeMismatch, "rule '" + r.name + "': " + why, r.span));
        }
    }
    for (const auto& body : all_bodies(g)) check_named_nodes(*body.element, g.baseGrammar, out);
    for (const auto& body : entry_bodies(g)) {
        auto scan = scan_subfields(*body.element, g.baseGrammar);
        for (const auto& issue : scan.issues) {
            switch (issue.kind) {
                case SubfieldIssue::Kind::Duplicate:
                    out.push_back(error(DiagCode::DuplicateSubfield, body.owner + ": " + issue.message, issue.span));
                    break;
                case SubfieldIssue::Kind::ShapeCollision:
                    out.push_back(error(DiagCode::TypeMismatch, body.owner + ": " + issue.message, issue.span));
                    break;
                case SubfieldIssue::Kind::DepthExceeded: break;
            }
        }
        report_repeated(scan.roots, body.owner, out);
    }
    return out;
}

namespace {

enum class ValueKind { Numeric, Text, Bool, Invalid };

ValueKind check_expr(const ConstraintExpr& e, const Constraint& owner, std::vector<Diagnostic>& out) {
    auto mismatch = [&](const std::string& why) {
        out.push_back(error(DiagCode::TypeMismatch, "constraint '" + owner.text + "': " + why, owner.span));
        return ValueKind::Invalid;
    };
    if (e.as<IntLiteral>()) return ValueKind::Numeric;
    if (e.as<StringLiteral>()) return ValueKind::Text;
    if (auto* f = e.as<FieldRef>()) {
        if (!f->binding) return ValueKind::Invalid;
        switch (f->binding->shape) {
            case Shape::Uint16:
            case Shape::Uint32: return ValueKind::Numeric;
            case Shape::Struct:
            case Shape::Union: return mismatch("'" + to_string(e) + "' is a " + std::string(to_string(f->binding->shape)) +
                                               " and cannot be compared");
            default: return ValueKind::Text;
        }
    }
    if (auto* c = e.as<Compare>()) {
        ValueKind l = check_expr(*c->lhs, owner, out);
        ValueKind r = check_expr(*c->rhs, owner, out);
        if (l == ValueKind::Invalid || r == ValueKind::Invalid) return ValueKind::Invalid;
        if (l == ValueKind::Bool || r == ValueKind::Bool) return mismatch("comparison operands must be values");
        if (l != r) return mismatch("comparison between a number and a string");
        if (l == ValueKind::Text && c->op != CompareOp::Eq && c->op != CompareOp::Ne)
            return mismatch("strings only support == and !=");
        return ValueKind::Bool;
    }
    if (auto* l = e.as<Logical>()) {
        bool ok = true;
        for (const auto& o : l->operands) {
            ValueKind k = check_expr(o, owner, out);
            if (k == ValueKind::Invalid) ok = false;
            else if (k != ValueKind::Bool) {
                mismatch("operand of a logical connective is not a condition");
                ok = false;
            }
        }
        return ok ? ValueKind::Bool : ValueKind::Invalid;
    }
    if (auto* n = e.as<Not>()) {
        ValueKind k = check_expr(*n->operand, owner, out);
        if (k == ValueKind::Invalid) return k;
        if (k != ValueKind::Bool) return mismatch("operand of '!' is not a condition");
        return ValueKind::Bool;
    }
    return ValueKind::Invalid;
}

std::vector<Diagnostic> check_unreachable(const AnnotatedGrammar& g) {
    std::set<std::string> reached;
    std::vector<const Element*> work;
    for (const auto& body : entry_bodies(g)) work.push_back(body.element);
    while (!work.empty()) {
        const Element* e = work.back();
        work.pop_back();
        for (const auto& [name, span] : referenced_rules(*e)) {
            const Rule* r = g.baseGrammar.find(name);
            if (!r || !reached.insert(fold_case(name)).second) continue;
            work.push_back(&r->body);
        }
    }
    std::vector<Diagnostic> out;
    std::set<std::string> reported;
    for (const auto& r : g.baseGrammar.rules()) {
        auto key = fold_case(r.name);
        if (reached.count(key) || !reported.insert(key).second) continue;
        out.push_back(warning(DiagCode::UnreachableRule,
                              "rule '" + r.name + "' is not reachable from any entry point", r.span));
    }
    return out;
}

}  // namespace

std::vector<Diagnostic> verify_all(const AnnotatedGrammar& g) {
    std::vector<Diagnostic> out;
    auto append = [&](std::vector<Diagnostic> more) {
        out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    };
    append(check_no_omission(g));
    append(check_no_duplicates(g));
    auto cycles = check_no_cycles(g);
    bool cyclic = !cycles.empty();
    append(std::move(cycles));
    if (!cyclic) {
        append(check_type_annotations(g));
        try {
            AnnotatedGrammar bound = resolve_constraint_refs(g);
            auto check_all = [&](const std::vector<Constraint>& cs) {
                for (const auto& c : cs) {
                    ValueKind k = check_expr(c.expr, c, out);
                    if (k != ValueKind::Bool && k != ValueKind::Invalid)
                        out.push_back(error(DiagCode::TypeMismatch, "constraint '" + c.text + "' is not a condition", c.span));
                }
            };
            check_all(bound.requestBlock);
            check_all(bound.responseBlock);
            for (const auto& h : bound.headers) check_all(h.localConstraints);
        } catch (const UnresolvedFieldRef& e) {
            out.push_back(error(DiagCode::UnresolvedRef,
                                "constraint '" + e.constraint() + "' references unknown field '" + e.path() + "'", e.span()));
        }
    }
    append(check_unreachable(g));
    return out;
}

}  // namespace zebu
