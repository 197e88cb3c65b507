// SPDX-License-Identifier: Apache-2.0
#include "zebu/artifact.hpp"

#include <json.hpp>

namespace zebu {

using nlohmann::json;

namespace {

constexpr std::string_view kHex = "0123456789abcdef";

std::string to_hex(std::string_view bytes) {
    std::string out;
    for (unsigned char c : bytes) {
        out += kHex[c >> 4];
        out += kHex[c & 15];
    }
    return out;
}

std::string from_hex(const std::string& hex) {
    if (hex.size() % 2) throw ArtifactError("odd-length hex string");
    std::string out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        auto hi = kHex.find(hex[i]), lo = kHex.find(hex[i + 1]);
        if (hi == kHex.npos || lo == kHex.npos) throw ArtifactError("bad hex digit");
        out += static_cast<char>(hi * 16 + lo);
    }
    return out;
}

json set_to_json(const ByteSet& s) {
    json out = json::array();
    for (unsigned b = 0; b < 256;) {
        if (!s.test(b)) {
            ++b;
            continue;
        }
        unsigned e = b;
        while (e + 1 < 256 && s.test(e + 1)) ++e;
        out.push_back(json::array({b, e}));
        b = e + 1;
    }
    return out;
}

ByteSet set_from_json(const json& j) {
    ByteSet s;
    for (const auto& r : j) {
        unsigned lo = r.at(0).get<unsigned>(), hi = r.at(1).get<unsigned>();
        if (lo > hi || hi > 255) throw ArtifactError("bad byte range");
        for (unsigned b = lo; b <= hi; ++b) s.set(b);
    }
    return s;
}

json max_to_json(std::uint32_t max) { return max == kUnbounded ? json("inf") : json(max); }
std::uint32_t max_from_json(const json& j) { return j.is_string() ? kUnbounded : j.get<std::uint32_t>(); }

json node_to_json(const PatternNode& n) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PLiteral>) {
                return {{"lit", to_hex(x.lower)}};
            } else if constexpr (std::is_same_v<T, PBytes>) {
                return {{"bytes", to_hex(x.bytes)}};
            } else if constexpr (std::is_same_v<T, PByteSet>) {
                return {{"set", set_to_json(x.set)}};
            } else if constexpr (std::is_same_v<T, PSequence>) {
                json items = json::array();
                for (const auto& i : x.items) items.push_back(node_to_json(i));
                return {{"seq", items}};
            } else if constexpr (std::is_same_v<T, PAlternation>) {
                json branches = json::array();
                for (const auto& b : x.branches) branches.push_back(node_to_json(b));
                return {{"alt", branches}, {"slot", x.slot}};
            } else if constexpr (std::is_same_v<T, PRepeat>) {
                return {{"rep", node_to_json(*x.inner)}, {"min", x.min}, {"max", max_to_json(x.max)}};
            } else {
                json out = {{"cap", x.id}, {"inner", node_to_json(*x.inner)}};
                if (x.lazy) {
                    out["lazy"] = true;
                    out["skip"] = set_to_json(x.skipSet);
                    out["skipMin"] = x.skipMin;
                    out["lazyRoot"] = x.lazyRoot;
                }
                return out;
            }
        },
        n.node);
}

PatternNode node_from_json(const json& j) {
    if (j.contains("lit")) return PatternNode{PLiteral{from_hex(j.at("lit").get<std::string>())}};
    if (j.contains("bytes")) return PatternNode{PBytes{from_hex(j.at("bytes").get<std::string>())}};
    if (j.contains("set")) return PatternNode{PByteSet{set_from_json(j.at("set"))}};
    if (j.contains("seq")) {
        PSequence s;
        for (const auto& i : j.at("seq")) s.items.push_back(node_from_json(i));
        return PatternNode{std::move(s)};
    }
    if (j.contains("alt")) {
        PAlternation a;
        a.slot = j.at("slot").get<int>();
        for (const auto& b : j.at("alt")) a.branches.push_back(node_from_json(b));
        return PatternNode{std::move(a)};
    }
    if (j.contains("rep"))
        return PatternNode{PRepeat{j.at("min").get<std::uint32_t>(), max_from_json(j.at("max")),
                                   Box<PatternNode>(node_from_json(j.at("rep")))}};
    if (j.contains("cap")) {
        PCapture c{j.at("cap").get<int>(), false, {}, 0, -1, Box<PatternNode>(node_from_json(j.at("inner")))};
        if (j.value("lazy", false)) {
            c.lazy = true;
            c.skipSet = set_from_json(j.at("skip"));
            c.skipMin = j.at("skipMin").get<std::size_t>();
            c.lazyRoot = j.at("lazyRoot").get<int>();
        }
        return PatternNode{std::move(c)};
    }
    throw ArtifactError("unknown pattern node");
}

Shape shape_from_json(const json& j) {
    auto s = j.get<std::string>();
    if (s == "raw") return Shape::RawSlice;
    if (auto shape = shape_from_keyword(s)) return *shape;
    throw ArtifactError("unknown shape '" + s + "'");
}

json range_to_json(const RangeConstraint& r) { return {{"lo", r.lo}, {"hi", r.hi}, {"hiStrict", r.hiStrict}}; }
RangeConstraint range_from_json(const json& j) {
    return RangeConstraint{j.at("lo").get<std::uint64_t>(), j.at("hi").get<std::uint64_t>(), j.at("hiStrict").get<bool>()};
}

json pattern_to_json(const Pattern& p) {
    json caps = json::array();
    for (const auto& c : p.captures) {
        caps.push_back({{"name", c.name},
                        {"path", c.path},
                        {"shape", std::string(to_string(c.shape))},
                        {"lazy", c.lazy},
                        {"parent", c.parent},
                        {"children", c.children},
                        {"rule", c.rule},
                        {"repeated", c.repeated}});
    }
    json lazy = json::array();
    for (const auto& r : p.lazyRoots) lazy.push_back(node_to_json(r));
    json ranges = json::object();
    for (const auto& [k, r] : p.deferredRangeChecks) ranges[k] = range_to_json(r);
    return {{"root", node_to_json(p.root)}, {"captures", caps}, {"lazyRoots", lazy}, {"ranges", ranges}};
}

Pattern pattern_from_json(const json& j) {
    Pattern p;
    p.root = node_from_json(j.at("root"));
    for (const auto& c : j.at("captures")) {
        CaptureInfo info;
        info.name = c.at("name").get<std::string>();
        info.path = c.at("path").get<std::vector<std::string>>();
        info.shape = shape_from_json(c.at("shape"));
        info.lazy = c.at("lazy").get<bool>();
        info.parent = c.at("parent").get<int>();
        info.children = c.at("children").get<std::vector<int>>();
        info.rule = c.at("rule").get<std::string>();
        info.repeated = c.at("repeated").get<bool>();
        std::string dotted;
        for (const auto& part : info.path) dotted += (dotted.empty() ? "" : ".") + part;
        p.captureIndex[dotted] = static_cast<int>(p.captures.size());
        p.captures.push_back(std::move(info));
    }
    for (const auto& r : j.at("lazyRoots")) p.lazyRoots.push_back(node_from_json(r));
    for (const auto& [k, r] : j.at("ranges").items()) p.deferredRangeChecks[k] = range_from_json(r);
    return p;
}

constexpr std::string_view kEntryKinds[] = {"requestLine", "statusLine", "header", "message"};

json expr_to_json(const ConstraintExpr& e) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLiteral>) {
                return {{"int", x.value}};
            } else if constexpr (std::is_same_v<T, StringLiteral>) {
                return {{"str", x.value}};
            } else if constexpr (std::is_same_v<T, FieldRef>) {
                json out = {{"field", x.path}, {"binding", nullptr}};
                if (x.binding) {
                    const auto& b = *x.binding;
                    out["binding"] = {{"kind", std::string(kEntryKinds[static_cast<int>(b.kind)])},
                                      {"entry", b.entry},
                                      {"path", b.path},
                                      {"shape", std::string(to_string(b.shape))},
                                      {"caseInsensitive", b.caseInsensitive}};
                }
                return out;
            } else if constexpr (std::is_same_v<T, Compare>) {
                return {{"cmp", std::string(to_string(x.op))}, {"lhs", expr_to_json(*x.lhs)}, {"rhs", expr_to_json(*x.rhs)}};
            } else if constexpr (std::is_same_v<T, Logical>) {
                json ops = json::array();
                for (const auto& o : x.operands) ops.push_back(expr_to_json(o));
                return {{x.isAnd ? "and" : "or", ops}};
            } else {
                return {{"not", expr_to_json(*x.operand)}};
            }
        },
        e.node);
}

ConstraintExpr expr_from_json(const json& j) {
    if (j.contains("int")) return ConstraintExpr{IntLiteral{j.at("int").get<std::uint64_t>()}, {}};
    if (j.contains("str")) return ConstraintExpr{StringLiteral{j.at("str").get<std::string>()}, {}};
    if (j.contains("field")) {
        FieldRef f{j.at("field").get<std::vector<std::string>>(), std::nullopt};
        if (const auto& b = j.at("binding"); !b.is_null()) {
            FieldBinding fb;
            auto kind = b.at("kind").get<std::string>();
            bool known = false;
            for (int i = 0; i < 4; ++i)
                if (kEntryKinds[i] == kind) {
                    fb.kind = static_cast<EntryKind>(i);
                    known = true;
                }
            if (!known) throw ArtifactError("unknown binding kind '" + kind + "'");
            fb.entry = b.at("entry").get<std::string>();
            fb.path = b.at("path").get<std::vector<std::string>>();
            fb.shape = shape_from_json(b.at("shape"));
            fb.caseInsensitive = b.at("caseInsensitive").get<bool>();
            f.binding = std::move(fb);
        }
        return ConstraintExpr{std::move(f), {}};
    }
    if (j.contains("cmp")) {
        auto op = j.at("cmp").get<std::string>();
        for (CompareOp c : {CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge})
            if (to_string(c) == op)
                return ConstraintExpr{Compare{c, Box<ConstraintExpr>(expr_from_json(j.at("lhs"))),
                                              Box<ConstraintExpr>(expr_from_json(j.at("rhs")))},
                                      {}};
        throw ArtifactError("unknown comparison '" + op + "'");
    }
    if (j.contains("and") || j.contains("or")) {
        Logical l;
        l.isAnd = j.contains("and");
        for (const auto& o : j.at(l.isAnd ? "and" : "or")) l.operands.push_back(expr_from_json(o));
        return ConstraintExpr{std::move(l), {}};
    }
    if (j.contains("not")) return ConstraintExpr{Not{Box<ConstraintExpr>(expr_from_json(j.at("not")))}, {}};
    throw ArtifactError("unknown constraint node");
}

json constraints_to_json(const std::vector<Constraint>& cs) {
    json out = json::array();
    for (const auto& c : cs)
        out.push_back({{"expr", expr_to_json(c.expr)}, {"text", c.text}, {"line", c.span.line}, {"column", c.span.column}});
    return out;
}

std::vector<Constraint> constraints_from_json(const json& j) {
    std::vector<Constraint> out;
    for (const auto& c : j)
        out.push_back(Constraint{expr_from_json(c.at("expr")), c.at("text").get<std::string>(),
                                 SourceSpan{c.at("line").get<int>(), c.at("column").get<int>()}, false});
    return out;
}

constexpr std::string_view kMandatory[] = {"none", "request", "response", "both"};

}  // namespace

std::string serialize_artifact(const CompiledGrammar& g) {
    json headers = json::array();
    for (const auto& h : g.headers) {
        headers.push_back({{"name", h.name},
                           {"keys", h.keys},
                           {"mandatory", std::string(kMandatory[static_cast<int>(h.mandatoryIn)])},
                           {"multiple", h.multiple},
                           {"readonly", h.readOnly},
                           {"pattern", pattern_to_json(h.pattern)},
                           {"constraints", constraints_to_json(h.constraints)}});
    }
    json doc = {{"formatVersion", kArtifactFormatVersion},
                {"protocolName", g.protocolName},
                {"requestLine", pattern_to_json(g.requestLinePattern)},
                {"statusLine", pattern_to_json(g.statusLinePattern)},
                {"headers", headers},
                {"requestConstraints", constraints_to_json(g.requestConstraints)},
                {"responseConstraints", constraints_to_json(g.responseConstraints)},
                {"lazySet", g.lazySet},
                {"source", g.source}};
    return doc.dump(2) + "\n";
}

CompiledGrammar load_artifact(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ArtifactError(std::string("artifact is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("formatVersion").get<int>() != kArtifactFormatVersion)
            throw ArtifactError("unsupported artifact formatVersion " + doc.at("formatVersion").dump());
        CompiledGrammar g;
        g.protocolName = doc.at("protocolName").get<std::string>();
        g.requestLinePattern = pattern_from_json(doc.at("requestLine"));
        g.statusLinePattern = pattern_from_json(doc.at("statusLine"));
        for (const auto& h : doc.at("headers")) {
            HeaderEntry e;
            e.name = h.at("name").get<std::string>();
            e.keys = h.at("keys").get<std::vector<std::string>>();
            auto m = h.at("mandatory").get<std::string>();
            bool known = false;
            for (int i = 0; i < 4; ++i)
                if (kMandatory[i] == m) {
                    e.mandatoryIn = static_cast<Mandatory>(i);
                    known = true;
                }
            if (!known) throw ArtifactError("unknown mandatory value '" + m + "'");
            e.multiple = h.at("multiple").get<bool>();
            e.readOnly = h.at("readonly").get<bool>();
            e.pattern = pattern_from_json(h.at("pattern"));
            e.constraints = constraints_from_json(h.at("constraints"));
            for (const auto& k : e.keys) g.headerTable[k] = g.headers.size();
            g.headers.push_back(std::move(e));
        }
        g.requestConstraints = constraints_from_json(doc.at("requestConstraints"));
        g.responseConstraints = constraints_from_json(doc.at("responseConstraints"));
        g.lazySet = doc.at("lazySet").get<std::set<std::string>>();
        g.source = doc.at("source").get<std::string>();
        if (!g.source.empty())
            g.annotated = std::make_shared<AnnotatedGrammar>(resolve_constraint_refs(parse_zebu(g.source, g.protocolName)));
        return g;
    } catch (const json::exception& e) {
        throw ArtifactError(std::string("malformed artifact: ") + e.what());
    } catch (const SyntaxError& e) {
        throw ArtifactError(std::string("embedded grammar does not parse: ") + e.what());
    }
}

}  // namespace zebu
