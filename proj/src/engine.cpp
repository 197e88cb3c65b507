// SPDX-License-Identifier: Apache-2.0
#include "zebu/engine.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace zebu {

namespace {

std::string join(const std::vector<std::string>& path, std::size_t from = 0) {
    std::string out;
    for (std::size_t i = from; i < path.size(); ++i) {
        if (!out.empty()) out += '.';
        out += path[i];
    }
    return out;
}

std::vector<std::string> split_path(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto dot = text.find('.', start);
        out.emplace_back(text.substr(start, dot == std::string_view::npos ? text.npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return out;
}

std::string collect_errors(const std::vector<Diagnostic>& d) {
    std::string out = "grammar verification failed";
    for (const auto& x : d)
        if (x.severity == Severity::Error) out += "\n  " + format_diagnostic(x, "grammar");
    return out;
}

bool is_ws(char c) { return c == ' ' || c == '\t'; }

bool is_token_char(unsigned char c) {
    if (c <= 0x20 || c >= 0x7F) return false;
    static const std::string_view separators = "()<>@,;:\\\"/[]?={}";
    return separators.find(static_cast<char>(c)) == std::string_view::npos;
}

std::vector<Constraint> unlifted(const std::vector<Constraint>& cs) {
    std::vector<Constraint> out;
    for (const auto& c : cs)
        if (!c.liftedToRange) out.push_back(c);
    return out;
}

void add_lazy(std::set<std::string>& out, const Pattern& p, const std::string& entry) {
    for (const auto& c : p.captures)
        if (c.lazy) out.insert(entry + "." + join(c.path));
}

std::string accessor_part(std::string_view name, bool capitalize) {
    std::string out;
    for (char c : name) out += (c == '-' || c == '.') ? '_' : c;
    if (capitalize && !out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

}  // namespace

CompileError::CompileError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(collect_errors(diagnostics)), diagnostics_(std::move(diagnostics)) {}

const HeaderEntry* CompiledGrammar::find_header(std::string_view name) const {
    auto i = header_index(name);
    return i ? &headers[*i] : nullptr;
}

std::optional<std::size_t> CompiledGrammar::header_index(std::string_view name) const {
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (iequals(headers[i].name, name)) return i;
    return std::nullopt;
}

CompiledGrammar compile_grammar(const AnnotatedGrammar& g, std::string source) {
    auto diagnostics = verify_all(g);
    if (has_errors(diagnostics)) throw CompileError(std::move(diagnostics));
    auto bound = std::make_shared<AnnotatedGrammar>(resolve_constraint_refs(g));

    CompiledGrammar c;
    c.protocolName = bound->protocolName;
    c.requestLinePattern = compile_entry(*bound, bound->requestLine->body, "requestLine");
    c.statusLinePattern = compile_entry(*bound, bound->statusLine->body, "statusLine");
    add_lazy(c.lazySet, c.requestLinePattern, "requestLine");
    add_lazy(c.lazySet, c.statusLinePattern, "statusLine");
    for (const auto& h : bound->headers) {
        HeaderEntry e;
        e.name = h.name;
        for (const auto& k : header_keys(h)) e.keys.push_back(fold_case(k));
        e.mandatoryIn = h.mandatoryIn;
        e.multiple = h.multiple;
        e.readOnly = h.readOnly;
        e.pattern = compile_entry(*bound, h.body, h.name);
        e.constraints = unlifted(h.localConstraints);
        add_lazy(c.lazySet, e.pattern, h.name);
        for (const auto& k : e.keys) c.headerTable[k] = c.headers.size();
        c.headers.push_back(std::move(e));
    }
    c.requestConstraints = unlifted(bound->requestBlock);
    c.responseConstraints = unlifted(bound->responseBlock);
    c.source = std::move(source);
    c.annotated = std::move(bound);
    return c;
}

CompiledGrammar compile_source(std::string_view source, std::string defaultProtocol) {
    return compile_grammar(parse_zebu(source, std::move(defaultProtocol)), std::string(source));
}

std::vector<std::string> accessor_names(const CompiledGrammar& g) {
    std::vector<std::string> out;
    auto add = [&](std::string name) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    };
    const std::string proto = accessor_part(g.protocolName, false);
    add(proto + "_parse_headers");
    add(proto + "_Method_getType");
    auto captures = [&](const Pattern& p, const std::string& prefix) {
        for (const auto& c : p.captures) {
            std::string sub;
            for (const auto& part : c.path) sub += (sub.empty() ? "" : "_") + accessor_part(part, true);
            add(prefix + "_get" + sub);
            if (c.lazy && !c.rule.empty()) add(proto + "_Lazy_" + accessor_part(c.rule, true) + "_getParsed");
        }
    };
    captures(g.requestLinePattern, proto + "_RequestLine");
    captures(g.statusLinePattern, proto + "_StatusLine");
    for (const auto& h : g.headers) {
        add(proto + "_get_header_" + accessor_part(h.name, false));
        captures(h.pattern, proto + "_header_" + accessor_part(h.name, false));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ReasonCode code) {
    switch (code) {
        case ReasonCode::Syntax: return "SYNTAX";
        case ReasonCode::Constraint: return "CONSTRAINT";
        case ReasonCode::Range: return "RANGE";
        case ReasonCode::MandatoryMissing: return "MANDATORY_MISSING";
        case ReasonCode::DuplicateHeader: return "DUPLICATE_HEADER";
        case ReasonCode::Folding: return "FOLDING";
        case ReasonCode::Budget: return "BUDGET";
    }
    return "UNKNOWN";
}

LineIndex index_message(std::string_view raw) {
    LineIndex idx;
    auto fail = [&](ReasonCode code, int line, std::string message) {
        idx.errors.push_back(Reason{code, line, std::move(message)});
    };
    if (raw.empty()) {
        fail(ReasonCode::Syntax, 0, "empty message");
        return idx;
    }
    std::size_t pos = 0;
    int lineNo = 1;
    bool terminated = false;
    while (pos < raw.size()) {
        std::size_t eol = raw.find_first_of("\r\n", pos);
        if (eol == std::string_view::npos) {
            fail(ReasonCode::Syntax, lineNo, "line is not terminated by CRLF");
            return idx;
        }
        if (raw[eol] == '\n') {
            fail(ReasonCode::Syntax, lineNo, "bare LF");
            return idx;
        }
        if (eol + 1 >= raw.size() || raw[eol + 1] != '\n') {
            fail(ReasonCode::Syntax, lineNo, "bare CR");
            return idx;
        }
        ByteSpan line{pos, eol};
        std::size_t next = eol + 2;
        if (lineNo == 1) {
            if (line.size() == 0) {
                fail(ReasonCode::Syntax, lineNo, "no command line");
                return idx;
            }
            idx.commandLine = line;
        } else if (line.size() == 0) {
            idx.body = ByteSpan{next, raw.size()};
            terminated = true;
            break;
        } else if (is_ws(raw[pos])) {
            bool blank = std::all_of(raw.begin() + pos, raw.begin() + eol, is_ws);
            if (idx.headers.empty()) fail(ReasonCode::Syntax, lineNo, "continuation line before any header");
            else if (blank) fail(ReasonCode::Folding, lineNo, "continuation line holds only whitespace");
            else idx.headers.back().segments.push_back(line);
        } else {
            std::size_t colon = raw.find(':', pos);
            if (colon == std::string_view::npos || colon > eol) {
                fail(ReasonCode::Syntax, lineNo, "header line without ':'");
            } else {
                std::size_t keyEnd = colon;
                while (keyEnd > pos && is_ws(raw[keyEnd - 1])) --keyEnd;
                bool valid = keyEnd > pos && std::all_of(raw.begin() + pos, raw.begin() + keyEnd, [](char c) {
                                 return is_token_char(static_cast<unsigned char>(c));
                             });
                if (!valid) fail(ReasonCode::Syntax, lineNo, "invalid header name");
                else idx.headers.push_back(HeaderLine{ByteSpan{pos, keyEnd}, {ByteSpan{colon + 1, eol}}, lineNo});
            }
        }
        pos = next;
        ++lineNo;
    }
    if (!terminated) fail(ReasonCode::Syntax, lineNo, "missing empty line after the header section");
    return idx;
}

std::string unfold_value(std::string_view raw, const HeaderLine& h) {
    std::string out;
    for (std::size_t i = 0; i < h.segments.size(); ++i) {
        std::string_view seg = raw.substr(h.segments[i].begin, h.segments[i].size());
        if (i > 0) {
            while (!seg.empty() && is_ws(seg.front())) seg.remove_prefix(1);
            out += ' ';
        }
        out += seg;
    }
    std::size_t lead = 0;
    while (lead < out.size() && is_ws(out[lead])) ++lead;
    return out.substr(lead);
}

std::string to_string(const TypedValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Absent>) {
                return "ABSENT";
            } else if constexpr (std::is_same_v<T, RawSlice>) {
                return x.text;
            } else if constexpr (std::is_same_v<T, U16> || std::is_same_v<T, U32>) {
                return std::to_string(x.value);
            } else if constexpr (std::is_same_v<T, EnumTag>) {
                return x.text + " #" + std::to_string(x.branch);
            } else if constexpr (std::is_same_v<T, LazyPending>) {
                return "LAZY(" + x.text + ")";
            } else {
                std::string out;
                if constexpr (std::is_same_v<T, UnionVal>) out = "#" + std::to_string(x.branch) + " ";
                out += "{";
                bool first = true;
                for (const auto& [k, val] : *x.fields) {
                    out += (first ? "" : ", ") + k + "=" + to_string(val);
                    first = false;
                }
                return out + "}";
            }
        },
        v.v);
}

// ---------------------------------------------------------------------------

Session::Session(const CompiledGrammar& g, std::string raw) : g_(g), raw_(std::move(raw)), index_(index_message(raw_)) {
    lineEntry_.reserve(index_.headers.size());
    for (const auto& h : index_.headers) {
        auto it = g_.headerTable.find(fold_case(std::string_view(raw_).substr(h.key.begin, h.key.size())));
        lineEntry_.push_back(it == g_.headerTable.end() ? -1 : static_cast<int>(it->second));
    }
}

const Pattern& Session::pattern_for(int entry) const {
    if (entry == kRequestLineEntry) return g_.requestLinePattern;
    if (entry == kStatusLineEntry) return g_.statusLinePattern;
    return g_.headers.at(static_cast<std::size_t>(entry)).pattern;
}

std::vector<std::size_t> Session::lines_of(std::size_t entry) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < lineEntry_.size(); ++i)
        if (lineEntry_[i] == static_cast<int>(entry)) out.push_back(i);
    return out;
}

std::size_t Session::occurrences(std::string_view header) const {
    auto i = g_.header_index(header);
    return i ? lines_of(*i).size() : 0;
}

MessageKind Session::message_type() {
    if (kind_) return *kind_;
    if (kindFailure_) throw ParseFailure(*kindFailure_);
    if (index_.commandLine.size() == 0) {
        kindFailure_ = Reason{ReasonCode::Syntax, 1, "no command line"};
        throw ParseFailure(*kindFailure_);
    }
    std::string text = raw_.substr(index_.commandLine.begin, index_.commandLine.size());
    try {
        for (int entry : {kRequestLineEntry, kStatusLineEntry}) {
            const Pattern& p = pattern_for(entry);
            ++execs_;
            MatchResult m = match_full(p, text, MatchMode::Deferred);
            if (!m.matched) continue;
            command_ = ParsedHeader{entry, 0, 1, text, ParsedHeader::State::Unparsed, std::nullopt, {}};
            fill(command_, p, m, true);
            kind_ = entry == kRequestLineEntry ? MessageKind::Request : MessageKind::Response;
            return *kind_;
        }
        kindFailure_ = Reason{ReasonCode::Syntax, 1, "command line is neither a request line nor a status line"};
    } catch (const MatchBudgetExceeded&) {
        kindFailure_ = Reason{ReasonCode::Budget, 1, "match budget exhausted on the command line"};
    }
    throw ParseFailure(*kindFailure_);
}

const ParsedHeader& Session::command_line() {
    try {
        message_type();
    } catch (const ParseFailure& f) {
        command_.state = ParsedHeader::State::ParseFailed;
        command_.failure = f.reason();
    }
    return command_;
}

const ParsedHeader& Session::parse_header_nth(std::string_view header, std::size_t n) {
    auto entry = g_.header_index(header);
    if (!entry) throw UnknownSubfield(std::string(header));
    const HeaderEntry& decl = g_.headers[*entry];
    auto lines = lines_of(*entry);
    if (lines.size() > 1 && !decl.multiple) {
        auto key = std::make_pair(static_cast<int>(*entry), -1);
        auto it = memo_.find(key);
        if (it == memo_.end()) {
            ParsedHeader h;
            h.entry = static_cast<int>(*entry);
            h.line = index_.headers[lines[1]].line;
            h.state = ParsedHeader::State::ParseFailed;
            h.failure = Reason{ReasonCode::DuplicateHeader, h.line,
                               "header '" + decl.name + "' appears " + std::to_string(lines.size()) + " times"};
            it = memo_.emplace(key, std::move(h)).first;
        }
        return it->second;
    }
    return parse_occurrence(*entry, n);
}

const ParsedHeader& Session::parse_occurrence(std::size_t entry, std::size_t n) {
    auto key = std::make_pair(static_cast<int>(entry), static_cast<int>(n));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    ParsedHeader h;
    h.entry = static_cast<int>(entry);
    h.occurrence = static_cast<int>(n);
    auto lines = lines_of(entry);
    if (n >= lines.size()) {
        h.state = ParsedHeader::State::Absent;
        return memo_.emplace(key, std::move(h)).first->second;
    }
    const HeaderLine& line = index_.headers[lines[n]];
    const HeaderEntry& decl = g_.headers[entry];
    h.line = line.line;
    h.rawValue = unfold_value(raw_, line);
    ++execs_;
    try {
        MatchResult m = match_full(decl.pattern, h.rawValue, MatchMode::Deferred);
        if (m.matched) {
            fill(h, decl.pattern, m, true);
        } else {
            h.state = ParsedHeader::State::ParseFailed;
            h.failure = Reason{ReasonCode::Syntax, h.line, "value of header '" + decl.name + "' does not match its grammar"};
        }
    } catch (const MatchBudgetExceeded&) {
        h.state = ParsedHeader::State::ParseFailed;
        h.failure = Reason{ReasonCode::Budget, h.line, "match budget exhausted on header '" + decl.name + "'"};
    }
    return memo_.emplace(key, std::move(h)).first->second;
}

void Session::fill(ParsedHeader& h, const Pattern& p, const MatchResult& m, bool deferred) {
    try {
        for (int id : p.top_level())
            h.subfields[p.captures[id].name] = convert(p, m, id, h.rawValue, deferred, h.entry, h.occurrence, h.line);
        h.state = ParsedHeader::State::ParsedOk;
    } catch (const ParseFailure& f) {
        h.subfields.clear();
        h.state = ParsedHeader::State::ParseFailed;
        h.failure = f.reason();
    }
}

namespace {

std::string entry_name(const CompiledGrammar& g, int entry) {
    if (entry == kRequestLineEntry) return "requestLine";
    if (entry == kStatusLineEntry) return "statusLine";
    return g.headers.at(static_cast<std::size_t>(entry)).name;
}

}  // namespace

TypedValue Session::convert(const Pattern& p, const MatchResult& m, int id, std::string_view text, bool deferred,
                            int entry, int occurrence, int lineNo) const {
    const CaptureInfo& info = p.captures[id];
    const CaptureSpan& span = m.captures[id];
    if (!span.set) return TypedValue{Absent{}};
    std::string_view t = text.substr(span.start, span.end - span.start);
    if (info.lazy && deferred) return TypedValue{LazyPending{entry, occurrence, id, span.lazyRoot, std::string(t)}};

    const std::string path = join(info.path);
    switch (info.shape) {
        case Shape::RawSlice: return TypedValue{RawSlice{std::string(t)}};
        case Shape::Uint16:
        case Shape::Uint32: {
            const std::string where = entry_name(g_, entry) + "." + path;
            if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
                throw ParseFailure(Reason{ReasonCode::Syntax, lineNo, where + " is not a decimal number"});
            const std::uint64_t max = info.shape == Shape::Uint16 ? 0xFFFFull : 0xFFFFFFFFull;
            std::uint64_t value = 0;
            for (char c : t) {
                value = value * 10 + static_cast<std::uint64_t>(c - '0');
                if (value > max)
                    throw ParseFailure(Reason{ReasonCode::Range, lineNo,
                                              where + " value " + std::string(t) + " exceeds " +
                                                  std::string(to_string(info.shape))});
            }
            if (auto r = p.deferredRangeChecks.find(path); r != p.deferredRangeChecks.end() && !r->second.contains(value))
                throw ParseFailure(Reason{ReasonCode::Range, lineNo,
                                          where + " value " + std::to_string(value) + " outside [" +
                                              std::to_string(r->second.lo) + ", " + std::to_string(r->second.hi) +
                                              (r->second.hiStrict ? ")" : "]")});
            if (info.shape == Shape::Uint16) return TypedValue{U16{static_cast<std::uint16_t>(value)}};
            return TypedValue{U32{static_cast<std::uint32_t>(value)}};
        }
        case Shape::Enum: return TypedValue{EnumTag{span.branch, std::string(t)}};
        case Shape::Struct:
        case Shape::Union: {
            auto fields = std::make_shared<FieldMap>();
            for (int child : info.children) {
                TypedValue v = convert(p, m, child, text, deferred, entry, occurrence, lineNo);
                if (info.shape == Shape::Union && v.is<Absent>()) continue;
                (*fields)[p.captures[child].name] = std::move(v);
            }
            if (info.shape == Shape::Struct) return TypedValue{StructVal{std::move(fields)}};
            return TypedValue{UnionVal{span.branch, std::move(fields)}};
        }
    }
    return TypedValue{Absent{}};
}

TypedValue Session::force_lazy(const LazyPending& handle) {
    auto key = std::make_tuple(handle.entry, handle.occurrence, handle.capture);
    if (auto it = lazyMemo_.find(key); it != lazyMemo_.end()) {
        if (it->second.failure) throw ParseFailure(*it->second.failure);
        return *it->second.value;
    }
    const Pattern& p = pattern_for(handle.entry);
    int lineNo = 1;
    if (handle.entry >= 0)
        if (auto it = memo_.find({handle.entry, handle.occurrence}); it != memo_.end()) lineNo = it->second.line;
    const std::string where = entry_name(g_, handle.entry) + "." + join(p.captures.at(handle.capture).path);

    LazyMemo& slot = lazyMemo_[key];
    ++execs_;
    ++lazyExecs_;
    try {
        MatchResult m = match_lazy(p, handle.lazyRoot, handle.text);
        if (!m.matched) {
            slot.failure = Reason{ReasonCode::Syntax, lineNo, "lazy subfield " + where + " does not match its grammar"};
        } else {
            // The lazy pattern is the capture's inner element; the capture itself spans everything.
            m.captures[handle.capture].set = true;
            m.captures[handle.capture].start = 0;
            m.captures[handle.capture].end = handle.text.size();
            slot.value = convert(p, m, handle.capture, handle.text, false, handle.entry, handle.occurrence, lineNo);
        }
    } catch (const MatchBudgetExceeded&) {
        slot.failure = Reason{ReasonCode::Budget, lineNo, "match budget exhausted on " + where};
    } catch (const ParseFailure& f) {
        slot.failure = f.reason();
    }
    if (slot.failure) throw ParseFailure(*slot.failure);
    return *slot.value;
}

TypedValue Session::get_subfield(const ParsedHeader& h, std::string_view path) {
    if (h.state == ParsedHeader::State::Absent) return TypedValue{Absent{}};
    if (h.state != ParsedHeader::State::ParsedOk) throw ParseFailure(*h.failure);
    const Pattern& p = pattern_for(h.entry);
    auto parts = split_path(path);
    auto it = h.subfields.find(parts[0]);
    if (it == h.subfields.end()) throw UnknownSubfield(std::string(path));
    return walk(p, it->second, parts, 1, false);
}

TypedValue Session::walk(const Pattern& p, TypedValue cur, const std::vector<std::string>& path, std::size_t from,
                         bool force) {
    for (std::size_t i = from;; ++i) {
        if (auto* lazy = cur.as<LazyPending>()) {
            if (!force) return cur;
            cur = force_lazy(*lazy);
        }
        if (i == path.size()) return cur;
        std::string prefix = join(std::vector<std::string>(path.begin(), path.begin() + static_cast<long>(i) + 1));
        if (!p.captureIndex.count(prefix)) throw UnknownSubfield(prefix);
        const FieldMap* fields = nullptr;
        if (auto* s = cur.as<StructVal>()) fields = s->fields.get();
        else if (auto* u = cur.as<UnionVal>()) fields = u->fields.get();
        else if (cur.is<Absent>()) return cur;
        else throw UnknownSubfield(prefix);
        auto it = fields->find(path[i]);
        if (it == fields->end()) return TypedValue{Absent{}};
        cur = it->second;
    }
}

TypedValue Session::select(std::string_view selector, bool force) {
    auto parts = split_path(selector);
    int entry;
    const ParsedHeader* h;
    if (iequals(parts[0], "requestLine") || iequals(parts[0], "statusLine")) {
        entry = iequals(parts[0], "requestLine") ? kRequestLineEntry : kStatusLineEntry;
        MessageKind want = entry == kRequestLineEntry ? MessageKind::Request : MessageKind::Response;
        const ParsedHeader& cmd = command_line();
        if (cmd.state == ParsedHeader::State::ParseFailed) throw ParseFailure(*cmd.failure);
        if (message_type() != want) {
            if (parts.size() > 1 && !pattern_for(entry).captureIndex.count(join(parts, 1)))
                throw UnknownSubfield(std::string(selector));
            return TypedValue{Absent{}};
        }
        h = &cmd;
    } else {
        auto idx = g_.header_index(parts[0]);
        if (!idx) throw UnknownSubfield(std::string(selector));
        entry = static_cast<int>(*idx);
        h = &parse_header(parts[0]);
        if (h->state == ParsedHeader::State::ParseFailed) throw ParseFailure(*h->failure);
    }
    const Pattern& p = pattern_for(entry);
    if (parts.size() == 1) {
        if (h->state == ParsedHeader::State::Absent) return TypedValue{Absent{}};
        return TypedValue{StructVal{std::make_shared<FieldMap>(h->subfields)}};
    }
    if (!p.captureIndex.count(parts[1])) throw UnknownSubfield(std::string(selector));
    if (h->state == ParsedHeader::State::Absent) return TypedValue{Absent{}};
    auto it = h->subfields.find(parts[1]);
    if (it == h->subfields.end()) return TypedValue{Absent{}};
    std::vector<std::string> rest(parts.begin() + 1, parts.end());
    return walk(p, it->second, rest, 1, force);
}

// ---------------------------------------------------------------------------

namespace {

struct Value {
    enum class Kind { None, Number, Text } kind = Kind::None;
    std::uint64_t number = 0;
    std::string text;
    bool caseInsensitive = true;
};

Value lookup(const FieldRef& ref, Session& s, MessageKind kind, const CompiledGrammar& g) {
    const FieldBinding& b = *ref.binding;
    if (b.kind == EntryKind::Message)
        return Value{Value::Kind::Text, 0, std::string(to_string(kind)), true};
    std::string selector;
    if (b.kind == EntryKind::RequestLine) {
        if (kind != MessageKind::Request) return {};
        selector = "requestLine";
    } else if (b.kind == EntryKind::StatusLine) {
        if (kind != MessageKind::Response) return {};
        selector = "statusLine";
    } else {
        auto idx = g.header_index(b.entry);
        if (!idx || s.lines_of(*idx).empty()) return {};
        const ParsedHeader& h = s.parse_occurrence(*idx, 0);
        if (h.state != ParsedHeader::State::ParsedOk) return {};
        selector = g.headers[*idx].name;
    }
    for (const auto& p : b.path) selector += "." + p;
    TypedValue v;
    try {
        v = s.select(selector, true);
    } catch (const ParseFailure&) {
        return {};
    } catch (const UnknownSubfield&) {
        return {};
    }
    if (auto* u16 = v.as<U16>()) return Value{Value::Kind::Number, u16->value, {}, true};
    if (auto* u32 = v.as<U32>()) return Value{Value::Kind::Number, u32->value, {}, true};
    if (auto* raw = v.as<RawSlice>()) return Value{Value::Kind::Text, 0, raw->text, b.caseInsensitive};
    if (auto* e = v.as<EnumTag>()) return Value{Value::Kind::Text, 0, e->text, b.caseInsensitive};
    return {};
}

std::optional<bool> eval(const ConstraintExpr& e, Session& s, MessageKind kind, const CompiledGrammar& g);

Value operand(const ConstraintExpr& e, Session& s, MessageKind kind, const CompiledGrammar& g) {
    if (auto* i = e.as<IntLiteral>()) return Value{Value::Kind::Number, i->value, {}, true};
    if (auto* str = e.as<StringLiteral>()) return Value{Value::Kind::Text, 0, str->value, true};
    if (auto* f = e.as<FieldRef>()) return f->binding ? lookup(*f, s, kind, g) : Value{};
    return {};
}

std::optional<bool> eval(const ConstraintExpr& e, Session& s, MessageKind kind, const CompiledGrammar& g) {
    if (auto* c = e.as<Compare>()) {
        Value l = operand(*c->lhs, s, kind, g);
        Value r = operand(*c->rhs, s, kind, g);
        if (l.kind == Value::Kind::None || r.kind == Value::Kind::None || l.kind != r.kind) return std::nullopt;
        if (l.kind == Value::Kind::Number) {
            switch (c->op) {
                case CompareOp::Eq: return l.number == r.number;
                case CompareOp::Ne: return l.number != r.number;
                case CompareOp::Lt: return l.number < r.number;
                case CompareOp::Le: return l.number <= r.number;
                case CompareOp::Gt: return l.number > r.number;
                case CompareOp::Ge: return l.number >= r.number;
            }
        }
        bool equal = (l.caseInsensitive && r.caseInsensitive) ? iequals(l.text, r.text) : l.text == r.text;
        if (c->op == CompareOp::Eq) return equal;
        if (c->op == CompareOp::Ne) return !equal;
        return std::nullopt;
    }
    if (auto* l = e.as<Logical>()) {
        bool result = l->isAnd;
        for (const auto& o : l->operands) {
            auto v = eval(o, s, kind, g);
            if (!v) return std::nullopt;
            result = l->isAnd ? (result && *v) : (result || *v);
        }
        return result;
    }
    if (auto* n = e.as<Not>()) {
        auto v = eval(*n->operand, s, kind, g);
        if (!v) return std::nullopt;
        return !*v;
    }
    return std::nullopt;
}

void force_all(Session& s, const TypedValue& v, std::vector<Reason>& reasons) {
    if (auto* lazy = v.as<LazyPending>()) {
        try {
            force_all(s, s.force_lazy(*lazy), reasons);
        } catch (const ParseFailure& f) {
            reasons.push_back(f.reason());
        }
        return;
    }
    const FieldMap* fields = nullptr;
    if (auto* st = v.as<StructVal>()) fields = st->fields.get();
    if (auto* un = v.as<UnionVal>()) fields = un->fields.get();
    if (fields)
        for (const auto& [name, child] : *fields) force_all(s, child, reasons);
}

}  // namespace

std::optional<bool> evaluate_constraint(const CompiledGrammar& g, const Constraint& c, Session& s, MessageKind kind) {
    return eval(c.expr, s, kind, g);
}

std::string Verdict::render() const {
    if (accept) return "ACCEPT\n";
    std::string out;
    for (const auto& r : reasons) {
        out += "REJECT ";
        out += to_string(r.code);
        out += r.line > 0 ? " line:" + std::to_string(r.line) : std::string(" message");
        out += " " + r.message + "\n";
    }
    return out;
}

Verdict validate(const CompiledGrammar& g, std::string_view raw) {
    Session s(g, std::string(raw));
    return validate(g, s);
}

Verdict validate(const CompiledGrammar& g, Session& s) {
    Verdict v;
    auto finish = [&]() {
        v.accept = v.reasons.empty();
        return v;
    };
    if (!s.index().ok()) {
        v.reasons = s.index().errors;
        return finish();
    }
    MessageKind kind;
    try {
        kind = s.message_type();
    } catch (const ParseFailure& f) {
        v.reasons.push_back(f.reason());
        return finish();
    }
    v.kind = kind;
    const ParsedHeader& cmd = s.command_line();
    if (cmd.state == ParsedHeader::State::ParseFailed) v.reasons.push_back(*cmd.failure);
    else
        for (const auto& [name, val] : cmd.subfields) force_all(s, val, v.reasons);

    std::vector<bool> present(g.headers.size(), false);
    for (std::size_t i = 0; i < g.headers.size(); ++i) {
        const HeaderEntry& decl = g.headers[i];
        auto lines = s.lines_of(i);
        present[i] = !lines.empty();
        if (lines.empty()) {
            if (mandatory_in(decl.mandatoryIn, kind))
                v.reasons.push_back(Reason{ReasonCode::MandatoryMissing, 0,
                                           "mandatory header '" + decl.name + "' is missing from the " +
                                               std::string(to_string(kind))});
            continue;
        }
        if (lines.size() > 1 && !decl.multiple)
            v.reasons.push_back(Reason{ReasonCode::DuplicateHeader, s.index().headers[lines[1]].line,
                                       "header '" + decl.name + "' appears " + std::to_string(lines.size()) + " times"});
        for (std::size_t n = 0; n < lines.size(); ++n) {
            const ParsedHeader& h = s.parse_occurrence(i, n);
            if (h.state == ParsedHeader::State::ParseFailed) {
                v.reasons.push_back(*h.failure);
                continue;
            }
            for (const auto& [name, val] : h.subfields) force_all(s, val, v.reasons);
        }
    }
    const auto& entries = s.line_entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i] >= 0) continue;
        std::string value = unfold_value(s.raw(), s.index().headers[i]);
        bool bad = std::any_of(value.begin(), value.end(), [](char c) {
            unsigned char u = static_cast<unsigned char>(c);
            return (u < 0x20 && u != '\t') || u == 0x7F;
        });
        if (bad)
            v.reasons.push_back(Reason{ReasonCode::Syntax, s.index().headers[i].line,
                                       "control character in the value of an undeclared header"});
    }

    auto check = [&](const std::vector<Constraint>& cs) {
        for (const auto& c : cs) {
            auto ok = eval(c.expr, s, kind, g);
            if (ok && !*ok) v.reasons.push_back(Reason{ReasonCode::Constraint, 0, "constraint '" + c.text + "' violated"});
        }
    };
    check(kind == MessageKind::Request ? g.requestConstraints : g.responseConstraints);
    for (std::size_t i = 0; i < g.headers.size(); ++i)
        if (present[i]) check(g.headers[i].constraints);
    return finish();
}

}  // namespace zebu
