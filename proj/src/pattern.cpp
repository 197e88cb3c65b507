// SPDX-License-Identifier: Apache-2.0
#include "zebu/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace zebu {

namespace {

constexpr int kMaxInlineDepth = 512;

unsigned char lower(unsigned char c) { return static_cast<unsigned char>(std::tolower(c)); }

std::string join_path(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) {
        if (!out.empty()) out += '.';
        out += p;
    }
    return out;
}

PatternNode byte_set(ByteSet set) { return PatternNode{PByteSet{set}}; }

class Inliner {
public:
    Inliner(const Grammar& g, Pattern& out) : g_(g), out_(out) {}

    /// `slot`: capture id that the next alternation reached should record its branch into.
    /// `capture`: false below raw/numeric/enum captures, whose nested names stay hidden.
    PatternNode compile(const Element& e, int depth, int slot, bool capture, bool repeated) {
        if (depth > kMaxInlineDepth) throw InliningDepthExceeded(e.as<RuleRef>() ? e.as<RuleRef>()->name : "?");
        return std::visit(
            [&](const auto& n) -> PatternNode {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LiteralCI>) {
                    if (n.text.size() == 1) {
                        ByteSet s;
                        unsigned char c = static_cast<unsigned char>(n.text[0]);
                        s.set(c);
                        s.set(lower(c));
                        s.set(static_cast<unsigned char>(std::toupper(c)));
                        return byte_set(s);
                    }
                    std::string text;
                    for (unsigned char c : n.text) text += static_cast<char>(lower(c));
                    return PatternNode{PLiteral{text}};
                } else if constexpr (std::is_same_v<T, CharCodes>) {
                    if (n.bytes.size() == 1) {
                        ByteSet s;
                        s.set(static_cast<unsigned char>(n.bytes[0]));
                        return byte_set(s);
                    }
                    return PatternNode{PBytes{n.bytes}};
                } else if constexpr (std::is_same_v<T, CharRange>) {
                    ByteSet s;
                    for (unsigned v = n.lo; v <= n.hi; ++v) s.set(v);
                    return byte_set(s);
                } else if constexpr (std::is_same_v<T, RuleRef>) {
                    const Rule* r = resolve_rule(g_, n.name);
                    if (!r) throw std::logic_error("unresolved rule '" + n.name + "' reached the pattern compiler");
                    if (depth + 1 > kMaxInlineDepth) throw InliningDepthExceeded(n.name);
                    return compile(r->body, depth + 1, slot, capture, repeated);
                } else if constexpr (std::is_same_v<T, Sequence>) {
                    if (n.items.size() == 1) return compile(n.items[0], depth + 1, slot, capture, repeated);
                    PSequence seq;
                    for (const auto& item : n.items) {
                        PatternNode c = compile(item, depth + 1, -1, capture, repeated);
                        if (auto* inner = std::get_if<PSequence>(&c.node)) {
                            for (auto& x : inner->items) seq.items.push_back(std::move(x));
                        } else {
                            seq.items.push_back(std::move(c));
                        }
                    }
                    return PatternNode{std::move(seq)};
                } else if constexpr (std::is_same_v<T, Alternation>) {
                    PAlternation alt;
                    alt.slot = slot;
                    for (const auto& b : n.branches) alt.branches.push_back(compile(b, depth + 1, -1, capture, repeated));
                    if (slot < 0) {
                        bool allSets = std::all_of(alt.branches.begin(), alt.branches.end(),
                                                   [](const PatternNode& b) { return b.as<PByteSet>() != nullptr; });
                        if (allSets) {
                            ByteSet s;
                            for (const auto& b : alt.branches) s |= b.as<PByteSet>()->set;
                            return byte_set(s);
                        }
                    }
                    if (alt.branches.size() == 1 && slot < 0) return std::move(alt.branches[0]);
                    return PatternNode{std::move(alt)};
                } else if constexpr (std::is_same_v<T, Repetition>) {
                    PatternNode inner = compile(*n.inner, depth + 1, -1, capture, repeated || n.max > 1);
                    if (n.min == 1 && n.max == 1) return inner;
                    return PatternNode{PRepeat{n.min, n.max, Box<PatternNode>(std::move(inner))}};
                } else {
                    return named(n, depth, capture, repeated);
                }
            },
            e.node);
    }

    std::vector<int> parents{-1};

private:
    PatternNode named(const Named& n, int depth, bool capture, bool repeated) {
        if (!capture) return compile(*n.inner, depth + 1, -1, false, repeated);

        std::optional<Shape> defShape;
        std::string rule;
        if (auto* ref = n.inner->as<RuleRef>()) {
            rule = ref->name;
            if (const Rule* r = resolve_rule(g_, ref->name)) defShape = r->shape;
        }
        Shape shape = n.shape ? *n.shape : defShape.value_or(Shape::RawSlice);

        const int parent = parents.back();
        int id = -1;
        for (std::size_t i = 0; i < out_.captures.size(); ++i)
            if (out_.captures[i].parent == parent && out_.captures[i].name == n.name) id = static_cast<int>(i);
        if (id < 0) {
            CaptureInfo info;
            info.name = n.name;
            if (parent >= 0) info.path = out_.captures[parent].path;
            info.path.push_back(n.name);
            info.shape = shape;
            info.lazy = n.lazy;
            info.parent = parent;
            info.rule = rule;
            id = static_cast<int>(out_.captures.size());
            out_.captures.push_back(std::move(info));
            if (parent >= 0) out_.captures[parent].children.push_back(id);
            out_.captureIndex[join_path(out_.captures[id].path)] = id;
        }
        out_.captures[id].repeated = out_.captures[id].repeated || repeated;

        const bool nested = shape == Shape::Struct || shape == Shape::Union;
        const int slot = (shape == Shape::Enum || shape == Shape::Union) ? id : -1;
        parents.push_back(id);
        PatternNode inner = compile(*n.inner, depth + 1, slot, nested, false);
        parents.pop_back();

        PCapture cap{id, n.lazy, {}, 0, -1, Box<PatternNode>(PatternNode{})};
        if (n.lazy) {
            cap.skipSet = all_bytes(*n.inner, g_);
            cap.skipMin = min_length(*n.inner, g_);
            cap.lazyRoot = static_cast<int>(out_.lazyRoots.size());
            out_.lazyRoots.push_back(inner);
        }
        *cap.inner = std::move(inner);
        return PatternNode{std::move(cap)};
    }

    const Grammar& g_;
    Pattern& out_;
};

// Non-owning continuation: avoids a std::function allocation per matcher step.
struct Cont {
    void* self;
    bool (*fn)(void*, std::size_t);
    bool operator()(std::size_t p) const { return fn(self, p); }
};

template <typename F>
Cont cont(F& f) {
    return Cont{&f, [](void* s, std::size_t p) { return (*static_cast<F*>(s))(p); }};
}

class Matcher {
public:
    Matcher(std::string_view subject, MatchMode mode, std::size_t budget, std::size_t captures)
        : caps(captures), s_(subject), mode_(mode), budget_(budget) {}

    bool run(const PatternNode& root) {
        auto done = [&](std::size_t p) { return p == s_.size(); };
        return m(root, 0, cont(done));
    }

    std::vector<CaptureSpan> caps;

private:
    bool m(const PatternNode& n, std::size_t pos, Cont k) {
        if (++steps_ > budget_) throw MatchBudgetExceeded();
        switch (n.node.index()) {
            case 0: {
                const auto& lit = std::get<PLiteral>(n.node).lower;
                if (pos + lit.size() > s_.size()) return false;
                for (std::size_t i = 0; i < lit.size(); ++i)
                    if (lower(static_cast<unsigned char>(s_[pos + i])) != static_cast<unsigned char>(lit[i]))
                        return false;
                return k(pos + lit.size());
            }
            case 1: {
                const auto& bytes = std::get<PBytes>(n.node).bytes;
                if (pos + bytes.size() > s_.size() || s_.compare(pos, bytes.size(), bytes) != 0) return false;
                return k(pos + bytes.size());
            }
            case 2:
                if (pos < s_.size() && std::get<PByteSet>(n.node).set.test(static_cast<unsigned char>(s_[pos])))
                    return k(pos + 1);
                return false;
            case 3: return seq(std::get<PSequence>(n.node).items, 0, pos, k);
            case 4: {
                const auto& alt = std::get<PAlternation>(n.node);
                for (std::size_t i = 0; i < alt.branches.size(); ++i) {
                    int saved = alt.slot >= 0 ? caps[alt.slot].branch : -1;
                    if (alt.slot >= 0) caps[alt.slot].branch = static_cast<int>(i);
                    if (m(alt.branches[i], pos, k)) return true;
                    if (alt.slot >= 0) caps[alt.slot].branch = saved;
                }
                return false;
            }
            case 5: {
                const auto& r = std::get<PRepeat>(n.node);
                if (auto* set = r.inner->as<PByteSet>()) return run_of(set->set, r.min, r.max, pos, k);
                return rep(r, pos, 0, k);
            }
            default: return capture(std::get<PCapture>(n.node), pos, k);
        }
    }

    bool seq(const std::vector<PatternNode>& items, std::size_t i, std::size_t pos, Cont k) {
        if (i == items.size()) return k(pos);
        auto next = [&](std::size_t p) { return seq(items, i + 1, p, k); };
        return m(items[i], pos, cont(next));
    }

    bool rep(const PRepeat& r, std::size_t pos, std::uint32_t count, Cont k) {
        if (count < r.max) {
            auto next = [&](std::size_t p) {
                // An empty iteration can be repeated up to min for free; beyond that it loops.
                if (p == pos) return count < r.min ? k(p) : false;
                return rep(r, p, count + 1, k);
            };
            if (m(*r.inner, pos, cont(next))) return true;
        }
        return count >= r.min && k(pos);
    }

    bool run_of(const ByteSet& set, std::uint32_t min, std::uint32_t max, std::size_t pos, Cont k) {
        std::size_t n = 0;
        while (pos + n < s_.size() && n < max && set.test(static_cast<unsigned char>(s_[pos + n]))) ++n;
        for (std::size_t len = n + 1; len-- > min;) {
            if (++steps_ > budget_) throw MatchBudgetExceeded();
            if (k(pos + len)) return true;
        }
        return false;
    }

    bool capture(const PCapture& c, std::size_t pos, Cont k) {
        if (c.lazy && mode_ == MatchMode::Deferred) {
            std::size_t n = 0;
            while (pos + n < s_.size() && c.skipSet.test(static_cast<unsigned char>(s_[pos + n]))) ++n;
            for (std::size_t len = n + 1; len-- > c.skipMin;) {
                if (++steps_ > budget_) throw MatchBudgetExceeded();
                CaptureSpan saved = caps[c.id];
                caps[c.id] = CaptureSpan{true, pos, pos + len, -1, c.lazyRoot};
                if (k(pos + len)) return true;
                caps[c.id] = saved;
            }
            return false;
        }
        auto after = [&](std::size_t end) {
            CaptureSpan saved = caps[c.id];
            caps[c.id].set = true;
            caps[c.id].start = pos;
            caps[c.id].end = end;
            caps[c.id].lazyRoot = c.lazyRoot;
            if (k(end)) return true;
            caps[c.id] = saved;
            return false;
        };
        return m(*c.inner, pos, cont(after));
    }

    std::string_view s_;
    MatchMode mode_;
    std::size_t budget_;
    std::size_t steps_ = 0;
};

// Reference matcher: the set of end positions reachable from (element, start), memoized.
class Oracle {
public:
    Oracle(const Grammar& g, std::string_view s, std::size_t budget) : g_(g), s_(s), budget_(budget) {}

    using Ends = std::vector<std::size_t>;

    const Ends& ends(const Element& e, std::size_t pos) {
        Key key{&e, pos};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (++steps_ > budget_) throw RecursionBudgetExceeded();
        Ends out = compute(e, pos);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return memo_.emplace(key, std::move(out)).first->second;
    }

private:
    Ends compute(const Element& e, std::size_t pos) {
        if (auto* lit = e.as<LiteralCI>()) {
            if (pos + lit->text.size() > s_.size()) return {};
            for (std::size_t i = 0; i < lit->text.size(); ++i)
                if (std::tolower(static_cast<unsigned char>(s_[pos + i])) !=
                    std::tolower(static_cast<unsigned char>(lit->text[i])))
                    return {};
            return {pos + lit->text.size()};
        }
        if (auto* codes = e.as<CharCodes>()) {
            if (s_.substr(pos).substr(0, codes->bytes.size()) != codes->bytes) return {};
            return {pos + codes->bytes.size()};
        }
        if (auto* range = e.as<CharRange>()) {
            if (pos >= s_.size()) return {};
            unsigned char c = static_cast<unsigned char>(s_[pos]);
            if (c < range->lo || c > range->hi) return {};
            return {pos + 1};
        }
        if (auto* ref = e.as<RuleRef>()) {
            const Rule* r = resolve_rule(g_, ref->name);
            if (!r) return {};
            return ends(r->body, pos);
        }
        if (auto* named = e.as<Named>()) return ends(*named->inner, pos);
        if (auto* seq = e.as<Sequence>()) {
            Ends cur{pos};
            for (const auto& item : seq->items) {
                Ends next;
                for (std::size_t p : cur) {
                    const Ends& more = ends(item, p);
                    next.insert(next.end(), more.begin(), more.end());
                }
                std::sort(next.begin(), next.end());
                next.erase(std::unique(next.begin(), next.end()), next.end());
                cur = std::move(next);
                if (cur.empty()) break;
            }
            return cur;
        }
        if (auto* alt = e.as<Alternation>()) {
            Ends out;
            for (const auto& b : alt->branches) {
                const Ends& more = ends(b, pos);
                out.insert(out.end(), more.begin(), more.end());
            }
            return out;
        }
        const auto& rep = std::get<Repetition>(e.node);
        auto step = [&](const Ends& from) {
            Ends next;
            for (std::size_t p : from) {
                const Ends& more = ends(*rep.inner, p);
                next.insert(next.end(), more.begin(), more.end());
            }
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            return next;
        };
        Ends cur{pos};
        for (std::uint32_t c = 0; c < rep.min; ++c) {
            cur = step(cur);
            if (cur.empty()) return {};
        }
        Ends result = cur;
        Ends frontier = cur;
        for (std::uint32_t c = rep.min; c < rep.max && !frontier.empty(); ++c) {
            Ends next = step(frontier);
            Ends fresh;
            std::set_difference(next.begin(), next.end(), result.begin(), result.end(), std::back_inserter(fresh));
            Ends merged;
            std::merge(result.begin(), result.end(), fresh.begin(), fresh.end(), std::back_inserter(merged));
            result = std::move(merged);
            frontier = std::move(fresh);
        }
        return result;
    }

    struct Key {
        const Element* e;
        std::size_t pos;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            return std::hash<const void*>()(k.e) * 31 + std::hash<std::size_t>()(k.pos);
        }
    };

    const Grammar& g_;
    std::string_view s_;
    std::size_t budget_;
    std::size_t steps_ = 0;
    std::unordered_map<Key, Ends, KeyHash> memo_;
};

MatchResult finish(Matcher& m, bool ok) {
    MatchResult r;
    r.matched = ok;
    if (ok) r.captures = std::move(m.caps);
    return r;
}

}  // namespace

std::vector<int> Pattern::top_level() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < captures.size(); ++i)
        if (captures[i].parent < 0) out.push_back(static_cast<int>(i));
    return out;
}

Pattern compile_pattern(const Element& body, const Grammar& g) {
    Pattern p;
    Inliner inliner(g, p);
    p.root = inliner.compile(body, 0, -1, true, false);
    return p;
}

Pattern compile_entry(const AnnotatedGrammar& g, const Element& body, std::string_view entry) {
    Pattern p = compile_pattern(body, g.baseGrammar);
    for (const auto& [key, range] : g.rangeConstraints) {
        if (key.size() <= entry.size() || key[entry.size()] != '.') continue;
        if (!iequals(std::string_view(key).substr(0, entry.size()), entry)) continue;
        p.deferredRangeChecks[key.substr(entry.size() + 1)] = range;
    }
    return p;
}

MatchResult match_full(const Pattern& p, std::string_view subject, MatchMode mode, std::size_t budget) {
    Matcher m(subject, mode, budget, p.captures.size());
    bool ok = m.run(p.root);
    return finish(m, ok);
}

MatchResult match_lazy(const Pattern& p, int lazyRoot, std::string_view subject, std::size_t budget) {
    Matcher m(subject, MatchMode::Strict, budget, p.captures.size());
    bool ok = m.run(p.lazyRoots.at(static_cast<std::size_t>(lazyRoot)));
    return finish(m, ok);
}

bool reference_match(const Element& entry, const Grammar& g, std::string_view subject, std::size_t budget) {
    Oracle oracle(g, subject, budget);
    const auto& ends = oracle.ends(entry, 0);
    return std::binary_search(ends.begin(), ends.end(), subject.size());
}

}  // namespace zebu
