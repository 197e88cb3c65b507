// SPDX-License-Identifier: Apache-2.0
#include "zebu/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace zebu {

namespace {

constexpr int kMaxDepth = 256;

const Element* deref(const Element& e, const Grammar& g) {
    if (auto* ref = e.as<RuleRef>()) {
        const Rule* r = resolve_rule(g, ref->name);
        return r ? &r->body : nullptr;
    }
    return &e;
}

void add_case_variants(ByteSet& set, unsigned char ch) {
    set.set(ch);
    set.set(static_cast<unsigned char>(std::tolower(ch)));
    set.set(static_cast<unsigned char>(std::toupper(ch)));
}

void collect_all(const Element& e, const Grammar& g, ByteSet& out, int depth) {
    if (depth > kMaxDepth) return;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LiteralCI>) {
                for (unsigned char ch : n.text) add_case_variants(out, ch);
            } else if constexpr (std::is_same_v<T, CharCodes>) {
                for (unsigned char ch : n.bytes) out.set(ch);
            } else if constexpr (std::is_same_v<T, CharRange>) {
                for (unsigned v = n.lo; v <= n.hi; ++v) out.set(v);
            } else if constexpr (std::is_same_v<T, RuleRef>) {
                if (const Element* body = deref(e, g)) collect_all(*body, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Sequence>) {
                for (const auto& i : n.items) collect_all(i, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Alternation>) {
                for (const auto& b : n.branches) collect_all(b, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Repetition>) {
                if (n.max > 0) collect_all(*n.inner, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Named>) {
                collect_all(*n.inner, g, out, depth + 1);
            }
        },
        e.node);
}

std::size_t min_len(const Element& e, const Grammar& g, int depth) {
    if (depth > kMaxDepth) return 0;
    return std::visit(
        [&](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LiteralCI>) {
                return n.text.size();
            } else if constexpr (std::is_same_v<T, CharCodes>) {
                return n.bytes.size();
            } else if constexpr (std::is_same_v<T, CharRange>) {
                return 1;
            } else if constexpr (std::is_same_v<T, RuleRef>) {
                const Element* body = deref(e, g);
                return body ? min_len(*body, g, depth + 1) : 0;
            } else if constexpr (std::is_same_v<T, Sequence>) {
                std::size_t total = 0;
                for (const auto& i : n.items) total += min_len(i, g, depth + 1);
                return total;
            } else if constexpr (std::is_same_v<T, Alternation>) {
                std::size_t best = std::numeric_limits<std::size_t>::max();
                for (const auto& b : n.branches) best = std::min(best, min_len(b, g, depth + 1));
                return best;
            } else if constexpr (std::is_same_v<T, Repetition>) {
                return n.min == 0 ? 0 : n.min * min_len(*n.inner, g, depth + 1);
            } else {
                return min_len(*n.inner, g, depth + 1);
            }
        },
        e.node);
}

void collect_first(const Element& e, const Grammar& g, ByteSet& out, int depth) {
    if (depth > kMaxDepth) return;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LiteralCI>) {
                add_case_variants(out, static_cast<unsigned char>(n.text.front()));
            } else if constexpr (std::is_same_v<T, CharCodes>) {
                out.set(static_cast<unsigned char>(n.bytes.front()));
            } else if constexpr (std::is_same_v<T, CharRange>) {
                for (unsigned v = n.lo; v <= n.hi; ++v) out.set(v);
            } else if constexpr (std::is_same_v<T, RuleRef>) {
                if (const Element* body = deref(e, g)) collect_first(*body, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Sequence>) {
                for (const auto& i : n.items) {
                    collect_first(i, g, out, depth + 1);
                    if (min_len(i, g, depth + 1) > 0) break;
                }
            } else if constexpr (std::is_same_v<T, Alternation>) {
                for (const auto& b : n.branches) collect_first(b, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Repetition>) {
                if (n.max > 0) collect_first(*n.inner, g, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Named>) {
                collect_first(*n.inner, g, out, depth + 1);
            }
        },
        e.node);
}

using Language = std::optional<std::vector<std::string>>;

Language finite(const Element& e, const Grammar& g, std::size_t limit, int depth) {
    if (depth > kMaxDepth) return std::nullopt;
    auto dedupe = [&](std::vector<std::string> v) -> Language {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        if (v.size() > limit) return std::nullopt;
        return v;
    };
    return std::visit(
        [&](const auto& n) -> Language {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LiteralCI>) {
                return std::vector<std::string>{n.text};
            } else if constexpr (std::is_same_v<T, CharCodes>) {
                return std::vector<std::string>{n.bytes};
            } else if constexpr (std::is_same_v<T, CharRange>) {
                if (static_cast<std::size_t>(n.hi - n.lo + 1) > limit) return std::nullopt;
                std::vector<std::string> out;
                for (unsigned v = n.lo; v <= n.hi; ++v) out.emplace_back(1, static_cast<char>(v));
                return out;
            } else if constexpr (std::is_same_v<T, RuleRef>) {
                const Element* body = deref(e, g);
                if (!body) return std::nullopt;
                return finite(*body, g, limit, depth + 1);
            } else if constexpr (std::is_same_v<T, Sequence>) {
                std::vector<std::string> acc{""};
                for (const auto& i : n.items) {
                    auto part = finite(i, g, limit, depth + 1);
                    if (!part) return std::nullopt;
                    if (acc.size() * part->size() > limit) return std::nullopt;
                    std::vector<std::string> next;
                    for (const auto& a : acc)
                        for (const auto& p : *part) next.push_back(a + p);
                    acc = std::move(next);
                }
                return dedupe(std::move(acc));
            } else if constexpr (std::is_same_v<T, Alternation>) {
                std::vector<std::string> acc;
                for (const auto& b : n.branches) {
                    auto part = finite(b, g, limit, depth + 1);
                    if (!part) return std::nullopt;
                    acc.insert(acc.end(), part->begin(), part->end());
                    if (acc.size() > limit * 4) return std::nullopt;
                }
                return dedupe(std::move(acc));
            } else if constexpr (std::is_same_v<T, Repetition>) {
                if (n.max == kUnbounded) {
                    auto inner = finite(*n.inner, g, limit, depth + 1);
                    // Only the empty string repeated stays finite.
                    if (inner && inner->size() == 1 && inner->front().empty()) return inner;
                    return std::nullopt;
                }
                auto inner = finite(*n.inner, g, limit, depth + 1);
                if (!inner) return std::nullopt;
                std::vector<std::string> result;
                std::vector<std::string> level{""};
                for (std::uint32_t count = 0; count <= n.max; ++count) {
                    if (count >= n.min) result.insert(result.end(), level.begin(), level.end());
                    if (count == n.max) break;
                    if (level.size() * inner->size() > limit) return std::nullopt;
                    std::vector<std::string> next;
                    for (const auto& a : level)
                        for (const auto& p : *inner) next.push_back(a + p);
                    level = std::move(next);
                    if (result.size() > limit) return std::nullopt;
                }
                return dedupe(std::move(result));
            } else {
                return finite(*n.inner, g, limit, depth + 1);
            }
        },
        e.node);
}

void collect_refs(const Element& e, std::vector<std::pair<std::string, SourceSpan>>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, RuleRef>) {
                out.emplace_back(n.name, e.span);
            } else if constexpr (std::is_same_v<T, Sequence>) {
                for (const auto& i : n.items) collect_refs(i, out);
            } else if constexpr (std::is_same_v<T, Alternation>) {
                for (const auto& b : n.branches) collect_refs(b, out);
            } else if constexpr (std::is_same_v<T, Repetition> || std::is_same_v<T, Named>) {
                collect_refs(*n.inner, out);
            }
        },
        e.node);
}

}  // namespace

ByteSet all_bytes(const Element& e, const Grammar& g) {
    ByteSet out;
    collect_all(e, g, out, 0);
    return out;
}

ByteSet first_bytes(const Element& e, const Grammar& g) {
    ByteSet out;
    collect_first(e, g, out, 0);
    return out;
}

std::size_t min_length(const Element& e, const Grammar& g) { return min_len(e, g, 0); }

bool nullable(const Element& e, const Grammar& g) { return min_len(e, g, 0) == 0; }

std::optional<std::vector<std::string>> finite_language(const Element& e, const Grammar& g, std::size_t limit) {
    return finite(e, g, limit, 0);
}

std::vector<std::pair<std::string, SourceSpan>> referenced_rules(const Element& e) {
    std::vector<std::pair<std::string, SourceSpan>> out;
    collect_refs(e, out);
    return out;
}

}  // namespace zebu
