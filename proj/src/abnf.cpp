// SPDX-License-Identifier: Apache-2.0
#include "zebu/abnf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "abnf_reader.hpp"

namespace zebu {

std::string to_string(const SourceSpan& span) {
    return std::to_string(span.line) + ":" + std::to_string(span.column);
}

SyntaxError::SyntaxError(SourceSpan span, const std::string& message)
    : std::runtime_error(to_string(span) + ": " + message), span_(span) {}

std::string_view to_string(Shape shape) {
    switch (shape) {
        case Shape::RawSlice: return "raw";
        case Shape::Uint16: return "uint16";
        case Shape::Uint32: return "uint32";
        case Shape::Struct: return "struct";
        case Shape::Union: return "union";
        case Shape::Enum: return "enum";
    }
    return "raw";
}

std::optional<Shape> shape_from_keyword(std::string_view keyword) {
    if (keyword == "uint16") return Shape::Uint16;
    if (keyword == "uint32") return Shape::Uint32;
    if (keyword == "struct") return Shape::Struct;
    if (keyword == "union") return Shape::Union;
    if (keyword == "enum") return Shape::Enum;
    return std::nullopt;
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

void Grammar::add(Rule rule) {
    auto key = fold_case(rule.name);
    index_.try_emplace(key, rules_.size());
    rules_.push_back(std::move(rule));
}

const Rule* Grammar::find(std::string_view name) const {
    auto it = index_.find(fold_case(name));
    return it == index_.end() ? nullptr : &rules_[it->second];
}

Rule* Grammar::find_mutable(std::string_view name) {
    auto it = index_.find(fold_case(name));
    return it == index_.end() ? nullptr : &rules_[it->second];
}

namespace detail {

char Cursor::get() {
    if (at_end()) return '\0';
    char ch = text_[pos_++];
    if (ch == '\n') {
        ++line_;
        column_ = 0;
    } else if (ch == '\r') {
        if (peek() != '\n') {
            ++line_;
            column_ = 0;
        }
    } else {
        ++column_;
    }
    return ch;
}

void Cursor::skip_blanks() {
    while (peek() == ' ' || peek() == '\t') get();
}

void Cursor::skip_comment() {
    if (peek() != ';') return;
    while (!at_end() && !at_newline()) get();
}

void Cursor::skip_newline() {
    if (peek() == '\r') get();
    if (peek() == '\n') get();
}

bool Cursor::skip_rule_space(int ruleColumn) {
    bool skipped = false;
    for (;;) {
        auto before = pos_;
        skip_blanks();
        skip_comment();
        if (pos_ != before) skipped = true;
        if (!at_newline()) return skipped;

        // Find the first content character on following lines without consuming.
        std::size_t p = pos_;
        int col = 0;
        bool found = false;
        while (p < text_.size()) {
            char ch = text_[p];
            if (ch == '\r' || ch == '\n') {
                col = 0;
                ++p;
                continue;
            }
            if (ch == ' ' || ch == '\t') {
                ++col;
                ++p;
                continue;
            }
            if (ch == ';') {
                while (p < text_.size() && text_[p] != '\n' && text_[p] != '\r') ++p;
                continue;
            }
            found = true;
            break;
        }
        if (!found || col <= ruleColumn) return skipped;
        skip_newline();
        skipped = true;
    }
}

void Cursor::skip_all_space(bool comments) {
    for (;;) {
        auto before = pos_;
        skip_blanks();
        if (comments) skip_comment();
        if (at_newline()) skip_newline();
        if (pos_ == before) return;
    }
}

bool Cursor::consume(char c) {
    if (peek() != c) return false;
    get();
    return true;
}

bool Cursor::consume_word(std::string_view word) {
    if (text_.substr(pos_, word.size()) != word) return false;
    if (is_name_char(peek(word.size()))) return false;
    for (std::size_t i = 0; i < word.size(); ++i) get();
    return true;
}

std::string Cursor::read_identifier() {
    std::string out;
    if (!is_name_start(peek())) return out;
    while (is_name_char(peek())) out.push_back(get());
    return out;
}

void Cursor::fail(const std::string& message) const { fail_at(span(), message); }

void Cursor::fail_at(SourceSpan span, const std::string& message) { throw SyntaxError(span, message); }

bool is_name_start(char c) noexcept { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_name_char(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_';
}

bool ElementParser::starts_element(char c) const noexcept {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '*' || c == '(' || c == '[' ||
           c == '"' || c == '%' || c == '<';
}

Element ElementParser::parse_alternation() {
    auto start = c_.span();
    std::vector<Element> branches;
    branches.push_back(parse_concatenation());
    for (;;) {
        c_.skip_rule_space(ruleColumn_);
        if (c_.peek() != '/') break;
        c_.get();
        c_.skip_rule_space(ruleColumn_);
        branches.push_back(parse_concatenation());
    }
    if (branches.size() == 1) return std::move(branches.front());
    return Element{Alternation{std::move(branches)}, start};
}

Element ElementParser::parse_concatenation() {
    auto start = c_.span();
    std::vector<Element> items;
    items.push_back(parse_repetition());
    for (;;) {
        c_.skip_rule_space(ruleColumn_);
        if (!starts_element(c_.peek())) break;
        items.push_back(parse_repetition());
    }
    if (items.size() == 1) return std::move(items.front());
    return Element{Sequence{std::move(items)}, start};
}

namespace {

bool read_number(Cursor& c, std::uint64_t& out) {
    if (!std::isdigit(static_cast<unsigned char>(c.peek()))) return false;
    out = 0;
    while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
        out = out * 10 + static_cast<std::uint64_t>(c.get() - '0');
        if (out > kUnbounded - 1) c.fail("repetition count too large");
    }
    return true;
}

}  // namespace

Element ElementParser::parse_repetition() {
    auto start = c_.span();
    std::uint64_t lo = 0, hi = 0;
    bool haveLo = read_number(c_, lo);
    bool star = c_.consume('*');
    bool haveHi = star && read_number(c_, hi);

    Element inner = parse_element();
    Element result = std::move(inner);
    if (haveLo || star) {
        Repetition rep{0, kUnbounded, Box<Element>(Element{})};
        if (star) {
            rep.min = haveLo ? static_cast<std::uint32_t>(lo) : 0;
            rep.max = haveHi ? static_cast<std::uint32_t>(hi) : kUnbounded;
        } else {
            rep.min = rep.max = static_cast<std::uint32_t>(lo);
        }
        if (rep.max != kUnbounded && rep.min > rep.max)
            Cursor::fail_at(start, "bad repetition: minimum " + std::to_string(rep.min) + " exceeds maximum " +
                                       std::to_string(rep.max));
        rep.inner = Box<Element>(std::move(result));
        result = Element{std::move(rep), start};
    }
    if (annotations_ && c_.peek() == ':') return parse_annotation(std::move(result));
    return result;
}

Element ElementParser::parse_annotation(Element inner) {
    auto start = c_.span();
    c_.get();
    auto name = c_.read_identifier();
    if (name.empty()) c_.fail("expected subfield name after ':'");
    if (shape_from_keyword(name) || name == "lazy")
        Cursor::fail_at(start, "subfield name expected before type keyword '" + name + "'");
    Named named{name, std::nullopt, false, Box<Element>(std::move(inner))};
    while (c_.peek() == ':') {
        c_.get();
        auto mod = c_.read_identifier();
        if (mod == "lazy") {
            named.lazy = true;
        } else if (auto shape = shape_from_keyword(mod)) {
            if (named.shape) c_.fail("subfield '" + name + "' has more than one type");
            named.shape = shape;
        } else {
            c_.fail("unknown subfield modifier '" + mod + "'");
        }
    }
    return Element{std::move(named), start};
}

Element ElementParser::parse_element() {
    auto start = c_.span();
    char ch = c_.peek();
    if (is_name_start(ch)) {
        auto name = c_.read_identifier();
        return Element{RuleRef{std::move(name)}, start};
    }
    if (ch == '(' || ch == '[') {
        char close = ch == '(' ? ')' : ']';
        c_.get();
        c_.skip_rule_space(ruleColumn_);
        Element inner = parse_alternation();
        c_.skip_rule_space(ruleColumn_);
        if (!c_.consume(close)) c_.fail(std::string("expected '") + close + "'");
        if (ch == '(') return inner;
        return Element{Repetition{0, 1, Box<Element>(std::move(inner))}, start};
    }
    if (ch == '"') return parse_char_val(start, false);
    if (ch == '%') return parse_num_val(start);
    if (ch == '<')
        Cursor::fail_at(start, "prose rules are not supported (in rule '" + ruleName_ + "')");
    if (c_.at_end() || c_.at_newline()) c_.fail("unexpected end of rule '" + ruleName_ + "'");
    c_.fail(std::string("unexpected character '") + ch + "'");
}

Element ElementParser::parse_char_val(SourceSpan start, bool caseSensitive) {
    c_.get();  // opening quote
    std::string text;
    for (;;) {
        if (c_.at_end() || c_.at_newline()) Cursor::fail_at(start, "unterminated string");
        char ch = c_.get();
        if (ch == '"') break;
        text.push_back(ch);
    }
    if (text.empty()) Cursor::fail_at(start, "empty string literal");
    if (caseSensitive) return Element{CharCodes{std::move(text)}, start};
    return Element{LiteralCI{std::move(text)}, start};
}

Element ElementParser::parse_num_val(SourceSpan start) {
    c_.get();  // '%'
    char base = static_cast<char>(std::tolower(static_cast<unsigned char>(c_.get())));
    if ((base == 's' || base == 'i') && c_.peek() == '"') return parse_char_val(start, base == 's');
    if (base == 'b') Cursor::fail_at(start, "binary numeric terminals (%b) are not supported");
    if (base != 'x' && base != 'd') Cursor::fail_at(start, "expected 'x' or 'd' after '%'");

    auto digit_value = [&](char d) -> int {
        if (base == 'd') return std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : -1;
        return std::isxdigit(static_cast<unsigned char>(d))
                   ? (std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : std::tolower(d) - 'a' + 10)
                   : -1;
    };
    auto read_value = [&]() -> unsigned char {
        int radix = base == 'd' ? 10 : 16;
        if (digit_value(c_.peek()) < 0) c_.fail("expected numeric value");
        unsigned value = 0;
        while (digit_value(c_.peek()) >= 0) {
            value = value * static_cast<unsigned>(radix) + static_cast<unsigned>(digit_value(c_.get()));
            if (value > 255) Cursor::fail_at(start, "character code exceeds 255");
        }
        return static_cast<unsigned char>(value);
    };

    unsigned char first = read_value();
    if (c_.consume('-')) {
        unsigned char last = read_value();
        if (last < first) Cursor::fail_at(start, "empty character range");
        return Element{CharRange{first, last}, start};
    }
    std::string bytes(1, static_cast<char>(first));
    while (c_.peek() == '.') {
        c_.get();
        bytes.push_back(static_cast<char>(read_value()));
    }
    return Element{CharCodes{std::move(bytes)}, start};
}

}  // namespace detail

Grammar parse_abnf(std::string_view source) {
    detail::Cursor c(source);
    Grammar grammar;
    for (;;) {
        c.skip_all_space();
        if (c.at_end()) break;
        auto start = c.span();
        int column = c.column();
        auto name = c.read_identifier();
        if (name.empty()) c.fail("expected rule name");
        c.skip_blanks();
        if (!c.consume('=')) c.fail("missing '=' after rule name '" + name + "'");
        bool incremental = c.consume('/');
        c.skip_rule_space(column);
        detail::ElementParser parser(c, column, false, name);
        Element body = parser.parse_alternation();
        c.skip_rule_space(column);
        if (!c.at_end() && !c.at_newline()) c.fail(std::string("unexpected character '") + c.peek() + "'");

        if (incremental) {
            Rule* existing = grammar.find_mutable(name);
            if (!existing) detail::Cursor::fail_at(start, "incremental alternative for undefined rule '" + name + "'");
            Alternation merged;
            if (auto* alt = existing->body.as<Alternation>()) merged = *alt;
            else merged.branches.push_back(existing->body);
            if (auto* alt = body.as<Alternation>()) {
                for (auto& b : alt->branches) merged.branches.push_back(b);
            } else {
                merged.branches.push_back(std::move(body));
            }
            existing->body = Element{std::move(merged), existing->body.span};
            continue;
        }
        grammar.add(Rule{std::move(name), std::move(body), start, std::nullopt});
    }
    return grammar;
}

const Grammar& core_rules() {
    static const Grammar rules = parse_abnf(
        "ALPHA  = %x41-5A / %x61-7A\n"
        "BIT    = \"0\" / \"1\"\n"
        "CHAR   = %x01-7F\n"
        "CR     = %x0D\n"
        "CRLF   = CR LF\n"
        "CTL    = %x00-1F / %x7F\n"
        "DIGIT  = %x30-39\n"
        "DQUOTE = %x22\n"
        "HEXDIG = DIGIT / \"A\" / \"B\" / \"C\" / \"D\" / \"E\" / \"F\"\n"
        "HTAB   = %x09\n"
        "LF     = %x0A\n"
        "LWSP   = *(WSP / CRLF WSP)\n"
        "OCTET  = %x00-FF\n"
        "SP     = %x20\n"
        "VCHAR  = %x21-7E\n"
        "WSP    = SP / HTAB\n");
    return rules;
}

const Rule* resolve_rule(const Grammar& grammar, std::string_view name) {
    if (const Rule* rule = grammar.find(name)) return rule;
    return core_rules().find(name);
}

namespace {

std::string hex_byte(unsigned char b) {
    static const char* digits = "0123456789ABCDEF";
    return {digits[b >> 4], digits[b & 0xF]};
}

bool needs_group(const Element& e) {
    return e.is<Sequence>() || e.is<Alternation>() || e.is<Repetition>() || e.is<Named>();
}

void print(std::ostringstream& out, const Element& e);

void print_grouped(std::ostringstream& out, const Element& e) {
    if (needs_group(e)) {
        out << '(';
        print(out, e);
        out << ')';
    } else {
        print(out, e);
    }
}

void print(std::ostringstream& out, const Element& e) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LiteralCI>) {
                out << '"' << n.text << '"';
            } else if constexpr (std::is_same_v<T, CharCodes>) {
                out << "%x";
                for (std::size_t i = 0; i < n.bytes.size(); ++i) {
                    if (i) out << '.';
                    out << hex_byte(static_cast<unsigned char>(n.bytes[i]));
                }
            } else if constexpr (std::is_same_v<T, CharRange>) {
                out << "%x" << hex_byte(n.lo) << '-' << hex_byte(n.hi);
            } else if constexpr (std::is_same_v<T, RuleRef>) {
                out << n.name;
            } else if constexpr (std::is_same_v<T, Sequence>) {
                for (std::size_t i = 0; i < n.items.size(); ++i) {
                    if (i) out << ' ';
                    const auto& item = n.items[i];
                    if (item.template is<Sequence>() || item.template is<Alternation>()) print_grouped(out, item);
                    else print(out, item);
                }
            } else if constexpr (std::is_same_v<T, Alternation>) {
                for (std::size_t i = 0; i < n.branches.size(); ++i) {
                    if (i) out << " / ";
                    const auto& branch = n.branches[i];
                    if (branch.template is<Alternation>()) print_grouped(out, branch);
                    else print(out, branch);
                }
            } else if constexpr (std::is_same_v<T, Repetition>) {
                if (n.min == 0 && n.max == 1) {
                    out << '[';
                    print(out, *n.inner);
                    out << ']';
                    return;
                }
                if (n.min == n.max) {
                    out << n.min;
                } else {
                    if (n.min) out << n.min;
                    out << '*';
                    if (n.max != kUnbounded) out << n.max;
                }
                print_grouped(out, *n.inner);
            } else if constexpr (std::is_same_v<T, Named>) {
                print_grouped(out, *n.inner);
                out << ':' << n.name;
                if (n.shape) out << ':' << to_string(*n.shape);
                if (n.lazy) out << ":lazy";
            }
        },
        e.node);
}

}  // namespace

std::string to_abnf(const Element& element) {
    std::ostringstream out;
    print(out, element);
    return out.str();
}

std::string to_abnf(const Rule& rule) {
    std::string head = rule.name;
    if (rule.shape) head += ":" + std::string(to_string(*rule.shape));
    return head + " = " + to_abnf(rule.body);
}

std::string to_abnf(const Grammar& grammar) {
    std::string out;
    for (const auto& rule : grammar.rules()) out += to_abnf(rule) + "\n";
    return out;
}

}  // namespace zebu
