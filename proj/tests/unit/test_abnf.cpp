// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "zebu/abnf.hpp"

using namespace zebu;

namespace {

const Element& body(const Grammar& g, std::string_view name) {
    const Rule* r = g.find(name);
    REQUIRE(r != nullptr);
    return r->body;
}

}  // namespace

TEST_CASE("abnf: rule with alternation and sequence") {
    auto g = parse_abnf("greeting = \"hi\" SP name / \"bye\"\nname = 1*ALPHA\n");
    REQUIRE(g.rules().size() == 2);
    auto* alt = body(g, "greeting").as<Alternation>();
    REQUIRE(alt);
    REQUIRE(alt->branches.size() == 2);
    auto* seq = alt->branches[0].as<Sequence>();
    REQUIRE(seq);
    CHECK(seq->items.size() == 3);
    CHECK(seq->items[0].as<LiteralCI>()->text == "hi");
    CHECK(seq->items[1].as<RuleRef>()->name == "SP");
}

TEST_CASE("abnf: repetition forms normalize") {
    auto g = parse_abnf("a = *x\nb = 1*x\nc = 3x\nd = 2*5x\ne = [x]\nf = *4x\nx = \"x\"\n");
    auto rep = [&](std::string_view n) {
        auto* r = body(g, n).as<Repetition>();
        REQUIRE(r);
        return std::pair{r->min, r->max};
    };
    CHECK(rep("a") == std::pair{0u, kUnbounded});
    CHECK(rep("b") == std::pair{1u, kUnbounded});
    CHECK(rep("c") == std::pair{3u, 3u});
    CHECK(rep("d") == std::pair{2u, 5u});
    CHECK(rep("e") == std::pair{0u, 1u});
    CHECK(rep("f") == std::pair{0u, 4u});
}

TEST_CASE("abnf: numeric values") {
    auto g = parse_abnf("r = %x41-5A\nc = %d13.10\nh = %x7e\n");
    auto* range = body(g, "r").as<CharRange>();
    REQUIRE(range);
    CHECK(range->lo == 'A');
    CHECK(range->hi == 'Z');
    CHECK(body(g, "c").as<CharCodes>()->bytes == "\r\n");
    CHECK(body(g, "h").as<CharCodes>()->bytes == "~");
}

TEST_CASE("abnf: case-sensitive and case-insensitive strings") {
    auto g = parse_abnf("s = %s\"Ab\"\ni = %i\"Ab\"\np = \"Ab\"\n");
    CHECK(body(g, "s").as<CharCodes>()->bytes == "Ab");
    CHECK(body(g, "i").as<LiteralCI>()->text == "Ab");
    CHECK(body(g, "p").as<LiteralCI>()->text == "Ab");
}

TEST_CASE("abnf: comments and continuation lines") {
    auto g = parse_abnf("; header comment\n"
                        "list = item ; trailing\n"
                        "       *( \",\" item )\n"
                        "item = 1*DIGIT\n");
    REQUIRE(g.rules().size() == 2);
    auto* seq = body(g, "list").as<Sequence>();
    REQUIRE(seq);
    CHECK(seq->items.size() == 2);
}

TEST_CASE("abnf: incremental alternatives append branches") {
    auto g = parse_abnf("m = \"A\"\nm =/ \"B\" / \"C\"\n");
    auto* alt = body(g, "m").as<Alternation>();
    REQUIRE(alt);
    CHECK(alt->branches.size() == 3);
    CHECK_THROWS_AS(parse_abnf("m =/ \"B\"\n"), SyntaxError);
}

TEST_CASE("abnf: lookup is case-insensitive and keeps duplicates") {
    auto g = parse_abnf("Token = \"a\"\ntoken = \"b\"\n");
    CHECK(g.rules().size() == 2);
    REQUIRE(g.find("TOKEN"));
    CHECK(g.find("TOKEN")->body.as<LiteralCI>()->text == "a");
}

TEST_CASE("abnf: syntax errors carry positions") {
    CHECK_THROWS_AS(parse_abnf("a \"x\"\n"), SyntaxError);
    CHECK_THROWS_AS(parse_abnf("a = \"x\n"), SyntaxError);
    CHECK_THROWS_AS(parse_abnf("a = %x5A-41\n"), SyntaxError);
    CHECK_THROWS_AS(parse_abnf("a = %b0101\n"), SyntaxError);
    CHECK_THROWS_AS(parse_abnf("a = <prose>\n"), SyntaxError);
    CHECK_THROWS_AS(parse_abnf("a = ( \"x\"\n"), SyntaxError);
    try {
        parse_abnf("a = \"x\"\nb = )\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.span().line == 2);
        CHECK(e.span().column > 0);
    }
}

TEST_CASE("abnf: core rules resolve") {
    Grammar empty;
    for (const char* n : {"ALPHA", "BIT", "CHAR", "CR", "CRLF", "CTL", "DIGIT", "DQUOTE", "HEXDIG", "HTAB", "LF",
                          "LWSP", "OCTET", "SP", "VCHAR", "WSP"})
        CHECK_MESSAGE(resolve_rule(empty, n) != nullptr, n);
    CHECK(resolve_rule(empty, "digit") != nullptr);
    CHECK(resolve_rule(empty, "NOPE") == nullptr);

    auto g = parse_abnf("DIGIT = \"0\"\n");
    CHECK(resolve_rule(g, "DIGIT") == g.find("DIGIT"));
}

TEST_CASE("abnf: to_abnf round trip") {
    const char* src = "msg = 1*( tok / %x30-39 ) [ \";\" ] 2*3\"ab\" %s\"Q\" %d13.10\n"
                      "tok = ALPHA *( ALPHA / DIGIT / \"-\" )\n";
    auto g = parse_abnf(src);
    auto again = parse_abnf(to_abnf(g));
    CHECK(again == g);
    CHECK(parse_abnf(to_abnf(again)) == again);
}

TEST_CASE("abnf: fold_case and iequals") {
    CHECK(fold_case("Content-Length") == "content-length");
    CHECK(iequals("CSeq", "cseq"));
    CHECK_FALSE(iequals("CSeq", "CSeq "));
}
