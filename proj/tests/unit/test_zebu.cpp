// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "mini.hpp"
#include "zebu/zebu.hpp"

using namespace zebu;

TEST_CASE("zebu: directives and entry points") {
    auto g = parse_zebu(kMiniGrammar);
    CHECK(g.protocolName == "mini");
    REQUIRE(g.requestLine);
    REQUIRE(g.statusLine);
    REQUIRE(g.headers.size() == 2);
    CHECK(g.find_header("seq") == &g.headers[0]);
    CHECK(g.find_header("Nope") == nullptr);
    CHECK(g.baseGrammar.find("Method") != nullptr);
    CHECK(g.requestBlock.size() == 1);
    CHECK(g.responseBlock.size() == 1);
}

TEST_CASE("zebu: default protocol name") {
    auto src = std::string(kMiniGrammar);
    src.erase(src.find("protocol mini"), 13);
    CHECK(parse_zebu(src, "fallback").protocolName == "fallback");
}

TEST_CASE("zebu: header flags and keys") {
    auto g = parse_zebu(kMiniGrammar);
    const auto& seq = g.headers[0];
    CHECK(seq.mandatoryIn == Mandatory::Request);
    CHECK_FALSE(seq.multiple);
    auto keys = header_keys(seq);
    REQUIRE(keys.size() == 2);
    CHECK(keys[0] == "Seq");
    CHECK(keys[1] == "s");
    CHECK(seq.localConstraints.size() == 1);

    const auto& tag = g.headers[1];
    CHECK(tag.multiple);
    CHECK(header_keys(tag) == std::vector<std::string>{"Tag"});

    CHECK(mandatory_in(Mandatory::Both, MessageKind::Response));
    CHECK_FALSE(mandatory_in(Mandatory::Request, MessageKind::Response));
}

TEST_CASE("zebu: subfield annotations") {
    auto g = parse_zebu(kMiniGrammar);
    const auto& subs = g.headers[0].subfields;
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].name == "number");
    CHECK(subs[0].shape == Shape::Uint32);
    CHECK(subs[1].name == "method");
    CHECK(subs[1].shape == Shape::Enum);
    CHECK(subs[1].attachedTo == "Method");

    auto scan = scan_subfields(g.requestLine->body, g.baseGrammar);
    CHECK(scan.issues.empty());
    REQUIRE(scan.roots.size() == 3);
    CHECK(scan.roots[1].name == "target");
    CHECK(scan.roots[1].lazy);
}

TEST_CASE("zebu: semicolon is a separator inside blocks and a comment outside") {
    auto g = parse_zebu("request { requestLine = \"A\" ; comment here\n }\n"
                        "response { statusLine = \"B\" }\n"
                        "header X = 1*DIGIT:n:uint32 { mandatory; multiple;; readonly }\n");
    REQUIRE(g.headers.size() == 1);
    CHECK(g.headers[0].mandatoryIn == Mandatory::Both);
    CHECK(g.headers[0].multiple);
    CHECK(g.headers[0].readOnly);
}

TEST_CASE("zebu: constraints are bound and ranges lifted") {
    auto g = resolve_constraint_refs(parse_zebu(kMiniGrammar));
    REQUIRE(g.rangeConstraints.count("Seq.number"));
    auto r = g.rangeConstraints.at("Seq.number");
    CHECK(r.contains(999));
    CHECK_FALSE(r.contains(1000));
    REQUIRE(g.rangeConstraints.count("statusLine.code"));
    CHECK(g.rangeConstraints.at("statusLine.code").contains(200));
    CHECK_FALSE(g.rangeConstraints.at("statusLine.code").contains(300));
    CHECK(g.headers[0].localConstraints[0].liftedToRange);

    const auto& cross = g.requestBlock[0];
    CHECK_FALSE(cross.liftedToRange);
    auto refs = field_refs(cross.expr);
    REQUIRE(refs.size() == 2);
    REQUIRE(refs[0]->binding);
    CHECK(refs[0]->binding->kind == EntryKind::Header);
    CHECK(refs[0]->binding->entry == "Seq");
    CHECK(refs[1]->binding->kind == EntryKind::RequestLine);
    CHECK(refs[1]->binding->shape == Shape::Enum);

    auto again = resolve_constraint_refs(g);
    CHECK(again.requestBlock == g.requestBlock);
}

TEST_CASE("zebu: unresolved field reference") {
    auto src = std::string(kMiniGrammar);
    src.replace(src.find("Seq.method =="), 10, "Seq.nothing");
    auto g = parse_zebu(src);
    CHECK_THROWS_AS(resolve_constraint_refs(g), UnresolvedFieldRef);
}

TEST_CASE("zebu: unknown annotations") {
    CHECK_THROWS_AS(parse_zebu("request { requestLine = \"A\" { bogus } }\n"), UnknownAnnotation);
    CHECK_THROWS_AS(parse_zebu("request { requestLine = \"A\" { multiple } }\n"), UnknownAnnotation);
    CHECK_THROWS_AS(parse_zebu("r = \"A\" { mandatory }\n"), UnknownAnnotation);
    CHECK_THROWS_AS(parse_zebu("r:widget = \"A\"\n"), UnknownAnnotation);
}

TEST_CASE("zebu: duplicate entry points") {
    CHECK_THROWS_AS(parse_zebu("request { requestLine = \"A\" }\nrequest { requestLine = \"B\" }\n"),
                    DuplicateEntryPoint);
    CHECK_THROWS_AS(parse_zebu("response { statusLine = \"A\" }\nresponse { statusLine = \"B\" }\n"),
                    DuplicateEntryPoint);
}

TEST_CASE("zebu: other syntax errors") {
    CHECK_THROWS_AS(parse_zebu("request { statusLine = \"A\" }\n"), SyntaxError);
    CHECK_THROWS_AS(parse_zebu("request { requestLine = \"A\" { mandatory Ghost } }\n"), SyntaxError);
    CHECK_THROWS_AS(parse_zebu("header X {Foo} = \"a\"\n"), SyntaxError);
    CHECK_THROWS_AS(parse_zebu("request { requestLine = \"A\" { 1 < } }\n"), SyntaxError);
}

TEST_CASE("zebu: constraint text renders back") {
    auto g = parse_zebu(kMiniGrammar);
    CHECK(g.requestBlock[0].text == "Seq.method == requestLine.method");
    CHECK(to_string(g.responseBlock[0].expr).find("statusLine.code") != std::string::npos);
}
