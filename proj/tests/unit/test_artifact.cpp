// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mini.hpp"
#include "zebu/artifact.hpp"

using namespace zebu;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_same(const CompiledGrammar& a, const CompiledGrammar& b) {
    CHECK(a.protocolName == b.protocolName);
    CHECK(a.requestLinePattern == b.requestLinePattern);
    CHECK(a.statusLinePattern == b.statusLinePattern);
    CHECK(a.headers == b.headers);
    CHECK(a.headerTable == b.headerTable);
    CHECK(a.requestConstraints == b.requestConstraints);
    CHECK(a.responseConstraints == b.responseConstraints);
    CHECK(a.lazySet == b.lazySet);
    CHECK(a.source == b.source);
}

}  // namespace

TEST_CASE("artifact: round trip is exact") {
    auto g = compile_source(kMiniGrammar);
    g.source = kMiniGrammar;
    auto text = serialize_artifact(g);
    auto back = load_artifact(text);
    check_same(g, back);
    CHECK(serialize_artifact(back) == text);
    REQUIRE(back.annotated);
    CHECK(back.annotated->headers.size() == 2);
}

TEST_CASE("artifact: serialization is deterministic") {
    auto a = serialize_artifact(compile_source(kMiniGrammar));
    auto b = serialize_artifact(compile_source(kMiniGrammar));
    CHECK(a == b);
    CHECK(a.back() == '\n');
}

TEST_CASE("artifact: sip grammar round trip") {
    auto src = slurp(std::string(ZEBU_SOURCE_DIR) + "/grammars/sip-subset.zebu");
    REQUIRE_FALSE(src.empty());
    auto g = compile_source(src, "sip");
    auto back = load_artifact(serialize_artifact(g));
    check_same(g, back);
    auto raw = slurp(std::string(ZEBU_SOURCE_DIR) + "/corpus/sip/invite1.msg");
    CHECK(validate(back, raw).accept);
}

TEST_CASE("artifact: malformed documents") {
    CHECK_THROWS_AS(load_artifact("not json"), ArtifactError);
    CHECK_THROWS_AS(load_artifact("{}"), ArtifactError);
    auto text = serialize_artifact(compile_source(kMiniGrammar));
    auto pos = text.find("\"formatVersion\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 18, "\"formatVersion\": 99");
    CHECK_THROWS_AS(load_artifact(text), ArtifactError);
}
