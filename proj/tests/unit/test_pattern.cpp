// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <functional>
#include <string>

#include "mini.hpp"
#include "zebu/pattern.hpp"

using namespace zebu;

namespace {

struct Fixture {
    AnnotatedGrammar g = resolve_constraint_refs(parse_zebu(kMiniGrammar));
    Pattern request = compile_entry(g, g.requestLine->body, "requestLine");
    Pattern seq = compile_entry(g, g.find_header("Seq")->body, "Seq");
};

std::string slice(std::string_view s, const CaptureSpan& c) { return std::string(s.substr(c.start, c.end - c.start)); }

}  // namespace

TEST_CASE("pattern: captures and paths") {
    Fixture f;
    REQUIRE(f.request.captureIndex.count("method"));
    REQUIRE(f.request.captureIndex.count("target"));
    REQUIRE(f.request.captureIndex.count("version"));
    CHECK(f.request.lazyRoots.size() == 1);
    CHECK(f.seq.deferredRangeChecks.empty() == false);
    CHECK(f.seq.captures[f.seq.captureIndex.at("number")].shape == Shape::Uint32);
}

TEST_CASE("pattern: strict match fills spans and branches") {
    Fixture f;
    std::string s = "PUT /a/b MINI/1";
    auto m = match_full(f.request, s);
    REQUIRE(m.matched);
    const auto& method = m.captures[f.request.captureIndex.at("method")];
    CHECK(slice(s, method) == "PUT");
    CHECK(method.branch == 1);
    CHECK(slice(s, m.captures[f.request.captureIndex.at("target")]) == "/a/b");
    CHECK(slice(s, m.captures[f.request.captureIndex.at("version")]) == "MINI/1");

    CHECK(match_full(f.request, "get / mini/1").matched);
    CHECK_FALSE(match_full(f.request, "GET /a1 MINI/1").matched);
    CHECK_FALSE(match_full(f.request, "GET / MINI/1 ").matched);
}

TEST_CASE("pattern: deferred mode skips lazy content") {
    Fixture f;
    std::string s = "GET a/b MINI/1";
    CHECK_FALSE(match_full(f.request, s, MatchMode::Strict).matched);
    auto m = match_full(f.request, s, MatchMode::Deferred);
    REQUIRE(m.matched);
    const auto& target = m.captures[f.request.captureIndex.at("target")];
    CHECK(slice(s, target) == "a/b");
    REQUIRE(target.lazyRoot >= 0);
    CHECK_FALSE(match_lazy(f.request, target.lazyRoot, "a/b").matched);
    CHECK(match_lazy(f.request, target.lazyRoot, "/ab").matched);
}

TEST_CASE("pattern: agrees with the reference matcher") {
    Fixture f;
    const Element& body = f.g.find_header("Seq")->body;
    const std::string alphabet = "1 GTEPU";
    std::size_t checked = 0;
    std::string s;
    // every string over the alphabet up to length 5
    std::function<void(std::size_t)> sweep = [&](std::size_t len) {
        bool expected = reference_match(body, f.g.baseGrammar, s);
        bool actual = match_full(f.seq, s).matched;
        INFO("subject: '" << s << "'");
        CHECK(expected == actual);
        ++checked;
        if (len == 5) return;
        for (char c : alphabet) {
            s.push_back(c);
            sweep(len + 1);
            s.pop_back();
        }
    };
    sweep(0);
    CHECK(checked == 1 + 7 + 49 + 343 + 2401 + 16807);
    CHECK(reference_match(body, f.g.baseGrammar, "12 GET"));
}

TEST_CASE("pattern: match budget") {
    auto g = parse_abnf("x = *( *\"a\" ) \"b\"\n");
    Pattern p = compile_pattern(g.find("x")->body, g);
    CHECK_THROWS_AS(match_full(p, std::string(40, 'a'), MatchMode::Strict, 1000), MatchBudgetExceeded);
    CHECK(match_full(p, "aab").matched);
}

TEST_CASE("pattern: core rules inline") {
    auto g = parse_abnf("x = 2HEXDIG CRLF\n");
    Pattern p = compile_pattern(g.find("x")->body, g);
    CHECK(match_full(p, "aF\r\n").matched);
    CHECK_FALSE(match_full(p, "aG\r\n").matched);
    CHECK_FALSE(match_full(p, "aF\n").matched);
}
