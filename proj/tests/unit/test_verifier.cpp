// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <string>

#include "mini.hpp"
#include "zebu/verifier.hpp"

using namespace zebu;

namespace {

const char* kLines = "request { requestLine = \"A\" SP X }\nresponse { statusLine = \"B\" }\n";

std::vector<Diagnostic> verify(const std::string& rest) {
    return verify_all(parse_zebu(std::string(kLines) + rest));
}

std::size_t count(const std::vector<Diagnostic>& ds, DiagCode c) {
    return static_cast<std::size_t>(std::count_if(ds.begin(), ds.end(), [&](const auto& d) { return d.code == c; }));
}

}  // namespace

TEST_CASE("verifier: mini grammar is clean") {
    auto ds = verify_all(parse_zebu(kMiniGrammar));
    for (const auto& d : ds) INFO(format_diagnostic(d, "mini.zebu"));
    CHECK(ds.empty());
}

TEST_CASE("verifier: undefined rules, one per name") {
    auto ds = verify("X = Y Y Z\n");
    CHECK(count(ds, DiagCode::UndefinedRule) == 2);
    CHECK(has_errors(ds));

    CHECK(count(verify("X = DIGIT CRLF\n"), DiagCode::UndefinedRule) == 0);

    auto noStatus = verify_all(parse_zebu("request { requestLine = \"A\" }\n"));
    CHECK(count(noStatus, DiagCode::UndefinedRule) == 1);
}

TEST_CASE("verifier: duplicate definitions") {
    auto ds = verify("X = \"a\"\nx = \"b\"\n");
    REQUIRE(count(ds, DiagCode::DuplicateRule) == 1);
    auto d = *std::find_if(ds.begin(), ds.end(), [](const auto& d) { return d.code == DiagCode::DuplicateRule; });
    CHECK(d.span.line == 4);

    CHECK(count(verify("X = \"a\"\nheader H = X\nheader H = X\n"), DiagCode::DuplicateRule) == 1);
    CHECK(count(verify("X = \"a\"\nheader H {\"H\" / \"k\"} = X\nheader K {\"k\"} = X\n"), DiagCode::DuplicateRule) == 1);
}

TEST_CASE("verifier: cycles") {
    auto ds = verify("X = \"(\" Y \")\"\nY = \"a\" / X\n");
    REQUIRE(count(ds, DiagCode::RuleCycle) == 1);
    auto d = *std::find_if(ds.begin(), ds.end(), [](const auto& d) { return d.code == DiagCode::RuleCycle; });
    REQUIRE(d.cyclePath.size() >= 3);
    CHECK(d.cyclePath.front() == d.cyclePath.back());

    CHECK(count(verify("X = \"a\" [ X ]\n"), DiagCode::RuleCycle) == 1);
    CHECK(count(verify("X = Y Z\nY = \"a\"\nZ = Y\n"), DiagCode::RuleCycle) == 0);
}

TEST_CASE("verifier: type mismatches") {
    CHECK(count(verify("X = ALPHA:n:uint16\n"), DiagCode::TypeMismatch) == 1);
    CHECK(count(verify("X = *DIGIT:n:uint32\n"), DiagCode::TypeMismatch) == 1);
    CHECK(count(verify("X = \"a\":n:enum\n"), DiagCode::TypeMismatch) == 1);
    CHECK(count(verify("X = DIGIT:n:struct\n"), DiagCode::TypeMismatch) == 1);
    CHECK(count(verify("X = 1*DIGIT:n:uint16\n"), DiagCode::TypeMismatch) == 0);
    CHECK(count(verify("X = ( \"a\" / \"b\" ):n:enum\n"), DiagCode::TypeMismatch) == 0);

    // numbers compared with strings, strings ordered
    CHECK(count(verify("X = \"x\"\nheader H = 1*DIGIT:n:uint32 ALPHA:s { H.n == \"1\" }\n"), DiagCode::TypeMismatch) ==
          1);
    CHECK(count(verify("X = \"x\"\nheader H = 1*DIGIT:n:uint32 ALPHA:s { H.s < \"b\" }\n"), DiagCode::TypeMismatch) ==
          1);
}

TEST_CASE("verifier: duplicate subfields and repeated captures") {
    CHECK(count(verify("X = DIGIT:a DIGIT:a\n"), DiagCode::DuplicateSubfield) == 1);
    CHECK(count(verify("X = DIGIT:a / ALPHA:a\n"), DiagCode::DuplicateSubfield) == 0);

    auto ds = verify("X = 1*( DIGIT:d )\n");
    CHECK(count(ds, DiagCode::RepeatedCapture) == 1);
    CHECK_FALSE(has_errors(ds));
}

TEST_CASE("verifier: unresolved constraint reference") {
    auto ds = verify("X = \"x\"\nheader H = 1*DIGIT:n:uint32 { H.m < 3 }\n");
    CHECK(count(ds, DiagCode::UnresolvedRef) == 1);
}

TEST_CASE("verifier: unreachable rules warn") {
    auto ds = verify("X = \"x\"\nOrphan = \"o\"\n");
    CHECK(count(ds, DiagCode::UnreachableRule) == 1);
    CHECK_FALSE(has_errors(ds));
}

TEST_CASE("verifier: diagnostic rendering") {
    Diagnostic d{Severity::Error, DiagCode::UndefinedRule, "rule 'Q' is not defined", {3, 7}, {}};
    CHECK(format_diagnostic(d, "g.zebu") == "g.zebu:3:7: error[UNDEFINED_RULE]: rule 'Q' is not defined");
    d.severity = Severity::Warning;
    d.code = DiagCode::UnreachableRule;
    CHECK(format_diagnostic(d, "g.zebu").rfind("g.zebu:3:7: warning[UNREACHABLE_RULE]: ", 0) == 0);
    CHECK(to_string(DiagCode::RepeatedCapture) == "REPEATED_CAPTURE");
}
