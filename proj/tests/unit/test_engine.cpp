// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <string>

#include "mini.hpp"
#include "zebu/engine.hpp"

using namespace zebu;

namespace {

const CompiledGrammar& mini() {
    static const CompiledGrammar g = compile_source(kMiniGrammar);
    return g;
}

std::string request(const std::string& headers, const std::string& line = "GET /a MINI/1") {
    return line + "\r\n" + headers + "\r\n";
}

bool has_reason(const Verdict& v, ReasonCode code) {
    for (const auto& r : v.reasons)
        if (r.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("engine: line index") {
    std::string raw = "GET /a MINI/1\r\nSeq: 1 GET\r\nTag:  x\r\n \ty\r\n\r\nbody";
    auto idx = index_message(raw);
    REQUIRE(idx.ok());
    CHECK(raw.substr(idx.commandLine.begin, idx.commandLine.size()) == "GET /a MINI/1");
    REQUIRE(idx.headers.size() == 2);
    CHECK(raw.substr(idx.headers[0].key.begin, idx.headers[0].key.size()) == "Seq");
    CHECK(idx.headers[1].segments.size() == 2);
    CHECK(idx.headers[1].line == 3);
    CHECK(unfold_value(raw, idx.headers[1]) == "x y");
    CHECK(raw.substr(idx.body.begin, idx.body.size()) == "body");
}

TEST_CASE("engine: line index errors") {
    auto first_code = [](std::string_view raw) {
        auto idx = index_message(raw);
        REQUIRE_FALSE(idx.ok());
        return idx.errors[0].code;
    };
    CHECK(first_code("GET / MINI/1\nSeq: 1 GET\r\n\r\n") == ReasonCode::Syntax);
    CHECK(first_code("GET / MINI/1\r\nSeq: 1\rGET\r\n\r\n") == ReasonCode::Syntax);
    CHECK(first_code("GET / MINI/1\r\nSeq: 1 GET\r\n  \r\n\r\n") == ReasonCode::Folding);
    CHECK(first_code("GET / MINI/1\r\n cont\r\n\r\n") == ReasonCode::Syntax);
    CHECK(first_code("GET / MINI/1\r\nno colon\r\n\r\n") == ReasonCode::Syntax);
    CHECK(first_code("GET / MINI/1\r\nSeq: 1 GET\r\n") == ReasonCode::Syntax);
    CHECK(first_code("") == ReasonCode::Syntax);
}

TEST_CASE("engine: accepting messages") {
    auto v = validate(mini(), request("Seq: 12 GET\r\nTag: a b\r\nTag: c\r\nX-Other: whatever\r\n"));
    INFO(v.render());
    CHECK(v.accept);
    CHECK(v.kind == MessageKind::Request);
    CHECK(v.render() == "ACCEPT\n");

    auto r = validate(mini(), "MINI/1 200 OK then\r\n\r\n");
    CHECK(r.accept);
    CHECK(r.kind == MessageKind::Response);

    CHECK(validate(mini(), request("s: 3 get\r\n", "get / MINI/1")).accept);
}

TEST_CASE("engine: rejection reasons") {
    CHECK(has_reason(validate(mini(), request("Tag: a\r\n")), ReasonCode::MandatoryMissing));
    CHECK(has_reason(validate(mini(), request("Seq: 1 PUT\r\n")), ReasonCode::Constraint));
    CHECK(has_reason(validate(mini(), request("Seq: 1000 GET\r\n")), ReasonCode::Range));
    CHECK(has_reason(validate(mini(), request("Seq: 1 GET\r\ns: 1 GET\r\n")), ReasonCode::DuplicateHeader));
    CHECK(has_reason(validate(mini(), request("Seq: 1 GET\r\nTag: a b!\r\n")), ReasonCode::Syntax));
    CHECK(has_reason(validate(mini(), request("Seq: 1 GET\r\n", "GET a/b MINI/1")), ReasonCode::Syntax));
    CHECK(has_reason(validate(mini(), "MINI/1 404 Not Found\r\n\r\n"), ReasonCode::Range));
    CHECK(has_reason(validate(mini(), "MINI/2 200 OK\r\n\r\n"), ReasonCode::Syntax));
    CHECK(has_reason(validate(mini(), request("Seq: 1 GET\r\nBad\x01: x\r\n")), ReasonCode::Syntax));

    auto v = validate(mini(), request("Seq: 1000 PUT\r\nTag: !\r\n"));
    CHECK_FALSE(v.accept);
    CHECK(v.render().rfind("REJECT ", 0) == 0);
}

TEST_CASE("engine: folded values validate like unfolded ones") {
    auto a = validate(mini(), request("Seq: 12\r\n GET\r\nTag: a\r\n\tb\r\n"));
    INFO(a.render());
    CHECK(a.accept);
    Session s(mini(), request("Seq: 12\r\n GET\r\n"));
    CHECK(s.parse_header("Seq").rawValue == "12 GET");
}

TEST_CASE("engine: typed values and selectors") {
    Session s(mini(), request("Seq: 42 GET\r\nTag: a b\r\n"));
    CHECK(s.message_type() == MessageKind::Request);
    auto n = s.select("Seq.number");
    REQUIRE(n.as<U32>());
    CHECK(n.as<U32>()->value == 42);
    auto m = s.select("Seq.method");
    REQUIRE(m.as<EnumTag>());
    CHECK(m.as<EnumTag>()->branch == 0);
    CHECK(to_string(m) == "GET #0");
    CHECK(to_string(s.select("Tag.value")) == "a");
    CHECK(to_string(s.select("requestLine.version")) == "MINI/1");
    CHECK(s.select("statusLine.code").is<Absent>());
    CHECK_THROWS_AS(s.select("Seq.nothing"), UnknownSubfield);
    CHECK_THROWS_AS(s.select("Nope.x"), UnknownSubfield);

    Session r(mini(), "MINI/1 204 No Content\r\n\r\n");
    auto code = r.select("statusLine.code");
    REQUIRE(code.as<U16>());
    CHECK(code.as<U16>()->value == 204);
    CHECK(r.select("Seq.number").is<Absent>());
}

TEST_CASE("engine: lazy subfields are deferred until forced") {
    Session s(mini(), request("Seq: 1 GET\r\n", "GET /deep/path MINI/1"));
    auto pending = s.select("requestLine.target", false);
    REQUIRE(pending.as<LazyPending>());
    CHECK(pending.as<LazyPending>()->text == "/deep/path");
    CHECK(s.lazy_counter() == 0);
    auto forced = s.select("requestLine.target");
    CHECK(to_string(forced) == "/deep/path");
    CHECK(s.lazy_counter() == 1);
    s.select("requestLine.target");
    CHECK(s.lazy_counter() == 1);

    Session bad(mini(), request("Seq: 1 GET\r\n", "GET a/b MINI/1"));
    CHECK(bad.select("requestLine.target", false).is<LazyPending>());
    CHECK_THROWS_AS(bad.select("requestLine.target"), ParseFailure);
    CHECK_THROWS_AS(bad.select("requestLine.target"), ParseFailure);
    CHECK(bad.lazy_counter() == 1);
}

TEST_CASE("engine: headers are parsed on demand and memoized") {
    Session s(mini(), request("Tag: a\r\nSeq: 1 GET\r\nX: y\r\n"));
    s.message_type();
    auto base = s.exec_counter();
    s.parse_header("Seq");
    CHECK(s.exec_counter() == base + 1);
    s.parse_header("Seq");
    s.select("Seq.number");
    CHECK(s.exec_counter() == base + 1);
    CHECK(s.occurrences("Tag") == 1);
    CHECK(s.parse_header("tag").state == ParsedHeader::State::ParsedOk);
    CHECK(s.exec_counter() == base + 2);

    Session absent(mini(), request("Seq: 1 GET\r\n"));
    absent.message_type();
    auto before = absent.exec_counter();
    CHECK(absent.parse_header("Tag").state == ParsedHeader::State::Absent);
    CHECK(absent.exec_counter() == before);
}

TEST_CASE("engine: multiple occurrences") {
    Session s(mini(), request("Tag: a\r\nSeq: 1 GET\r\nTag: b c\r\n"));
    CHECK(s.occurrences("Tag") == 2);
    CHECK(s.parse_header_nth("Tag", 1).rawValue == "b c");
    CHECK(s.lines_of(1).size() == 2);
}

TEST_CASE("engine: accessor names") {
    auto names = accessor_names(mini());
    auto has = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    CHECK(has("mini_parse_headers"));
    CHECK(has("mini_header_Seq_getNumber"));
    CHECK(has("mini_RequestLine_getTarget"));
    CHECK(has("mini_Lazy_Target_getParsed"));
}

TEST_CASE("engine: compile errors carry diagnostics") {
    try {
        compile_source("request { requestLine = Missing }\nresponse { statusLine = \"B\" }\n");
        FAIL("expected CompileError");
    } catch (const CompileError& e) {
        REQUIRE(e.diagnostics().size() == 1);
        CHECK(e.diagnostics()[0].code == DiagCode::UndefinedRule);
    }
}
