// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "zebu/artifact.hpp"
#include "zebu/engine.hpp"
#include "zebu/mutation.hpp"
#include "zebu/pattern.hpp"

namespace fs = std::filesystem;
using namespace zebu;

namespace {

const std::string kRoot = ZEBU_SOURCE_DIR;
const std::string kCli = ZEBU_CLI;
const std::string kSip = kRoot + "/grammars/sip-subset.zebu";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

const CompiledGrammar& sip() {
    static const CompiledGrammar g = compile_source(slurp(kSip), "sip");
    return g;
}

std::string with_line(std::string msg, const std::string& prefix, const std::string& replacement) {
    auto at = msg.find(prefix);
    auto eol = msg.find("\r\n", at);
    return msg.replace(at, eol - at, replacement);
}

bool has_reason(const Verdict& v, ReasonCode code) {
    for (const auto& r : v.reasons)
        if (r.code == code) return true;
    return false;
}

// ---------------------------------------------------------------------------

Outcome mutation_detection() {
    fs::path work = fs::temp_directory_path() / "zebu-acceptance-1";
    fs::remove_all(work);
    fs::create_directories(work);
    std::string artifact = (work / "sip.json").string();
    if (run(kCli + " compile " + kSip + " -o " + artifact) != 0) return {false, "compile failed"};
    std::string detail;
    bool pass = true;
    for (int seed : {1, 2, 3, 4, 5}) {
        auto t0 = std::chrono::steady_clock::now();
        fs::path out = work / ("seed" + std::to_string(seed));
        int rc = run(kCli + " mutate " + artifact + " --count 2416 --seed " + std::to_string(seed) + " --out " +
                     out.string() + " > /dev/null");
        double secs = seconds_since(t0);
        std::string report = slurp(out / "report.txt");
        auto at = report.find("total missed ");
        long missed = at == std::string::npos ? -1 : std::stol(report.substr(at + 13));
        char buf[96];
        std::snprintf(buf, sizeof buf, " seed%d:missed=%ld,exit=%d,%.1fs", seed, missed, rc, secs);
        detail += buf;
        if (missed != 0 || rc != 0) pass = false;
    }
    return {pass, "n=2416" + detail};
}

Outcome torture_acceptance() {
    std::string detail;
    bool pass = true;
    auto target = [](std::string_view m) { return validate(sip(), m).accept; };
    for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
        MutationReport r = run_campaign(sip(), target, 1000, seed, Mix::only(MutationRule::Torture));
        const RuleTally& t = r.perRule[static_cast<int>(MutationRule::Torture)];
        detail += " seed" + std::to_string(seed) + ":falseRejects=" + std::to_string(t.falseRejects);
        if (t.falseRejects != 0 || t.emitted != 1000) pass = false;
    }
    return {pass, "n=1000 torture-only" + detail};
}

// Every string over `alphabet` up to `maxLen`, checked with the compiled matcher and the oracle.
std::size_t sweep(const Pattern& p, const Element& e, const Grammar& g, const std::string& alphabet, std::size_t maxLen,
                  std::size_t& subjects) {
    std::size_t disagreements = 0;
    std::string s;
    std::function<void()> rec = [&]() {
        ++subjects;
        bool fast = match_full(p, s).matched;
        bool slow = reference_match(e, g, s);
        if (fast != slow) {
            if (disagreements < 3) std::cerr << "  disagreement on '" << s << "': compiled=" << fast << " oracle=" << slow << "\n";
            ++disagreements;
        }
        if (s.size() == maxLen) return;
        for (char c : alphabet) {
            s.push_back(c);
            rec();
            s.pop_back();
        }
    };
    rec();
    return disagreements;
}

Outcome oracle_equivalence() {
    auto t0 = std::chrono::steady_clock::now();
    AnnotatedGrammar a = resolve_constraint_refs(parse_zebu(slurp(kSip), "sip"));
    Grammar g = a.baseGrammar;
    g.add(Rule{"HCOLON", parse_abnf("HCOLON = *( SP / HTAB ) \":\" SWS\n").rules()[0].body, {}, std::nullopt});
    const Element cseq = a.find_header("CSeq")->body;
    const Element version{RuleRef{"SIP-Version"}, {}};
    const Element hcolon{RuleRef{"HCOLON"}, {}};

    struct Case {
        const char* name;
        const Element* e;
        std::string alphabet;
        std::size_t maxLen;
    };
    std::vector<Case> cases = {
        {"CSeq", &cseq, std::string("07 \tAcK%:"), 6},
        {"SIP-Version", &version, "SIP/.20x", 6},
        {"SIP-Version", &version, "SIP/.20x", 7},
        {"HCOLON", &hcolon, std::string(" \t:\r\na;/"), 6},
    };
    std::size_t total = 0, bad = 0;
    std::string detail;
    for (const auto& c : cases) {
        Pattern p = compile_pattern(*c.e, g);
        std::size_t subjects = 0;
        std::size_t d = sweep(p, *c.e, g, c.alphabet, c.maxLen, subjects);
        total += subjects;
        bad += d;
        detail += std::string(" ") + c.name + "(|A|=" + std::to_string(c.alphabet.size()) + ",len<=" +
                  std::to_string(c.maxLen) + "):" + std::to_string(d);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " subjects=%zu %.1fs", total, seconds_since(t0));
    return {bad == 0, "disagreements" + detail + buf};
}

Outcome constraint_fidelity() {
    const CompiledGrammar& g = sip();
    std::string invite = slurp(kRoot + "/corpus/sip/invite1.msg");
    std::string ok200 = slurp(kRoot + "/corpus/sip/ok200.msg");
    struct Check {
        std::string name;
        std::string msg;
        bool accept;
        ReasonCode code;
    };
    std::vector<Check> checks = {
        {"cseq=2147483647", with_line(invite, "CSeq:", "CSeq: 2147483647 INVITE"), true, ReasonCode::Syntax},
        {"cseq=2147483648", with_line(invite, "CSeq:", "CSeq: 2147483648 INVITE"), false, ReasonCode::Range},
        {"status=99", with_line(ok200, "SIP/2.0", "SIP/2.0 099 OK"), false, ReasonCode::Range},
        {"status=100", with_line(ok200, "SIP/2.0", "SIP/2.0 100 Trying"), true, ReasonCode::Syntax},
        {"status=698", with_line(ok200, "SIP/2.0", "SIP/2.0 698 Custom"), true, ReasonCode::Syntax},
        {"status=699", with_line(ok200, "SIP/2.0", "SIP/2.0 699 Custom"), false, ReasonCode::Range},
        {"method-mismatch", with_line(invite, "CSeq:", "CSeq: 314159 BYE"), false, ReasonCode::Constraint},
    };
    bool pass = true;
    std::string detail;
    for (const auto& c : checks) {
        Verdict v = validate(g, c.msg);
        bool ok = v.accept == c.accept && (c.accept || has_reason(v, c.code));
        if (!ok) pass = false;
        std::string got = v.accept ? "ACCEPT" : "REJECT(" + std::string(to_string(v.reasons[0].code)) + ")";
        detail += " " + c.name + "->" + got;
    }
    return {pass, detail.substr(1)};
}

Outcome two_level() {
    const CompiledGrammar& g = sip();
    auto counter = [&](const std::string& file, std::size_t& lazy, std::size_t& headers) {
        Session s(g, slurp(kRoot + "/corpus/sip/" + file));
        headers = s.index().headers.size();
        s.message_type();
        const ParsedHeader& h = s.parse_header("From");
        TypedValue uri = s.get_subfield(h, "uri");
        lazy = s.lazy_counter() + (uri.is<LazyPending>() ? 0 : 1000);
        return s.exec_counter();
    };
    std::size_t lazy1, lazy2, lazy3, n1, n2, n3;
    std::size_t c1 = counter("invite1.msg", lazy1, n1);
    std::size_t c2 = counter("invite2.msg", lazy2, n2);
    std::size_t c3 = counter("invite3.msg", lazy3, n3);

    Session forced(g, slurp(kRoot + "/corpus/sip/invite2.msg"));
    TypedValue host = forced.select("From.uri.host");
    bool forcing = forced.lazy_counter() == 1 && host.is<RawSlice>();

    bool pass = c2 == c3 && c1 == c2 && lazy1 == 0 && lazy2 == 0 && lazy3 == 0 && n2 == 34 && n3 == 34 && forcing;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "exec_counter invite1(%zu hdrs)=%zu invite2(%zu)=%zu invite3(%zu)=%zu; lazy counter unforced=%zu,%zu,%zu; "
                  "forced=%zu",
                  n1, c1, n2, c2, n3, c3, lazy1, lazy2, lazy3, forced.lazy_counter());
    return {pass, buf};
}

Outcome verifier_checks() {
    fs::path work = fs::temp_directory_path() / "zebu-acceptance-6";
    fs::create_directories(work);
    bool pass = true;
    std::string detail;
    struct Case {
        std::string file;
        std::string code;
    };
    std::vector<Case> cases = {{"tests/data/bad-undefined.zebu", "UNDEFINED_RULE"},
                               {"tests/data/bad-duplicate.zebu", "DUPLICATE_RULE"},
                               {"tests/data/bad-cycle.zebu", "RULE_CYCLE"},
                               {"grammars/sip-subset.zebu", ""},
                               {"grammars/rtsp-subset.zebu", ""}};
    for (const auto& c : cases) {
        fs::path err = work / "stderr.txt";
        int rc = run(kCli + " check " + kRoot + "/" + c.file + " 2> " + err.string());
        std::vector<std::string> lines;
        std::istringstream in(slurp(err));
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        bool ok = c.code.empty() ? rc == 0 && lines.empty()
                                 : rc == 1 && lines.size() == 1 && lines[0].find("[" + c.code + "]") != std::string::npos;
        if (!ok) pass = false;
        detail += " " + fs::path(c.file).filename().string() + ":exit=" + std::to_string(rc) + ",diags=" +
                  std::to_string(lines.size());
    }
    return {pass, detail.substr(1)};
}

TypedValue forced_value(Session& s, const TypedValue& v) {
    if (auto* lazy = v.as<LazyPending>()) return forced_value(s, s.force_lazy(*lazy));
    auto force_map = [&](const std::shared_ptr<const FieldMap>& m) {
        auto out = std::make_shared<FieldMap>();
        if (m)
            for (const auto& [k, x] : *m) (*out)[k] = forced_value(s, x);
        return out;
    };
    if (auto* st = v.as<StructVal>()) return TypedValue{StructVal{force_map(st->fields)}};
    if (auto* u = v.as<UnionVal>()) return TypedValue{UnionVal{u->branch, force_map(u->fields)}};
    return v;
}

// Every subfield of every declared header occurrence, lazy fields forced.
std::vector<std::pair<std::string, TypedValue>> all_values(const CompiledGrammar& g, const std::string& msg) {
    Session s(g, msg);
    std::vector<std::pair<std::string, TypedValue>> out;
    for (std::size_t i = 0; i < g.headers.size(); ++i) {
        auto lines = s.lines_of(i);
        for (std::size_t n = 0; n < lines.size(); ++n) {
            const ParsedHeader& h = s.parse_occurrence(i, n);
            out.emplace_back(g.headers[i].name + "#" + std::to_string(n) + " state",
                             TypedValue{U16{static_cast<std::uint16_t>(h.state)}});
            for (const auto& [k, v] : h.subfields) out.emplace_back(g.headers[i].name + "." + k, forced_value(s, v));
        }
    }
    return out;
}

Outcome folding_transparency() {
    const CompiledGrammar& g = sip();
    std::size_t messages = 0, folds = 0, mismatches = 0, rejected = 0;
    for (std::uint64_t seed = 1; messages < 100 && seed < 10000; ++seed) {
        DerivationTree t = derive_valid(g, seed);
        auto original = all_values(g, t.message);
        std::size_t here = 0;
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const auto& n = t.nodes[i];
            if (n.kind != DerivationNode::Kind::Line || n.entry < 0) continue;
            std::string folded = fold_at_whitespace(t, i, seed * 131 + i);
            if (folded == t.message) continue;
            ++here;
            if (!validate(g, folded).accept) ++rejected;
            if (all_values(g, folded) != original) ++mismatches;
        }
        if (here > 0) {
            ++messages;
            folds += here;
        }
    }
    bool pass = messages == 100 && mismatches == 0 && rejected == 0;
    return {pass, std::to_string(messages) + " messages, " + std::to_string(folds) + " folded header values, " +
                      std::to_string(mismatches) + " mismatches, " + std::to_string(rejected) + " rejects"};
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
    std::size_t other = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++other;
    if (names.size() != other) return false;
    files = names.size();
    for (const auto& n : names)
        if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) return false;
    return true;
}

Outcome determinism() {
    fs::path work = fs::temp_directory_path() / "zebu-acceptance-8";
    fs::remove_all(work);
    fs::create_directories(work);
    std::string a1 = (work / "a1.json").string(), a2 = (work / "a2.json").string();
    int rc1 = run(kCli + " compile " + kSip + " -o " + a1);
    int rc2 = run(kCli + " compile " + kSip + " -o " + a2);
    bool artifacts = rc1 == 0 && rc2 == 0 && slurp(a1) == slurp(a2) && !slurp(a1).empty();
    std::string mutate = kCli + " mutate " + a1 + " --count 500 --seed 42 --out ";
    run(mutate + (work / "m1").string() + " > /dev/null");
    run(mutate + (work / "m2").string() + " > /dev/null");
    run(mutate + (work / "m3").string() + " --jobs 3 > /dev/null");
    std::size_t files = 0, files3 = 0;
    bool corpora = same_tree(work / "m1", work / "m2", files) && same_tree(work / "m1", work / "m3", files3);
    bool roundTrip = serialize_artifact(load_artifact(slurp(a1))) == slurp(a1);
    return {artifacts && corpora && files == 502 && roundTrip,
            std::string("artifacts ") + (artifacts ? "identical" : "DIFFER") + "; corpora (" + std::to_string(files) +
                " files, --jobs 1 vs 1 vs 3) " + (corpora ? "identical" : "DIFFER") + "; artifact reload " +
                (roundTrip ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*fn)();
    };
    const Criterion criteria[] = {
        {"mutation detection", mutation_detection},   {"torture acceptance", torture_acceptance},
        {"oracle equivalence", oracle_equivalence},   {"constraint fidelity", constraint_fidelity},
        {"two-level/lazy counters", two_level},       {"verifier checks", verifier_checks},
        {"folding transparency", folding_transparency}, {"determinism", determinism},
    };
    int failures = 0;
    int i = 0;
    for (const auto& c : criteria) {
        ++i;
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << c.name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
