// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mini.hpp"
#include "zebu/mutation.hpp"

using namespace zebu;

namespace {

const CompiledGrammar& mini() {
    static const CompiledGrammar g = compile_source(kMiniGrammar);
    return g;
}

const CompiledGrammar& sip() {
    static const CompiledGrammar g = [] {
        std::ifstream in(std::string(ZEBU_SOURCE_DIR) + "/grammars/sip-subset.zebu", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return compile_source(ss.str(), "sip");
    }();
    return g;
}

std::size_t crlf_count(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] == '\r' && s[i + 1] == '\n') ++n;
    return n;
}

bool under_number(const DerivationTree& t, int i) {
    for (int p = t.nodes[static_cast<std::size_t>(i)].parent; p >= 0; p = t.nodes[static_cast<std::size_t>(p)].parent) {
        const auto& n = t.nodes[static_cast<std::size_t>(p)];
        if (n.kind == DerivationNode::Kind::Named && (n.shape == Shape::Uint16 || n.shape == Shape::Uint32)) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("mutation: derived messages are valid") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        for (const CompiledGrammar* g : {&mini(), &sip()}) {
            auto t = derive_valid(*g, seed);
            INFO("seed " << seed << ": " << t.message);
            CHECK(reference_validate(*g, t.message).valid);
            CHECK(validate(*g, t.message).accept);
            REQUIRE_FALSE(t.nodes.empty());
            CHECK(t.nodes[0].kind == DerivationNode::Kind::Message);
            CHECK(t.nodes[0].end == t.message.size());
        }
    }
}

TEST_CASE("mutation: derivation is deterministic") {
    CHECK(derive_valid(sip(), 7).message == derive_valid(sip(), 7).message);
    CHECK(derive_valid(sip(), 7).message != derive_valid(sip(), 8).message);
    for (auto r : {MutationRule::Charset, MutationRule::Repetition, MutationRule::Constraint, MutationRule::Torture}) {
        try {
            auto a = generate_mutant(sip(), r, 99);
            auto b = generate_mutant(sip(), r, 99);
            CHECK(a.bytes == b.bytes);
            CHECK(a.description == b.description);
        } catch (const Exhausted&) {
        }
    }
}

TEST_CASE("mutation: zero size budget gives minimum counts") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto t = derive_valid(sip(), seed, 0);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const auto& n = t.nodes[i];
            if (n.kind != DerivationNode::Kind::Repetition || n.max != kUnbounded) continue;
            if (under_number(t, static_cast<int>(i))) continue;
            CHECK(n.count == static_cast<int>(n.min));
        }
    }
}

TEST_CASE("mutation: labels agree with the reference validator") {
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        for (auto r : {MutationRule::Charset, MutationRule::Repetition, MutationRule::Constraint, MutationRule::Torture}) {
            Mutant m;
            try {
                m = generate_mutant(sip(), r, mutant_seed(5, seed));
            } catch (const Exhausted&) {
                continue;
            }
            INFO(to_string(r) << " " << m.description);
            bool valid = reference_validate(sip(), m.bytes).valid;
            CHECK(valid == (m.groundTruth == GroundTruth::Valid));
            CHECK((r == MutationRule::Torture) == (m.groundTruth == GroundTruth::Valid));
            ++checked;
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("mutation: charset mutants keep the line structure") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto t = derive_valid(sip(), seed);
        for (auto pos : {Position::First, Position::Middle, Position::Last}) {
            Mutant m;
            try {
                m = mutate_charset(sip(), t, pos, seed);
            } catch (const Exhausted&) {
                continue;
            }
            CHECK(m.bytes.size() == t.message.size());
            CHECK(crlf_count(m.bytes) == crlf_count(t.message));
            CHECK(m.groundTruth == GroundTruth::Invalid);
            CHECK(m.coverage == to_string(pos));
        }
    }
}

TEST_CASE("mutation: folding preserves the unfolded value") {
    std::size_t folded = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto t = derive_valid(sip(), seed);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            if (t.nodes[i].kind != DerivationNode::Kind::Line || t.nodes[i].entry < 0) continue;
            auto out = fold_at_whitespace(t, i, seed);
            if (out == t.message) continue;
            ++folded;
            CHECK(crlf_count(out) == crlf_count(t.message) + 1);
            CHECK(reference_validate(sip(), out).valid);
        }
    }
    CHECK(folded > 0);
}

TEST_CASE("mutation: degenerate targets") {
    auto acceptAll = run_campaign(sip(), [](std::string_view) { return true; }, 200, 3, Mix{});
    auto rejectAll = run_campaign(sip(), [](std::string_view) { return false; }, 200, 3, Mix{});
    std::size_t invalid = 0, valid = 0;
    for (std::size_t r = 0; r < 4; ++r) {
        const auto& t = acceptAll.perRule[r];
        if (r == static_cast<std::size_t>(MutationRule::Torture)) valid += t.emitted;
        else invalid += t.emitted;
    }
    CHECK(invalid > 0);
    CHECK(valid > 0);
    CHECK(acceptAll.missed() == invalid);
    CHECK(acceptAll.false_rejects() == 0);
    CHECK(rejectAll.missed() == 0);
    CHECK(rejectAll.false_rejects() == valid);
    CHECK(invalid + valid + acceptAll.exhausted == 200);
}

TEST_CASE("mutation: campaign is independent of worker count") {
    auto target = [](std::string_view m) { return validate(sip(), m).accept; };
    std::vector<std::string> one, three;
    auto r1 = run_campaign(sip(), target, 120, 11, Mix{}, 1, [&](const CampaignItem& i) { one.push_back(manifest_line(i)); });
    auto r3 = run_campaign(sip(), target, 120, 11, Mix{}, 3, [&](const CampaignItem& i) { three.push_back(manifest_line(i)); });
    CHECK(one == three);
    CHECK(r1.render() == r3.render());
    CHECK(r1.missed() == 0);
    CHECK(r1.false_rejects() == 0);
    CHECK_THROWS_AS(run_campaign(sip(), target, 0, 11, Mix{}), std::invalid_argument);
}

TEST_CASE("mutation: mix parsing") {
    auto m = Mix::parse("charset=2,torture=0.5");
    CHECK(m.weights[0] == 2);
    CHECK(m.weights[1] == 0);
    CHECK(m.weights[2] == 0);
    CHECK(m.weights[3] == 0.5);
    CHECK_THROWS_AS(Mix::parse("sideways=1"), std::invalid_argument);
    CHECK(Mix::parse("charset").weights == std::array<double, 4>{1, 0, 0, 0});
    CHECK_THROWS_AS(Mix::parse("charset=x"), std::invalid_argument);
    CHECK_THROWS_AS(Mix::parse("charset=-1"), std::invalid_argument);
    auto only = Mix::only(MutationRule::Constraint);
    CHECK(only.weights == std::array<double, 4>{0, 0, 1, 0});
    CHECK(Mix::parse(Mix{}.render()).weights == Mix{}.weights);
}

TEST_CASE("mutation: seeds spread") {
    CHECK(mutant_seed(1, 0) != mutant_seed(1, 1));
    CHECK(mutant_seed(1, 0) != mutant_seed(2, 0));
    CHECK(mutant_seed(1, 5) == mutant_seed(1, 5));
}
