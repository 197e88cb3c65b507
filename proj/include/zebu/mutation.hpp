// SPDX-License-Identifier: Apache-2.0
// Grammar-driven mutation harness: valid message derivation, invalid mutants from three rule
// families, torture-style valid mutants, and campaigns against a validation function.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zebu/engine.hpp"

namespace zebu {

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No mutation of the requested family exists for a derivation.
class Exhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DerivationNode {
    enum class Kind { Message, Line, Rule, Named, Alternation, Repetition, Iteration, Terminal };
    enum class Term { CaseInsensitive, Exact, Range, Structural };

    Kind kind = Kind::Terminal;
    std::string label;           // rule name, terminal text, entry name
    std::size_t begin = 0;
    std::size_t end = 0;
    int parent = -1;
    int last = 0;                // one past the last descendant (nodes are in pre-order)

    std::uint32_t min = 0;       // Repetition
    std::uint32_t max = 0;
    int count = 0;
    int branch = -1;             // Alternation

    Term term = Term::Exact;     // Terminal
    unsigned char lo = 0;
    unsigned char hi = 0;

    std::string key;             // Named: "Entry.path"; Line: entry name
    int entry = 0;               // Line: header index, kRequestLineEntry or kStatusLineEntry
    const Element* element = nullptr;  // Named: the annotated element
    Shape shape = Shape::RawSlice;     // Named
};

struct DerivationTree {
    std::string message;
    MessageKind kind = MessageKind::Request;
    std::vector<DerivationNode> nodes;
};

/// Random derivation of a valid message. Unbounded repetitions take min + Geometric(0.5)
/// iterations, at most `sizeBudget` extra. The result passes reference_validate.
DerivationTree derive_valid(const CompiledGrammar& g, std::uint64_t seed, std::size_t sizeBudget = 8);

enum class MutationRule { Charset, Repetition, Constraint, Torture };
enum class GroundTruth { Valid, Invalid };
enum class Position { First, Middle, Last };

std::string_view to_string(MutationRule r);
std::string_view to_string(GroundTruth t);
std::string_view to_string(Position p);

struct Mutant {
    std::string bytes;
    MutationRule rule = MutationRule::Torture;
    GroundTruth groundTruth = GroundTruth::Valid;
    int sourceNode = -1;
    std::string description;
    std::uint64_t seed = 0;
    std::string coverage;  // position class or constraint exercised
};

/// Independent ground truth: own line splitting, unfolding and header lookup, reference_match
/// for every line. Only RANGE and CONSTRAINT findings are taken from the engine.
struct ReferenceVerdict {
    bool valid = true;
    std::string reason;
};
ReferenceVerdict reference_validate(const CompiledGrammar& g, std::string_view raw);

Mutant mutate_charset(const CompiledGrammar& g, const DerivationTree& t, Position position, std::uint64_t seed);
Mutant mutate_repetition(const CompiledGrammar& g, const DerivationTree& t, std::uint64_t seed);
Mutant mutate_constraint(const CompiledGrammar& g, const DerivationTree& t, std::uint64_t seed);
Mutant mutate_torture(const CompiledGrammar& g, const DerivationTree& t, std::uint64_t seed);

/// Folds the value of the header line at node `lineNode` at a whitespace run so that unfolding
/// restores the original value. Returns the input unchanged when no such run exists.
std::string fold_at_whitespace(const DerivationTree& t, std::size_t lineNode, std::uint64_t seed);

struct Mix {
    std::array<double, 4> weights{1, 1, 1, 1};  // indexed by MutationRule
    static Mix parse(std::string_view text);     // "charset=1,torture=0" style, missing = 0
    static Mix only(MutationRule r);
    std::string render() const;
};

struct RuleTally {
    std::size_t emitted = 0;
    std::size_t detected = 0;  // INVALID and rejected
    std::size_t missed = 0;    // INVALID and accepted
    std::size_t accepted = 0;  // VALID and accepted
    std::size_t falseRejects = 0;
};

struct MutationReport {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    Mix mix;
    std::array<RuleTally, 4> perRule{};
    std::size_t exhausted = 0;
    std::array<std::size_t, 3> positions{};           // charset position classes hit
    std::map<std::string, std::size_t> constraintsHit;  // constraint mutation strategies hit

    std::size_t missed() const;
    std::size_t false_rejects() const;
    void merge(const MutationReport& other);
    std::string render() const;
};

/// true = ACCEPT
using Target = std::function<bool(std::string_view)>;

struct CampaignItem {
    std::size_t index = 0;
    Mutant mutant;
    bool accepted = false;
};

/// Mutant i uses seed mutant_seed(seed, i), so streams are independent of `jobs`.
std::uint64_t mutant_seed(std::uint64_t campaignSeed, std::size_t index);
Mutant generate_mutant(const CompiledGrammar& g, MutationRule rule, std::uint64_t seed);

MutationReport run_campaign(const CompiledGrammar& g, const Target& target, std::size_t n, std::uint64_t seed,
                            const Mix& mix, unsigned jobs = 1,
                            const std::function<void(const CampaignItem&)>& sink = {});

std::string manifest_line(const CampaignItem& item);

}  // namespace zebu
