// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "zebu/zebu.hpp"

namespace zebu {

enum class Severity { Error, Warning };

enum class DiagCode {
    UndefinedRule,
    DuplicateRule,
    RuleCycle,
    TypeMismatch,
    UnresolvedRef,
    UnreachableRule,
    DuplicateSubfield,
    RepeatedCapture,
};

std::string_view to_string(Severity s);
std::string_view to_string(DiagCode c);

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagCode code = DiagCode::UndefinedRule;
    std::string message;
    SourceSpan span;
    std::vector<std::string> cyclePath;  ///< RULE_CYCLE only; first == last
};

/// One UNDEFINED_RULE per distinct referenced-but-undefined name (core rules count as defined),
/// plus one for each missing requestLine/statusLine entry point.
std::vector<Diagnostic> check_no_omission(const AnnotatedGrammar& g);

/// One DUPLICATE_RULE per repeated definition (case-insensitive), at the later definition.
/// Also covers repeated header declarations and header keys shared by two headers.
std::vector<Diagnostic> check_no_duplicates(const AnnotatedGrammar& g);

/// One RULE_CYCLE per strongly connected component with more than one rule or a self reference.
std::vector<Diagnostic> check_no_cycles(const AnnotatedGrammar& g);

/// Subfield type checks: numeric literals in range, enum/union over alternations, structs with
/// members, no type given at both reference and definition, unique names, repeated captures.
std::vector<Diagnostic> check_type_annotations(const AnnotatedGrammar& g);

/// All checks in order: omission, duplicates, cycles, type annotations, constraint references,
/// constraint typing, unreachable rules. Compilation may proceed iff `!has_errors(...)`.
std::vector<Diagnostic> verify_all(const AnnotatedGrammar& g);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// `file:line:col: severity[CODE]: message`
std::string format_diagnostic(const Diagnostic& d, std::string_view file);

}  // namespace zebu
