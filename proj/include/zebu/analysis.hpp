// SPDX-License-Identifier: Apache-2.0
// Static properties of ABNF elements, resolved through rule references.
// All functions assume an acyclic grammar and stop at a fixed nesting depth otherwise.
#pragma once

#include <bitset>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "zebu/abnf.hpp"

namespace zebu {

using ByteSet = std::bitset<256>;

/// Every byte that can occur anywhere in a derivation of `e`.
ByteSet all_bytes(const Element& e, const Grammar& g);

/// Bytes that can start a non-empty derivation of `e`.
ByteSet first_bytes(const Element& e, const Grammar& g);

/// Length of the shortest derivation.
std::size_t min_length(const Element& e, const Grammar& g);

bool nullable(const Element& e, const Grammar& g);

/// The finite set of strings `e` derives, case preserved as written, or nullopt when the
/// language is infinite or has more than `limit` members. Case-insensitive literals count once.
std::optional<std::vector<std::string>> finite_language(const Element& e, const Grammar& g, std::size_t limit = 256);

/// Rule names referenced anywhere in `e` (not following references), in order of appearance.
std::vector<std::pair<std::string, SourceSpan>> referenced_rules(const Element& e);

}  // namespace zebu
