// SPDX-License-Identifier: Apache-2.0
// Canonical JSON form of a CompiledGrammar: sorted keys, no timestamps, stable indentation.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "zebu/engine.hpp"

namespace zebu {

inline constexpr int kArtifactFormatVersion = 1;

class ArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_artifact(const CompiledGrammar& g);

/// Throws ArtifactError on malformed documents or an unsupported formatVersion. The embedded
/// grammar source is re-parsed to restore `annotated`.
CompiledGrammar load_artifact(std::string_view text);

}  // namespace zebu
