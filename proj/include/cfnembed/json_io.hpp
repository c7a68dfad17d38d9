// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_JSON_IO_HPP
#define CFNEMBED_JSON_IO_HPP

#include "cfnembed/harness.hpp"

#include <string>
#include <string_view>

namespace cfn {

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::string& path);
/// Writes a whole file; throws IoError.
void write_text_file(const std::string& path, std::string_view text);

// Parsers throw ParseError on malformed documents.
std::string topology_to_json(const CfnTopology& topology);
CfnTopology topology_from_json(std::string_view text);

std::string vsrs_to_json(std::span<const Vsr> vsrs);
std::vector<Vsr> vsrs_from_json(std::string_view text);

std::string solution_to_json(const Substrate& substrate, std::span<const Vsr> vsrs, const Solution& solution);

/// Topology files referenced by the scenario resolve against `base_dir`.
Scenario scenario_from_json(std::string_view text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// Parses a strategy description such as {"kind":"bnb","node_limit":1000}.
Strategy strategy_from_json(std::string_view text);

enum class DocumentKind
{
    Topology,
    VsrBatch,
    Scenario,
};

/// Detects the kind of a JSON document and validates it. Throws ParseError
/// when the document is not one of the known kinds.
ValidationReport validate_document(std::string_view text, const std::string& base_dir, DocumentKind* kind = nullptr);

} // namespace cfn

#endif
