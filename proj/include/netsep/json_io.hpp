#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "netsep/network.hpp"

namespace netsep {

struct ParsedNetwork {
  NetworkTopology topology;
  std::optional<ChannelInstance> instance;
};

/// Parses the network/instance schema:
///   {"S": int, "D": int, "edges": [[j,i],...], "messages": [[j,i],...],
///    "channel": {"F": int, "powers": [...],
///                "gains": [{"rx": j, "tx": i, "carrier": f, "re": x, "im": y}, ...]}}
/// "channel" is optional; "im" defaults to 0. Indices are 1-based. Structural
/// problems (bad JSON, wrong types, unknown or duplicate fields) raise
/// Error(io) with the offending path; invariant violations raise
/// Error(validation) listing every violation.
ParsedNetwork parse_network_json(const std::string& text);

ParsedNetwork load_network_file(const std::string& path);

/// Serializes back to the same schema. Round-trips exactly: parsing the output
/// reproduces the input structure (numbers are written with up to 17
/// significant digits, enough to restore every double bit-for-bit).
std::string network_to_json(const NetworkTopology& topology,
                            const ChannelInstance* instance = nullptr);

/// Deterministic pretty printer used for all machine-readable output:
/// insertion-ordered objects, two-space indent, floating-point numbers
/// rendered with %.17g.
std::string dump_json(const nlohmann::ordered_json& value);

}  // namespace netsep
