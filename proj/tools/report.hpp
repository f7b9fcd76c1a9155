#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netsep.h"

namespace netsep_cli {

using ojson = nlohmann::ordered_json;

struct Request {
  std::string command;
  std::string input_path;
  std::string output_path;
  std::string format = "json";    // json | csv
  std::string log_base = "2";     // 2 | e
  double tolerance = 1e-9;
  long max_iterations = 100000;
  std::string pgrid = "1e3:1e9:7";
  long seed = 0;
  std::string kind;  // x | sigma | rsigma, when relevant
};

/// "lo:hi:n" -> log-spaced grid. Throws std::runtime_error on bad syntax.
std::vector<double> parse_power_grid(const std::string& spec);

netsep_log_base log_base_of(const Request& request);

/// Report skeleton: schema version, tool identity, and the echoed request.
ojson report_header(const Request& request);

/// Parses the library's serialized network so it can be embedded in a report.
ojson network_echo(const netsep_network* network);

ojson verdict_json(const netsep_verdict* verdict);
ojson capacity_json(const netsep_capacity* capacity, const netsep_network* network);
ojson gap_json(const netsep_gap* gap, bool fit_only);

/// Deterministic pretty JSON: insertion order kept, doubles via %.17g.
std::string dump_report(const ojson& report);

/// Gap/DoF tables as CSV (columns P, joint_rate, separate_bound).
std::string gap_csv(const netsep_gap* gap);

/// Writes to `path`, or stdout when empty.
void emit(const std::string& text, const std::string& path);

}  // namespace netsep_cli
