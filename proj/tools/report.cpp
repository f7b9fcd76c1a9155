#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace netsep_cli {

std::vector<double> parse_power_grid(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  int points = 0;
  char trailing = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &points, &trailing) != 3)
    throw std::runtime_error("bad --pgrid, expected lo:hi:npoints (e.g. 1e3:1e9:7)");
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw std::runtime_error("bad --pgrid: need 0 < lo < hi and at least 2 points");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

netsep_log_base log_base_of(const Request& request) {
  return request.log_base == "e" ? NETSEP_LOG_BASE_E : NETSEP_LOG_BASE_2;
}

ojson report_header(const Request& request) {
  ojson report;
  report["schema_version"] = 1;
  report["tool"] = {{"name", "netsep"}, {"version", netsep_version()}};
  report["command"] = request.command;
  ojson echo;
  echo["input"] = request.input_path;
  echo["output"] = request.output_path;
  echo["format"] = request.format;
  echo["log_base"] = request.log_base;
  echo["tolerance"] = request.tolerance;
  echo["max_iterations"] = request.max_iterations;
  echo["pgrid"] = request.pgrid;
  echo["seed"] = request.seed;
  if (!request.kind.empty()) echo["kind"] = request.kind;
  report["request"] = std::move(echo);
  return report;
}

ojson network_echo(const netsep_network* network) {
  char* text = nullptr;
  if (netsep_network_to_json(network, &text) != NETSEP_OK) return nullptr;
  ojson parsed = ojson::parse(text);
  netsep_string_free(text);
  return parsed;
}

namespace {

const char* kind_name(netsep_witness_kind kind) {
  switch (kind) {
    case NETSEP_WITNESS_Z_INTERFERENCE: return "z_interference";
    case NETSEP_WITNESS_X_NETWORK: return "x_network";
    case NETSEP_WITNESS_SIGMA: return "sigma";
    case NETSEP_WITNESS_REVERSE_SIGMA: return "reverse_sigma";
  }
  return "unknown";
}

}  // namespace

ojson verdict_json(const netsep_verdict* verdict) {
  ojson out;
  if (netsep_verdict_is_separable(verdict)) {
    out["separable"] = true;
    int hub_source = netsep_verdict_hub_source(verdict);
    int hub_destination = netsep_verdict_hub_destination(verdict);
    out["hub_source"] = hub_source ? ojson(hub_source) : ojson(nullptr);
    out["hub_destination"] = hub_destination ? ojson(hub_destination) : ojson(nullptr);
    return out;
  }
  out["separable"] = false;
  netsep_witness_kind kind;
  netsep_verdict_witness_kind(verdict, &kind);
  ojson witness;
  witness["kind"] = kind_name(kind);
  ojson edges = ojson::array();
  for (int k = 0; k < netsep_verdict_witness_num_edges(verdict); ++k) {
    int rx = 0, tx = 0;
    netsep_verdict_witness_edge(verdict, k, &rx, &tx);
    edges.push_back({rx, tx});
  }
  witness["edges"] = std::move(edges);
  ojson source_map = ojson::array();
  for (int k = 1; k <= netsep_verdict_witness_num_sources(verdict); ++k)
    source_map.push_back(netsep_verdict_witness_source_map(verdict, k));
  witness["source_map"] = std::move(source_map);
  ojson destination_map = ojson::array();
  for (int k = 1; k <= netsep_verdict_witness_num_destinations(verdict); ++k)
    destination_map.push_back(netsep_verdict_witness_destination_map(verdict, k));
  witness["destination_map"] = std::move(destination_map);
  out["witness"] = std::move(witness);
  return out;
}

ojson capacity_json(const netsep_capacity* capacity, const netsep_network* network) {
  ojson out;
  out["total"] = netsep_capacity_total(capacity);
  ojson per_carrier = ojson::array();
  for (int f = 1; f <= netsep_network_num_carriers(network); ++f)
    per_carrier.push_back(netsep_capacity_per_carrier(capacity, f));
  out["per_carrier"] = std::move(per_carrier);

  ojson allocation = ojson::array();
  for (int j = 1; j <= netsep_network_num_sources(network); ++j) {
    ojson row = ojson::array();
    for (int f = 1; f <= netsep_network_num_carriers(network); ++f)
      row.push_back(netsep_capacity_allocation(capacity, j, f));
    allocation.push_back(std::move(row));
  }
  out["allocation"] = std::move(allocation);

  ojson rates = ojson::array();
  for (int k = 0; k < netsep_capacity_num_messages(capacity); ++k) {
    int rx = 0, tx = 0;
    double rate = 0.0;
    netsep_capacity_message_rate(capacity, k, &rx, &tx, &rate);
    rates.push_back({{"rx", rx}, {"tx", tx}, {"rate", rate}});
  }
  out["message_rates"] = std::move(rates);

  ojson canonical_sources = ojson::array();
  for (int i = 1; i <= netsep_network_num_sources(network); ++i)
    canonical_sources.push_back(netsep_capacity_canonical_source(capacity, i));
  out["canonical_source_map"] = std::move(canonical_sources);
  ojson canonical_destinations = ojson::array();
  for (int j = 1; j <= netsep_network_num_destinations(network); ++j)
    canonical_destinations.push_back(netsep_capacity_canonical_destination(capacity, j));
  out["canonical_destination_map"] = std::move(canonical_destinations);

  out["kkt_residual"] = netsep_capacity_kkt_residual(capacity);
  out["converged"] = netsep_capacity_converged(capacity) != 0;
  out["iterations"] = netsep_capacity_iterations(capacity);
  return out;
}

ojson gap_json(const netsep_gap* gap, bool fit_only) {
  ojson out;
  out["separate_dof"] = netsep_gap_separate_dof(gap);
  out["dof_fit"] = {{"slope", netsep_gap_slope(gap)},
                    {"intercept", netsep_gap_intercept(gap)},
                    {"residual", netsep_gap_fit_residual(gap)}};
  if (netsep_gap_has_crossover(gap))
    out["crossover_power"] = netsep_gap_crossover_power(gap);
  else
    out["crossover_power"] = nullptr;
  ojson points = ojson::array();
  for (int k = 0; k < netsep_gap_num_points(gap); ++k) {
    double power = 0.0, joint = 0.0, bound = 0.0;
    netsep_gap_point(gap, k, &power, &joint, &bound);
    if (fit_only)
      points.push_back({{"power", power}, {"sum_rate", joint}});
    else
      points.push_back(
          {{"power", power}, {"joint_rate", joint}, {"separate_bound", bound}});
  }
  out["points"] = std::move(points);
  return out;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump_value(const ojson& v, std::string& out, int depth) {
  const std::string pad(static_cast<size_t>(depth) * 2, ' ');
  const std::string inner_pad(static_cast<size_t>(depth + 1) * 2, ' ');
  switch (v.type()) {
    case ojson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t k = 0;
      for (const auto& [key, value] : v.items()) {
        out += inner_pad;
        out += ojson(key).dump();
        out += ": ";
        dump_value(value, out, depth + 1);
        if (++k < v.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case ojson::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      bool scalar_only = true;
      for (const auto& item : v)
        if (item.is_object() || item.is_array()) scalar_only = false;
      if (scalar_only && v.size() <= 8) {
        out += "[";
        for (size_t k = 0; k < v.size(); ++k) {
          if (k) out += ", ";
          dump_value(v[k], out, depth);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t k = 0; k < v.size(); ++k) {
        out += inner_pad;
        dump_value(v[k], out, depth + 1);
        if (k + 1 < v.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case ojson::value_t::string:
      out += v.dump();
      return;
    case ojson::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case ojson::value_t::number_integer:
      out += std::to_string(v.get<long long>());
      return;
    case ojson::value_t::number_unsigned:
      out += std::to_string(v.get<unsigned long long>());
      return;
    case ojson::value_t::number_float:
      append_double(out, v.get<double>());
      return;
    case ojson::value_t::null:
      out += "null";
      return;
    default:
      throw std::runtime_error("unsupported JSON value in report");
  }
}

}  // namespace

std::string dump_report(const ojson& report) {
  std::string out;
  dump_value(report, out, 0);
  out += "\n";
  return out;
}

std::string gap_csv(const netsep_gap* gap) {
  std::string out = "P,joint_rate,separate_bound\n";
  for (int k = 0; k < netsep_gap_num_points(gap); ++k) {
    double power = 0.0, joint = 0.0, bound = 0.0;
    netsep_gap_point(gap, k, &power, &joint, &bound);
    append_double(out, power);
    out += ",";
    append_double(out, joint);
    out += ",";
    append_double(out, bound);
    out += "\n";
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

}  // namespace netsep_cli
