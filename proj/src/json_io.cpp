#include "netsep/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace netsep {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void fail_io(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::io, path.empty() ? what : path + ": " + what);
}

const ojson& expect_member(const ojson& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail_io(path, std::string("missing required field \"") + key + "\"");
  return *it;
}

int expect_int(const ojson& v, const std::string& path) {
  if (!v.is_number_integer()) fail_io(path, "expected an integer");
  return v.get<int>();
}

double expect_number(const ojson& v, const std::string& path) {
  if (!v.is_number()) fail_io(path, "expected a number");
  return v.get<double>();
}

void reject_unknown_keys(const ojson& obj, const std::string& path,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) fail_io(path + "." + key, "unknown field");
  }
}

std::set<Edge> expect_edge_list(const ojson& v, const std::string& path) {
  if (!v.is_array()) fail_io(path, "expected an array of [destination, source] pairs");
  std::set<Edge> out;
  for (size_t k = 0; k < v.size(); ++k) {
    std::string where = path + "[" + std::to_string(k) + "]";
    const ojson& pair = v[k];
    if (!pair.is_array() || pair.size() != 2)
      fail_io(where, "expected a [destination, source] pair");
    Edge e{expect_int(pair[0], where), expect_int(pair[1], where)};
    if (!out.insert(e).second) fail_io(where, "duplicate entry");
  }
  return out;
}

}  // namespace

ParsedNetwork parse_network_json(const std::string& text) {
  ojson root;
  try {
    root = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::io, std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) fail_io("", "top level must be a JSON object");
  reject_unknown_keys(root, "$", {"S", "D", "edges", "messages", "channel"});

  int S = expect_int(expect_member(root, "$", "S"), "$.S");
  int D = expect_int(expect_member(root, "$", "D"), "$.D");
  std::set<Edge> edges = expect_edge_list(expect_member(root, "$", "edges"), "$.edges");
  std::set<MessageId> messages =
      expect_edge_list(expect_member(root, "$", "messages"), "$.messages");

  NetworkTopology topology(S, D, std::move(edges), std::move(messages));
  require_valid(topology);

  ParsedNetwork parsed{std::move(topology), std::nullopt};
  auto channel_it = root.find("channel");
  if (channel_it == root.end()) return parsed;

  const ojson& channel = *channel_it;
  if (!channel.is_object()) fail_io("$.channel", "expected an object");
  reject_unknown_keys(channel, "$.channel", {"F", "powers", "gains"});
  int F = expect_int(expect_member(channel, "$.channel", "F"), "$.channel.F");

  const ojson& powers_json = expect_member(channel, "$.channel", "powers");
  if (!powers_json.is_array()) fail_io("$.channel.powers", "expected an array");
  std::vector<double> powers;
  for (size_t k = 0; k < powers_json.size(); ++k)
    powers.push_back(
        expect_number(powers_json[k], "$.channel.powers[" + std::to_string(k) + "]"));

  const ojson& gains_json = expect_member(channel, "$.channel", "gains");
  if (!gains_json.is_array()) fail_io("$.channel.gains", "expected an array");
  std::map<GainKey, std::complex<double>> gains;
  for (size_t k = 0; k < gains_json.size(); ++k) {
    std::string where = "$.channel.gains[" + std::to_string(k) + "]";
    const ojson& entry = gains_json[k];
    if (!entry.is_object()) fail_io(where, "expected an object");
    reject_unknown_keys(entry, where, {"rx", "tx", "carrier", "re", "im"});
    GainKey key{expect_int(expect_member(entry, where, "rx"), where + ".rx"),
                expect_int(expect_member(entry, where, "tx"), where + ".tx"),
                expect_int(expect_member(entry, where, "carrier"), where + ".carrier")};
    double re = expect_number(expect_member(entry, where, "re"), where + ".re");
    double im = entry.contains("im") ? expect_number(entry["im"], where + ".im") : 0.0;
    if (!gains.emplace(key, std::complex<double>(re, im)).second)
      fail_io(where, "duplicate gain entry for this (rx, tx, carrier)");
  }

  parsed.instance.emplace(parsed.topology, F, std::move(powers), std::move(gains));
  return parsed;
}

ParsedNetwork load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_network_json(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

namespace {

void append_double(std::string& out, double v) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::argument, "refusing to serialize a non-finite number");
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
      // Short arrays of scalars stay on one line.
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
      throw Error(ErrorCode::argument, "unsupported JSON value type");
  }
}

}  // namespace

std::string dump_json(const ojson& value) {
  std::string out;
  dump_value(value, out, 0);
  out += "\n";
  return out;
}

std::string network_to_json(const NetworkTopology& topology, const ChannelInstance* instance) {
  ojson root;
  root["S"] = topology.num_sources();
  root["D"] = topology.num_destinations();
  ojson edges = ojson::array();
  for (const Edge& e : topology.edges()) edges.push_back({e.destination, e.source});
  root["edges"] = std::move(edges);
  ojson messages = ojson::array();
  for (const MessageId& m : topology.messages()) messages.push_back({m.destination, m.source});
  root["messages"] = std::move(messages);

  if (instance) {
    ojson channel;
    channel["F"] = instance->num_carriers();
    ojson powers = ojson::array();
    for (double p : instance->power_budget()) powers.push_back(p);
    channel["powers"] = std::move(powers);
    ojson gains = ojson::array();
    for (const auto& [key, value] : instance->gains()) {
      ojson entry;
      entry["rx"] = key.destination;
      entry["tx"] = key.source;
      entry["carrier"] = key.carrier;
      entry["re"] = value.real();
      entry["im"] = value.imag();
      gains.push_back(std::move(entry));
    }
    channel["gains"] = std::move(gains);
    root["channel"] = std::move(channel);
  }
  return dump_json(root);
}

}  // namespace netsep
