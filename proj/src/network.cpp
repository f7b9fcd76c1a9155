#include "netsep/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace netsep {

namespace {

std::string edge_str(const Edge& e) {
  std::ostringstream os;
  os << "(" << e.destination << "," << e.source << ")";
  return os.str();
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

}  // namespace

int NetworkTopology::transmitter_degree(int source) const {
  if (source < 1 || source > num_sources_)
    throw Error(ErrorCode::argument,
                "transmitter index " + std::to_string(source) + " out of range [1.." +
                    std::to_string(num_sources_) + "]");
  int deg = 0;
  for (const Edge& e : edges_)
    if (e.source == source) ++deg;
  return deg;
}

int NetworkTopology::receiver_degree(int destination) const {
  if (destination < 1 || destination > num_destinations_)
    throw Error(ErrorCode::argument,
                "receiver index " + std::to_string(destination) + " out of range [1.." +
                    std::to_string(num_destinations_) + "]");
  int deg = 0;
  for (const Edge& e : edges_)
    if (e.destination == destination) ++deg;
  return deg;
}

std::vector<int> NetworkTopology::connected_destinations(int source) const {
  std::vector<int> out;
  for (const Edge& e : edges_)
    if (e.source == source) out.push_back(e.destination);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> NetworkTopology::connected_sources(int destination) const {
  std::vector<int> out;
  for (const Edge& e : edges_)
    if (e.destination == destination) out.push_back(e.source);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> validate(const NetworkTopology& t) {
  std::vector<std::string> violations;
  const int S = t.num_sources();
  const int D = t.num_destinations();

  if (S < 1) violations.push_back("num_sources must be positive, got " + std::to_string(S));
  if (D < 1)
    violations.push_back("num_destinations must be positive, got " + std::to_string(D));
  if (S < 1 || D < 1) return violations;

  bool indices_ok = true;
  for (const Edge& e : t.edges()) {
    if (e.destination < 1 || e.destination > D || e.source < 1 || e.source > S) {
      violations.push_back("edge " + edge_str(e) + ": index out of range [1.." +
                           std::to_string(D) + "]x[1.." + std::to_string(S) + "]");
      indices_ok = false;
    }
  }
  for (const MessageId& m : t.messages()) {
    if (m.destination < 1 || m.destination > D || m.source < 1 || m.source > S) {
      violations.push_back("message " + edge_str(m) + ": index out of range");
      indices_ok = false;
      continue;
    }
    if (!t.edges().contains(m))
      violations.push_back("message " + edge_str(m) +
                           " is not an edge (messages must be a subset of edges)");
  }

  // Every node must anchor at least one message.
  for (int i = 1; i <= S; ++i) {
    bool covered = false;
    for (const MessageId& m : t.messages())
      if (m.source == i) covered = true;
    if (!covered)
      violations.push_back("source " + std::to_string(i) + ": no message originates here");
  }
  for (int j = 1; j <= D; ++j) {
    bool covered = false;
    for (const MessageId& m : t.messages())
      if (m.destination == j) covered = true;
    if (!covered)
      violations.push_back("destination " + std::to_string(j) + ": no message terminates here");
  }

  // Connectivity over sources (nodes 0..S-1) and destinations (S..S+D-1).
  if (indices_ok) {
    const int n = S + D;
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : t.edges()) {
      int u = e.source - 1;
      int v = S + e.destination - 1;
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
    }
    std::vector<std::string> unreachable;
    for (int u = 0; u < n; ++u)
      if (!seen[u])
        unreachable.push_back(u < S ? "T" + std::to_string(u + 1)
                                    : "R" + std::to_string(u - S + 1));
    if (!unreachable.empty())
      violations.push_back("graph is disconnected: {" + join(unreachable, ", ") +
                           "} unreachable from T1");
  }

  return violations;
}

bool is_valid(const NetworkTopology& topology) { return validate(topology).empty(); }

void require_valid(const NetworkTopology& topology) {
  auto violations = validate(topology);
  if (!violations.empty())
    throw Error(ErrorCode::validation, "invalid topology: " + join(violations, "; "));
}

NetworkTopology delete_edges(const NetworkTopology& t, const std::set<Edge>& removed) {
  for (const Edge& e : removed)
    if (!t.edges().contains(e))
      throw Error(ErrorCode::argument, "cannot delete edge " + edge_str(e) + ": not present");
  std::set<Edge> edges;
  for (const Edge& e : t.edges())
    if (!removed.contains(e)) edges.insert(e);
  std::set<MessageId> messages;
  for (const MessageId& m : t.messages())
    if (edges.contains(m)) messages.insert(m);
  return NetworkTopology(t.num_sources(), t.num_destinations(), std::move(edges),
                         std::move(messages));
}

namespace {

void check_permutation(std::span<const int> perm, int n, const char* what) {
  if (static_cast<int>(perm.size()) != n)
    throw Error(ErrorCode::argument,
                std::string(what) + " permutation has size " + std::to_string(perm.size()) +
                    ", expected " + std::to_string(n));
  std::vector<bool> hit(n, false);
  for (int v : perm) {
    if (v < 1 || v > n || hit[v - 1])
      throw Error(ErrorCode::argument, std::string(what) + " relabeling is not a permutation");
    hit[v - 1] = true;
  }
}

}  // namespace

NetworkTopology relabel(const NetworkTopology& t, std::span<const int> source_perm,
                        std::span<const int> destination_perm) {
  check_permutation(source_perm, t.num_sources(), "source");
  check_permutation(destination_perm, t.num_destinations(), "destination");
  std::set<Edge> edges;
  for (const Edge& e : t.edges())
    edges.insert(Edge{destination_perm[e.destination - 1], source_perm[e.source - 1]});
  std::set<MessageId> messages;
  for (const MessageId& m : t.messages())
    messages.insert(MessageId{destination_perm[m.destination - 1], source_perm[m.source - 1]});
  return NetworkTopology(t.num_sources(), t.num_destinations(), std::move(edges),
                         std::move(messages));
}

ChannelInstance::ChannelInstance(NetworkTopology topology, int num_carriers,
                                 std::vector<double> power_budget,
                                 std::map<GainKey, std::complex<double>> gains)
    : topology_(std::move(topology)),
      num_carriers_(num_carriers),
      power_budget_(std::move(power_budget)),
      gains_(std::move(gains)) {
  std::vector<std::string> problems = validate(topology_);
  if (num_carriers_ < 1)
    problems.push_back("num_carriers must be positive, got " + std::to_string(num_carriers_));
  if (static_cast<int>(power_budget_.size()) != topology_.num_sources())
    problems.push_back("power budget has " + std::to_string(power_budget_.size()) +
                       " entries, expected one per source (" +
                       std::to_string(topology_.num_sources()) + ")");
  for (size_t i = 0; i < power_budget_.size(); ++i)
    if (!std::isfinite(power_budget_[i]) || power_budget_[i] < 0)
      problems.push_back("power budget for source " + std::to_string(i + 1) +
                         " must be finite and nonnegative");
  for (const auto& [key, value] : gains_) {
    std::string where = "gain (" + std::to_string(key.destination) + "," +
                        std::to_string(key.source) + "," + std::to_string(key.carrier) + ")";
    if (key.carrier < 1 || key.carrier > num_carriers_)
      problems.push_back(where + ": carrier out of range [1.." +
                         std::to_string(num_carriers_) + "]");
    if (!topology_.has_edge(key.destination, key.source))
      problems.push_back(where + ": no such edge in the topology");
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      problems.push_back(where + ": value must be finite");
  }
  if (!problems.empty())
    throw Error(ErrorCode::validation, "invalid channel instance: " + join(problems, "; "));
}

std::complex<double> ChannelInstance::gain(int destination, int source, int carrier) const {
  auto it = gains_.find(GainKey{destination, source, carrier});
  return it == gains_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

double ChannelInstance::gain_power(int destination, int source, int carrier) const {
  return std::norm(gain(destination, source, carrier));
}

ChannelInstance relabel(const ChannelInstance& instance, std::span<const int> source_perm,
                        std::span<const int> destination_perm) {
  NetworkTopology topo = relabel(instance.topology(), source_perm, destination_perm);
  std::vector<double> budget(instance.power_budget().size());
  for (size_t i = 0; i < budget.size(); ++i)
    budget[source_perm[i] - 1] = instance.power_budget()[i];
  std::map<GainKey, std::complex<double>> gains;
  for (const auto& [key, value] : instance.gains())
    gains.emplace(GainKey{destination_perm[key.destination - 1], source_perm[key.source - 1],
                          key.carrier},
                  value);
  return ChannelInstance(std::move(topo), instance.num_carriers(), std::move(budget),
                         std::move(gains));
}

}  // namespace netsep
