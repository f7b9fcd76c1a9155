#pragma once

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "netsep/error.hpp"

namespace netsep {

/// A directed link from a source (transmitter) to a destination (receiver).
/// Indices are 1-based everywhere, including serialized files.
struct Edge {
  int destination = 0;  // receiver index j
  int source = 0;       // transmitter index i

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Messages are identified by the (destination, source) pair they ride on.
using MessageId = Edge;

/// Bipartite single-hop network: S transmitters, D receivers, an edge set and
/// a message set (every message travels over an existing edge).
///
/// Instances are immutable after construction and cheap to copy. Construction
/// never validates; call validate() to obtain the list of invariant
/// violations (an empty list means the topology is well-formed).
class NetworkTopology {
 public:
  NetworkTopology(int num_sources, int num_destinations, std::set<Edge> edges,
                  std::set<MessageId> messages)
      : num_sources_(num_sources),
        num_destinations_(num_destinations),
        edges_(std::move(edges)),
        messages_(std::move(messages)) {}

  int num_sources() const { return num_sources_; }
  int num_destinations() const { return num_destinations_; }
  const std::set<Edge>& edges() const { return edges_; }
  const std::set<MessageId>& messages() const { return messages_; }

  bool has_edge(int destination, int source) const {
    return edges_.contains(Edge{destination, source});
  }
  bool has_message(int destination, int source) const {
    return messages_.contains(MessageId{destination, source});
  }

  /// Degree of transmitter i. Throws Error(argument) when out of range.
  int transmitter_degree(int source) const;
  /// Degree of receiver j. Throws Error(argument) when out of range.
  int receiver_degree(int destination) const;

  /// Receivers adjacent to transmitter i, ascending.
  std::vector<int> connected_destinations(int source) const;
  /// Transmitters adjacent to receiver j, ascending.
  std::vector<int> connected_sources(int destination) const;

  friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;

 private:
  int num_sources_;
  int num_destinations_;
  std::set<Edge> edges_;
  std::set<MessageId> messages_;
};

/// Checks every topology invariant: positive node counts, in-range indices,
/// messages being a subset of edges, per-node message coverage, and
/// connectivity of the bipartite graph. Each violation names the offending
/// node or edge. Empty result == valid.
std::vector<std::string> validate(const NetworkTopology& topology);

bool is_valid(const NetworkTopology& topology);

/// Throws Error(validation) listing all violations when the topology is
/// invalid.
void require_valid(const NetworkTopology& topology);

/// Sub-network extraction: removes the given edges and drops any message that
/// rode on them. The result is intentionally NOT re-validated; intermediates
/// may be disconnected and callers re-validate when they need a full network.
/// Throws Error(argument) when a removed edge is not present.
NetworkTopology delete_edges(const NetworkTopology& topology,
                             const std::set<Edge>& removed);

/// Relabels nodes: source i becomes source_perm[i-1], destination j becomes
/// destination_perm[j-1]. Both arguments must be permutations of 1..S / 1..D.
NetworkTopology relabel(const NetworkTopology& topology,
                        std::span<const int> source_perm,
                        std::span<const int> destination_perm);

struct GainKey {
  int destination = 0;
  int source = 0;
  int carrier = 0;

  friend auto operator<=>(const GainKey&, const GainKey&) = default;
};

/// A multi-carrier channel over a (valid) topology: F parallel carriers,
/// per-transmitter power budgets, and sparse complex gains keyed by
/// (destination, source, carrier). Noise is unit variance at every receiver
/// on every carrier. Gains may only sit on existing edges; a stored gain of
/// exactly zero on an edge is legal (a link can fade out on a carrier).
///
/// Construction validates everything and throws Error(validation) listing all
/// problems. Immutable afterwards; safe to share across threads.
class ChannelInstance {
 public:
  ChannelInstance(NetworkTopology topology, int num_carriers,
                  std::vector<double> power_budget,
                  std::map<GainKey, std::complex<double>> gains);

  const NetworkTopology& topology() const { return topology_; }
  int num_carriers() const { return num_carriers_; }
  const std::vector<double>& power_budget() const { return power_budget_; }
  const std::map<GainKey, std::complex<double>>& gains() const { return gains_; }

  /// Complex gain H_{j,i}(f); zero when no entry is stored.
  std::complex<double> gain(int destination, int source, int carrier) const;
  /// |H_{j,i}(f)|^2.
  double gain_power(int destination, int source, int carrier) const;

  friend bool operator==(const ChannelInstance&, const ChannelInstance&) = default;

 private:
  NetworkTopology topology_;
  int num_carriers_;
  std::vector<double> power_budget_;
  std::map<GainKey, std::complex<double>> gains_;
};

/// Relabels an instance along with its topology (gains and budgets move with
/// their nodes).
ChannelInstance relabel(const ChannelInstance& instance,
                        std::span<const int> source_perm,
                        std::span<const int> destination_perm);

}  // namespace netsep
