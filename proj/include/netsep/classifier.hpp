#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netsep/network.hpp"

namespace netsep {

/// The four forbidden sub-networks whose presence makes a network inseparable
/// (joint coding across carriers can beat per-carrier coding on them).
enum class ForbiddenKind {
  z_interference,  // 3 edges, cross link carries no message
  x_network,       // 2x2 fully connected, every link a message
  sigma,           // 2 sources / 3 destinations, 4-edge path
  reverse_sigma,   // 3 sources / 2 destinations, 4-edge path
};

const char* to_string(ForbiddenKind kind);

/// Reference topology of each forbidden pattern in its canonical labeling.
const NetworkTopology& canonical_forbidden_topology(ForbiddenKind kind);

/// An embedding of a canonical forbidden pattern into a host network.
/// source_map[k-1] / destination_map[k-1] give the host node playing the role
/// of canonical source/destination k; edges lists the host edges in canonical
/// edge order.
struct WitnessEmbedding {
  ForbiddenKind kind = ForbiddenKind::z_interference;
  std::vector<Edge> edges;
  std::vector<int> source_map;
  std::vector<int> destination_map;
};

/// Checks a witness against its host: maps injective and in range, every
/// canonical edge mapped onto a host edge, and message status matching the
/// canonical pattern (for the Z-interference witness the cross link must not
/// carry a message while the two direct links must). When `why` is non-null it
/// receives the first problem found.
bool witness_is_valid(const NetworkTopology& host, const WitnessEmbedding& witness,
                      std::string* why = nullptr);

/// Details of a separable (MAC-Z-BC) classification. The hub source is the
/// unique transmitter of degree > 1 when one exists; likewise the hub
/// destination on the receiver side. The relabelings are the permutations
/// (original -> canonical) that move the hub destination to index 1 and the
/// hub source to index S; sides without a hub keep the identity.
struct SeparableInfo {
  std::optional<int> hub_source;
  std::optional<int> hub_destination;
  std::vector<int> source_relabeling;
  std::vector<int> destination_relabeling;
};

class ClassificationVerdict {
 public:
  explicit ClassificationVerdict(SeparableInfo info) : value_(std::move(info)) {}
  explicit ClassificationVerdict(WitnessEmbedding witness) : value_(std::move(witness)) {}

  bool separable() const { return std::holds_alternative<SeparableInfo>(value_); }
  const SeparableInfo& separable_info() const { return std::get<SeparableInfo>(value_); }
  const WitnessEmbedding& witness() const { return std::get<WitnessEmbedding>(value_); }

 private:
  std::variant<SeparableInfo, WitnessEmbedding> value_;
};

/// Degree test for the MAC-Z-BC family: every edge carries a message, at most
/// one transmitter has degree > 1 and at most one receiver has degree > 1.
/// Returns the hub/relabeling details on success, nullopt otherwise.
/// Throws Error(validation) on an invalid topology.
std::optional<SeparableInfo> is_mac_z_bc(const NetworkTopology& topology);

/// Constructive search for a forbidden sub-network. Returns nullopt exactly
/// when is_mac_z_bc succeeds. Tie-breaks are always lexicographic so the
/// returned witness is deterministic.
std::optional<WitnessEmbedding> find_forbidden_subnetwork(const NetworkTopology& topology);

/// Exhaustive pattern-containment oracle, independent of
/// find_forbidden_subnetwork: enumerates all injective node correspondences
/// and returns the first embedding of the requested pattern (respecting the
/// message-status constraints), or nullopt. Guarded to hosts with at most 24
/// edges; throws Error(argument) beyond that.
std::optional<WitnessEmbedding> contains_subnetwork_bruteforce(const NetworkTopology& topology,
                                                               ForbiddenKind kind);

/// Full dichotomy: Separable with canonical relabeling, or Inseparable with a
/// constructive witness. Exactly one branch fires for every valid topology.
ClassificationVerdict classify(const NetworkTopology& topology);

}  // namespace netsep
