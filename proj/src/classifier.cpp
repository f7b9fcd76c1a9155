#include "netsep/classifier.hpp"

#include <algorithm>
#include <queue>

namespace netsep {

const char* to_string(ForbiddenKind kind) {
  switch (kind) {
    case ForbiddenKind::z_interference: return "z_interference";
    case ForbiddenKind::x_network: return "x_network";
    case ForbiddenKind::sigma: return "sigma";
    case ForbiddenKind::reverse_sigma: return "reverse_sigma";
  }
  return "unknown";
}

const NetworkTopology& canonical_forbidden_topology(ForbiddenKind kind) {
  static const NetworkTopology z_interference(
      2, 2, {{1, 1}, {1, 2}, {2, 2}}, {{1, 1}, {2, 2}});
  static const NetworkTopology x_network(
      2, 2, {{1, 1}, {1, 2}, {2, 1}, {2, 2}}, {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  static const NetworkTopology sigma(
      2, 3, {{1, 1}, {2, 1}, {2, 2}, {3, 2}}, {{1, 1}, {2, 1}, {2, 2}, {3, 2}});
  static const NetworkTopology reverse_sigma(
      3, 2, {{1, 1}, {1, 2}, {2, 2}, {2, 3}}, {{1, 1}, {1, 2}, {2, 2}, {2, 3}});
  switch (kind) {
    case ForbiddenKind::z_interference: return z_interference;
    case ForbiddenKind::x_network: return x_network;
    case ForbiddenKind::sigma: return sigma;
    case ForbiddenKind::reverse_sigma: return reverse_sigma;
  }
  throw Error(ErrorCode::argument, "unknown forbidden kind");
}

namespace {

std::string edge_str(const Edge& e) {
  return "(" + std::to_string(e.destination) + "," + std::to_string(e.source) + ")";
}

bool injective_in_range(const std::vector<int>& map, int limit) {
  for (size_t a = 0; a < map.size(); ++a) {
    if (map[a] < 1 || map[a] > limit) return false;
    for (size_t b = a + 1; b < map.size(); ++b)
      if (map[a] == map[b]) return false;
  }
  return true;
}

// Message status required of each canonical edge: in canonical patterns every
// edge is a message except the Z-interference cross link (1,2).
bool edge_needs_message(ForbiddenKind kind, const Edge& canonical_edge) {
  return !(kind == ForbiddenKind::z_interference && canonical_edge == Edge{1, 2});
}

std::vector<int> identity_perm(int n) {
  std::vector<int> p(n);
  for (int k = 0; k < n; ++k) p[k] = k + 1;
  return p;
}

NetworkTopology transpose(const NetworkTopology& t) {
  std::set<Edge> edges;
  for (const Edge& e : t.edges()) edges.insert(Edge{e.source, e.destination});
  std::set<MessageId> messages;
  for (const MessageId& m : t.messages()) messages.insert(MessageId{m.source, m.destination});
  return NetworkTopology(t.num_destinations(), t.num_sources(), std::move(edges),
                         std::move(messages));
}

// Transposing a pattern swaps the two path-shaped kinds and fixes the rest
// (the canonical sigma and reverse-sigma edge sets are each other's
// transposes under identity node maps).
ForbiddenKind transpose_kind(ForbiddenKind kind) {
  if (kind == ForbiddenKind::sigma) return ForbiddenKind::reverse_sigma;
  if (kind == ForbiddenKind::reverse_sigma) return ForbiddenKind::sigma;
  return kind;
}

WitnessEmbedding transpose_witness(const WitnessEmbedding& w) {
  WitnessEmbedding out;
  out.kind = transpose_kind(w.kind);
  out.source_map = w.destination_map;
  out.destination_map = w.source_map;
  for (const Edge& ce : canonical_forbidden_topology(out.kind).edges())
    out.edges.push_back(Edge{out.destination_map[ce.destination - 1],
                             out.source_map[ce.source - 1]});
  return out;
}

WitnessEmbedding make_witness(ForbiddenKind kind, std::vector<int> source_map,
                              std::vector<int> destination_map) {
  WitnessEmbedding w;
  w.kind = kind;
  w.source_map = std::move(source_map);
  w.destination_map = std::move(destination_map);
  for (const Edge& ce : canonical_forbidden_topology(kind).edges())
    w.edges.push_back(Edge{w.destination_map[ce.destination - 1], w.source_map[ce.source - 1]});
  return w;
}

// Shortest path between two receivers in the bipartite graph, neighbors
// visited in ascending index order. Returns the node sequence
// (receiver, source, receiver, ...); shortest implies cycle-free and the hop
// count is even because both endpoints are receivers.
std::vector<int> receiver_path(const NetworkTopology& t, int from_destination,
                               int to_destination) {
  const int S = t.num_sources();
  const int n = S + t.num_destinations();
  auto node = [&](bool is_destination, int index) {
    return is_destination ? S + index - 1 : index - 1;
  };
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : t.edges()) {
    adj[node(false, e.source)].push_back(node(true, e.destination));
    adj[node(true, e.destination)].push_back(node(false, e.source));
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<int> parent(n, -2);
  std::queue<int> q;
  int start = node(true, from_destination);
  int goal = node(true, to_destination);
  parent[start] = -1;
  q.push(start);
  while (!q.empty() && parent[goal] == -2) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (parent[v] == -2) {
        parent[v] = u;
        q.push(v);
      }
  }
  std::vector<int> path;
  if (parent[goal] == -2) return path;  // caller guarantees connectivity
  for (int u = goal; u != -1; u = parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

// The two-hub-transmitter case: builds an X, sigma, or reverse-sigma witness
// depending on how the neighborhoods of the two smallest hubs overlap.
WitnessEmbedding two_transmitter_hub_witness(const NetworkTopology& t, int hub_a, int hub_b) {
  std::vector<int> da = t.connected_destinations(hub_a);
  std::vector<int> db = t.connected_destinations(hub_b);
  std::vector<int> common;
  std::set_intersection(da.begin(), da.end(), db.begin(), db.end(),
                        std::back_inserter(common));

  if (common.size() >= 2)
    return make_witness(ForbiddenKind::x_network, {hub_a, hub_b}, {common[0], common[1]});

  if (common.size() == 1) {
    const int shared = common[0];
    int left = 0, right = 0;
    for (int d : da)
      if (d != shared) {
        left = d;
        break;
      }
    for (int d : db)
      if (d != shared) {
        right = d;
        break;
      }
    return make_witness(ForbiddenKind::sigma, {hub_a, hub_b}, {left, shared, right});
  }

  // Disjoint neighborhoods: walk the shortest receiver-to-receiver path. Two
  // hops means a shared relay transmitter (reverse-sigma); longer paths yield
  // a sigma from their first four edges.
  const int left = da.front();
  const int right = db.front();
  std::vector<int> path = receiver_path(t, left, right);
  const int S = t.num_sources();
  if (path.size() == 3) {
    int relay = path[1] + 1;  // source node
    return make_witness(ForbiddenKind::reverse_sigma, {hub_a, relay, hub_b}, {left, right});
  }
  // Node sequence: receiver, source, receiver, source, receiver, ...
  int r1 = path[0] - S + 1;
  int s1 = path[1] + 1;
  int r2 = path[2] - S + 1;
  int s2 = path[3] + 1;
  int r3 = path[4] - S + 1;
  return make_witness(ForbiddenKind::sigma, {s1, s2}, {r1, r2, r3});
}

}  // namespace

bool witness_is_valid(const NetworkTopology& host, const WitnessEmbedding& w,
                      std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  const NetworkTopology& pattern = canonical_forbidden_topology(w.kind);
  if (static_cast<int>(w.source_map.size()) != pattern.num_sources() ||
      static_cast<int>(w.destination_map.size()) != pattern.num_destinations())
    return fail("node map size does not match the canonical pattern");
  if (!injective_in_range(w.source_map, host.num_sources()))
    return fail("source map is not injective into the host sources");
  if (!injective_in_range(w.destination_map, host.num_destinations()))
    return fail("destination map is not injective into the host destinations");

  std::vector<Edge> expected;
  for (const Edge& ce : pattern.edges()) {
    Edge he{w.destination_map[ce.destination - 1], w.source_map[ce.source - 1]};
    expected.push_back(he);
    if (!host.edges().contains(he))
      return fail("mapped edge " + edge_str(he) + " is not a host edge");
    bool needs_message = edge_needs_message(w.kind, ce);
    if (needs_message && !host.messages().contains(he))
      return fail("mapped edge " + edge_str(he) + " must carry a message but does not");
    if (!needs_message && host.messages().contains(he))
      return fail("cross link " + edge_str(he) + " must not carry a message but does");
  }
  if (w.edges != expected) return fail("edge list is not the image of the canonical edges");
  return true;
}

std::optional<SeparableInfo> is_mac_z_bc(const NetworkTopology& t) {
  require_valid(t);
  if (t.messages() != t.edges()) return std::nullopt;

  std::vector<int> source_hubs, destination_hubs;
  for (int i = 1; i <= t.num_sources(); ++i)
    if (t.transmitter_degree(i) > 1) source_hubs.push_back(i);
  for (int j = 1; j <= t.num_destinations(); ++j)
    if (t.receiver_degree(j) > 1) destination_hubs.push_back(j);
  if (source_hubs.size() > 1 || destination_hubs.size() > 1) return std::nullopt;

  SeparableInfo info;
  info.source_relabeling = identity_perm(t.num_sources());
  info.destination_relabeling = identity_perm(t.num_destinations());
  if (!source_hubs.empty()) {
    info.hub_source = source_hubs.front();
    std::swap(info.source_relabeling[*info.hub_source - 1],
              info.source_relabeling[t.num_sources() - 1]);
  }
  if (!destination_hubs.empty()) {
    info.hub_destination = destination_hubs.front();
    std::swap(info.destination_relabeling[*info.hub_destination - 1],
              info.destination_relabeling[0]);
  }
  return info;
}

std::optional<WitnessEmbedding> find_forbidden_subnetwork(const NetworkTopology& t) {
  require_valid(t);

  // An edge without a message, together with a message into its receiver and
  // a message out of its transmitter, is a Z-interference pattern.
  for (const Edge& cross : t.edges()) {
    if (t.messages().contains(cross)) continue;
    int direct_source = 0, direct_destination = 0;
    for (const MessageId& m : t.messages()) {
      if (m.destination == cross.destination && direct_source == 0) direct_source = m.source;
      if (m.source == cross.source && direct_destination == 0)
        direct_destination = m.destination;
    }
    return make_witness(ForbiddenKind::z_interference, {direct_source, cross.source},
                        {cross.destination, direct_destination});
  }

  std::vector<int> source_hubs, destination_hubs;
  for (int i = 1; i <= t.num_sources(); ++i)
    if (t.transmitter_degree(i) > 1) source_hubs.push_back(i);
  for (int j = 1; j <= t.num_destinations(); ++j)
    if (t.receiver_degree(j) > 1) destination_hubs.push_back(j);

  if (source_hubs.size() > 1)
    return two_transmitter_hub_witness(t, source_hubs[0], source_hubs[1]);
  if (destination_hubs.size() > 1) {
    NetworkTopology flipped = transpose(t);
    WitnessEmbedding w =
        two_transmitter_hub_witness(flipped, destination_hubs[0], destination_hubs[1]);
    return transpose_witness(w);
  }
  return std::nullopt;
}

std::optional<WitnessEmbedding> contains_subnetwork_bruteforce(const NetworkTopology& t,
                                                               ForbiddenKind kind) {
  require_valid(t);
  if (t.edges().size() > 24)
    throw Error(ErrorCode::argument,
                "brute-force search is guarded to hosts with at most 24 edges, got " +
                    std::to_string(t.edges().size()));

  const NetworkTopology& pattern = canonical_forbidden_topology(kind);
  const int ps = pattern.num_sources();
  const int pd = pattern.num_destinations();
  if (t.num_sources() < ps || t.num_destinations() < pd) return std::nullopt;

  // All ordered injective assignments of canonical nodes to host nodes, in
  // lexicographic order.
  std::vector<int> smap(ps), dmap(pd);
  std::optional<WitnessEmbedding> found;

  auto matches = [&]() {
    for (const Edge& ce : pattern.edges()) {
      Edge he{dmap[ce.destination - 1], smap[ce.source - 1]};
      if (!t.edges().contains(he)) return false;
      if (edge_needs_message(kind, ce) != t.messages().contains(he)) return false;
    }
    return true;
  };

  auto assign_destinations = [&](auto&& self, int level) -> bool {
    if (level == pd) return matches();
    for (int j = 1; j <= t.num_destinations(); ++j) {
      bool used = false;
      for (int k = 0; k < level; ++k)
        if (dmap[k] == j) used = true;
      if (used) continue;
      dmap[level] = j;
      if (self(self, level + 1)) return true;
    }
    return false;
  };
  auto assign_sources = [&](auto&& self, int level) -> bool {
    if (level == ps) return assign_destinations(assign_destinations, 0);
    for (int i = 1; i <= t.num_sources(); ++i) {
      bool used = false;
      for (int k = 0; k < level; ++k)
        if (smap[k] == i) used = true;
      if (used) continue;
      smap[level] = i;
      if (self(self, level + 1)) return true;
    }
    return false;
  };

  if (assign_sources(assign_sources, 0)) found = make_witness(kind, smap, dmap);
  return found;
}

ClassificationVerdict classify(const NetworkTopology& t) {
  if (auto info = is_mac_z_bc(t)) return ClassificationVerdict(std::move(*info));
  auto witness = find_forbidden_subnetwork(t);
  if (!witness)
    throw Error(ErrorCode::argument, "classification dichotomy violated (internal bug)");
  return ClassificationVerdict(std::move(*witness));
}

}  // namespace netsep
