#include <doctest.h>

#include "netsep/classifier.hpp"
#include "testutil.hpp"

using namespace netsep;

namespace {

NetworkTopology all_messages(int S, int D, std::set<Edge> edges) {
  std::set<MessageId> messages = edges;
  return NetworkTopology(S, D, std::move(edges), std::move(messages));
}

NetworkTopology hub_4x3_topology() {
  return all_messages(4, 3, {{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4}});
}

// Enumerates all valid (connected, covered) topologies for fixed S, D by
// sweeping edge subsets and message subsets. Used by the dichotomy checks.
template <typename Fn>
void for_each_valid_topology(int S, int D, Fn&& fn) {
  std::vector<Edge> slots;
  for (int j = 1; j <= D; ++j)
    for (int i = 1; i <= S; ++i) slots.push_back({j, i});
  const unsigned total = 1u << slots.size();
  for (unsigned edge_bits = 1; edge_bits < total; ++edge_bits) {
    std::vector<Edge> chosen;
    for (size_t k = 0; k < slots.size(); ++k)
      if (edge_bits & (1u << k)) chosen.push_back(slots[k]);
    std::set<Edge> edges(chosen.begin(), chosen.end());
    for (unsigned msg_bits = 0; msg_bits < (1u << chosen.size()); ++msg_bits) {
      std::set<MessageId> messages;
      for (size_t k = 0; k < chosen.size(); ++k)
        if (msg_bits & (1u << k)) messages.insert(chosen[k]);
      NetworkTopology t(S, D, edges, messages);
      if (is_valid(t)) fn(t);
    }
  }
}

}  // namespace

TEST_CASE("hub detection on the 4x3 MAC-Z-BC topology") {
  auto info = is_mac_z_bc(hub_4x3_topology());
  REQUIRE(info.has_value());
  CHECK(info->hub_source == 4);
  CHECK(info->hub_destination == 1);
  CHECK(info->source_relabeling == std::vector<int>{1, 2, 3, 4});
  CHECK(info->destination_relabeling == std::vector<int>{1, 2, 3});
}

TEST_CASE("the X topology is not MAC-Z-BC") {
  CHECK_FALSE(is_mac_z_bc(canonical_forbidden_topology(ForbiddenKind::x_network)));
}

TEST_CASE("a point-to-point link is MAC-Z-BC with no hubs") {
  auto info = is_mac_z_bc(all_messages(1, 1, {{1, 1}}));
  REQUIRE(info.has_value());
  CHECK_FALSE(info->hub_source.has_value());
  CHECK_FALSE(info->hub_destination.has_value());
}

TEST_CASE("non-canonical hubs get swap relabelings") {
  // Hub destination is 2 and hub source is 1 here.
  NetworkTopology t = all_messages(3, 2, {{2, 1}, {2, 2}, {2, 3}, {1, 1}});
  auto info = is_mac_z_bc(t);
  REQUIRE(info.has_value());
  CHECK(info->hub_source == 1);
  CHECK(info->hub_destination == 2);
  CHECK(info->source_relabeling == std::vector<int>{3, 2, 1});
  CHECK(info->destination_relabeling == std::vector<int>{2, 1});

  NetworkTopology canonical = relabel(t, info->source_relabeling, info->destination_relabeling);
  auto canonical_info = is_mac_z_bc(canonical);
  REQUIRE(canonical_info.has_value());
  CHECK(canonical_info->hub_source == 3);
  CHECK(canonical_info->hub_destination == 1);
}

TEST_CASE("is_mac_z_bc requires every edge to carry a message") {
  CHECK_FALSE(is_mac_z_bc(canonical_forbidden_topology(ForbiddenKind::z_interference)));
}

TEST_CASE("invalid topologies are rejected up front") {
  NetworkTopology broken(2, 2, {{1, 1}, {2, 2}}, {{1, 1}, {2, 2}});
  CHECK_THROWS_AS(is_mac_z_bc(broken), Error);
  CHECK_THROWS_AS(find_forbidden_subnetwork(broken), Error);
  CHECK_THROWS_AS(classify(broken), Error);
}

TEST_CASE("missing message on a cross link yields the Z-interference witness") {
  auto witness =
      find_forbidden_subnetwork(canonical_forbidden_topology(ForbiddenKind::z_interference));
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::z_interference);
  CHECK(witness->edges == std::vector<Edge>{{1, 1}, {1, 2}, {2, 2}});
  std::string why;
  CHECK_MESSAGE(
      witness_is_valid(canonical_forbidden_topology(ForbiddenKind::z_interference), *witness,
                       &why),
      why);
}

TEST_CASE("fully connected interference topology falls to the missing-message case") {
  std::set<Edge> edges;
  for (int j = 1; j <= 3; ++j)
    for (int i = 1; i <= 3; ++i) edges.insert({j, i});
  NetworkTopology t(3, 3, edges, {{1, 1}, {2, 2}, {3, 3}});
  auto witness = find_forbidden_subnetwork(t);
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::z_interference);
  // Lexicographically first cross link is (1,2); its companions are the
  // smallest direct links into receiver 1 and out of transmitter 2.
  CHECK(witness->edges == std::vector<Edge>{{1, 1}, {1, 2}, {2, 2}});
  std::string why;
  CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
}

TEST_CASE("two transmitter hubs sharing one receiver yield a sigma witness") {
  NetworkTopology t = canonical_forbidden_topology(ForbiddenKind::sigma);
  auto witness = find_forbidden_subnetwork(t);
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::sigma);
  CHECK(witness->source_map == std::vector<int>{1, 2});
  CHECK(witness->destination_map == std::vector<int>{1, 2, 3});
  std::string why;
  CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
}

TEST_CASE("two receiver hubs yield a reverse-sigma witness via transposition") {
  NetworkTopology t = all_messages(3, 2, {{1, 1}, {1, 2}, {2, 2}, {2, 3}});
  auto witness = find_forbidden_subnetwork(t);
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::reverse_sigma);
  CHECK(witness->edges == std::vector<Edge>{{1, 1}, {1, 2}, {2, 2}, {2, 3}});
  std::string why;
  CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
}

TEST_CASE("two transmitter hubs with overlapping pairs of receivers yield an X witness") {
  NetworkTopology t = all_messages(2, 2, {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  auto witness = find_forbidden_subnetwork(t);
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::x_network);
  std::string why;
  CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
}

TEST_CASE("disjoint hub neighborhoods bridged by a relay form a reverse-sigma") {
  // T1 covers {R1,R2}, T2 covers {R3,R4}, T3 bridges R1 and R3.
  NetworkTopology t =
      all_messages(3, 4, {{1, 1}, {2, 1}, {3, 2}, {4, 2}, {1, 3}, {3, 3}});
  auto witness = find_forbidden_subnetwork(t);
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::reverse_sigma);
  CHECK(witness->source_map == std::vector<int>{1, 3, 2});
  CHECK(witness->destination_map == std::vector<int>{1, 3});
  std::string why;
  CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
}

TEST_CASE("disjoint hub neighborhoods with a long bridge form a sigma") {
  // Shortest path from R1 to R3 runs R1 - T1 - R2 - T3 - R3 (four hops).
  NetworkTopology t =
      all_messages(3, 4, {{1, 1}, {2, 1}, {3, 2}, {4, 2}, {2, 3}, {3, 3}});
  auto witness = find_forbidden_subnetwork(t);
  REQUIRE(witness.has_value());
  CHECK(witness->kind == ForbiddenKind::sigma);
  CHECK(witness->source_map == std::vector<int>{1, 3});
  CHECK(witness->destination_map == std::vector<int>{1, 2, 3});
  std::string why;
  CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
}

TEST_CASE("brute force finds nothing inside the 4x3 MAC-Z-BC topology") {
  for (ForbiddenKind kind :
       {ForbiddenKind::z_interference, ForbiddenKind::x_network, ForbiddenKind::sigma,
        ForbiddenKind::reverse_sigma})
    CHECK_FALSE(contains_subnetwork_bruteforce(hub_4x3_topology(), kind));
}

TEST_CASE("brute force finds the X pattern in the X topology but no sigma") {
  const NetworkTopology& x = canonical_forbidden_topology(ForbiddenKind::x_network);
  auto witness = contains_subnetwork_bruteforce(x, ForbiddenKind::x_network);
  REQUIRE(witness.has_value());
  std::string why;
  CHECK_MESSAGE(witness_is_valid(x, *witness, &why), why);
  CHECK_FALSE(contains_subnetwork_bruteforce(x, ForbiddenKind::sigma));
}

TEST_CASE("brute force refuses oversized hosts") {
  std::set<Edge> edges;
  for (int j = 1; j <= 5; ++j)
    for (int i = 1; i <= 5; ++i) edges.insert({j, i});
  NetworkTopology big(5, 5, edges, edges);
  CHECK_THROWS_WITH_AS(contains_subnetwork_bruteforce(big, ForbiddenKind::x_network),
                       doctest::Contains("guard"), Error);
}

TEST_CASE("classify is separable on MAC and BC shapes and names the sigma witness") {
  CHECK(classify(all_messages(3, 1, {{1, 1}, {1, 2}, {1, 3}})).separable());
  CHECK(classify(all_messages(1, 3, {{1, 1}, {2, 1}, {3, 1}})).separable());
  ClassificationVerdict verdict = classify(canonical_forbidden_topology(ForbiddenKind::sigma));
  REQUIRE_FALSE(verdict.separable());
  CHECK(verdict.witness().kind == ForbiddenKind::sigma);
}

TEST_CASE("dichotomy and witness agreement over every small topology") {
  int checked = 0;
  for (int S = 1; S <= 2; ++S)
    for (int D = 1; D <= 3; ++D)
      for_each_valid_topology(S, D, [&](const NetworkTopology& t) {
        ++checked;
        bool degree_test = is_mac_z_bc(t).has_value();
        bool pattern_free = true;
        for (ForbiddenKind kind :
             {ForbiddenKind::z_interference, ForbiddenKind::x_network, ForbiddenKind::sigma,
              ForbiddenKind::reverse_sigma})
          if (contains_subnetwork_bruteforce(t, kind)) pattern_free = false;
        CHECK(degree_test == pattern_free);

        auto witness = find_forbidden_subnetwork(t);
        CHECK(witness.has_value() != degree_test);
        if (witness) {
          std::string why;
          CHECK_MESSAGE(witness_is_valid(t, *witness, &why), why);
          // The independent oracle must agree on the reported kind.
          CHECK(contains_subnetwork_bruteforce(t, witness->kind).has_value());
        }
      });
  CHECK(checked > 100);
}

TEST_CASE("an inseparable sub-network forces the host to be inseparable") {
  testutil::Rng rng(23);
  int exercised = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int S = rng.uniform_int(2, 4);
    int D = rng.uniform_int(2, 4);
    std::set<Edge> edges;
    for (int j = 1; j <= D; ++j)
      for (int i = 1; i <= S; ++i)
        if (rng.uniform(0, 1) < 0.55) edges.insert({j, i});
    std::set<MessageId> messages;
    for (const Edge& e : edges)
      if (rng.uniform(0, 1) < 0.8) messages.insert(e);
    NetworkTopology host(S, D, edges, messages);
    if (!is_valid(host)) continue;

    std::set<Edge> removed;
    for (const Edge& e : edges)
      if (rng.uniform(0, 1) < 0.3) removed.insert(e);
    NetworkTopology sub = delete_edges(host, removed);
    if (!is_valid(sub)) continue;
    if (classify(sub).separable()) continue;
    ++exercised;
    CHECK_FALSE(classify(host).separable());
  }
  CHECK(exercised > 20);
}
