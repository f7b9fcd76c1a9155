#include <doctest.h>

#include <cmath>

#include "netsep/capacity.hpp"
#include "testutil.hpp"

using namespace netsep;

namespace {

// Two receivers, two transmitters: H_{1,1}=1, H_{1,2}=1, H_{2,2}=2.
ChannelInstance z_example() {
  NetworkTopology t(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {{1, 1}, {1, 2}, {2, 2}});
  return ChannelInstance(t, 1, {3.0, 1.0},
                         {{{1, 1, 1}, {1.0, 0.0}},
                          {{1, 2, 1}, {1.0, 0.0}},
                          {{2, 2, 1}, {2.0, 0.0}}});
}

ChannelInstance single_user(std::vector<double> gains_per_carrier, double budget) {
  NetworkTopology t(1, 1, {{1, 1}}, {{1, 1}});
  std::map<GainKey, std::complex<double>> gains;
  for (size_t f = 0; f < gains_per_carrier.size(); ++f)
    gains[{1, 1, static_cast<int>(f) + 1}] = {gains_per_carrier[f], 0.0};
  return ChannelInstance(t, static_cast<int>(gains_per_carrier.size()), {budget},
                         std::move(gains));
}

double rate_sum(const std::map<MessageId, double>& rates) {
  double sum = 0.0;
  for (const auto& [m, r] : rates) sum += r;
  return sum;
}

}  // namespace

TEST_CASE("peak cross gain scans the hub transmitter's column") {
  ChannelInstance instance = z_example();
  CHECK(peak_cross_gain(instance, 1) == doctest::Approx(2.0));

  // Pure BC: the peak is the only entry.
  NetworkTopology bc(1, 1, {{1, 1}}, {{1, 1}});
  ChannelInstance p2p(bc, 1, {1.0}, {{{1, 1, 1}, {0.5, 0.0}}});
  CHECK(peak_cross_gain(p2p, 1) == doctest::Approx(0.5));

  // Hub dark on the carrier.
  NetworkTopology t(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {{1, 1}, {1, 2}, {2, 2}});
  ChannelInstance dark(t, 1, {1.0, 1.0}, {{{1, 1, 1}, {1.0, 0.0}}});
  CHECK(peak_cross_gain(dark, 1) == 0.0);
}

TEST_CASE("capacity calls reject non-canonical labelings with a hint") {
  // Hub source sits at index 1 instead of S.
  NetworkTopology t(2, 2, {{1, 1}, {1, 2}, {2, 1}}, {{1, 1}, {1, 2}, {2, 1}});
  ChannelInstance instance(t, 1, {1.0, 1.0}, {});
  CHECK_THROWS_WITH_AS(peak_cross_gain(instance, 1), doctest::Contains("relabel source 1"),
                       Error);
}

TEST_CASE("capacity calls reject inseparable topologies") {
  NetworkTopology x(2, 2, {{1, 1}, {1, 2}, {2, 1}, {2, 2}},
                    {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  ChannelInstance instance(x, 1, {1.0, 1.0}, {});
  CHECK_THROWS_AS(peak_cross_gain(instance, 1), Error);
}

TEST_CASE("single-carrier sum capacity on the worked Z example") {
  // Strongest cross receiver gets log2(5); receiver 1 decodes through the
  // hub's interference for log2(2.5); the formula total is log2(12.5).
  ChannelInstance instance = z_example();
  std::vector<double> powers{3.0, 1.0};
  double value = sum_capacity_single_carrier(instance, 1, powers);
  CHECK(value == doctest::Approx(3.643856189774725).epsilon(1e-12));

  std::vector<double> zeros{0.0, 0.0};
  CHECK(sum_capacity_single_carrier(instance, 1, zeros) == 0.0);

  std::vector<double> negative{-1.0, 1.0};
  CHECK_THROWS_AS(sum_capacity_single_carrier(instance, 1, negative), Error);
}

TEST_CASE("pure BC collapses to the strongest user's point-to-point capacity") {
  NetworkTopology bc(1, 3, {{1, 1}, {2, 1}, {3, 1}}, {{1, 1}, {2, 1}, {3, 1}});
  ChannelInstance instance(bc, 1, {1.0},
                           {{{1, 1, 1}, {1.0, 0.0}},
                            {{2, 1, 1}, {2.0, 0.0}},
                            {{3, 1, 1}, {3.0, 0.0}}});
  std::vector<double> powers{1.0};
  double value = sum_capacity_single_carrier(instance, 1, powers);
  CHECK(value == doctest::Approx(3.321928094887362).epsilon(1e-12));
  double best_user = std::log2(1.0 + 9.0 * 1.0);
  CHECK(value == doctest::Approx(best_user).epsilon(1e-14));
}

TEST_CASE("achievable per-message rates on the worked Z example") {
  ChannelInstance instance = z_example();
  std::vector<double> powers{3.0, 1.0};
  auto rates = achievable_rates_single_carrier(instance, 1, powers);
  CHECK(rates.at({2, 2}) == doctest::Approx(2.321928094887362).epsilon(1e-12));
  CHECK(rates.at({1, 1}) == doctest::Approx(1.3219280948873624).epsilon(1e-12));
  CHECK(rates.at({1, 2}) == 0.0);
  CHECK(rate_sum(rates) ==
        doctest::Approx(sum_capacity_single_carrier(instance, 1, powers)).epsilon(1e-13));
}

TEST_CASE("achievable rates degenerate to one MAC when receiver 1 is strongest") {
  NetworkTopology t(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {{1, 1}, {1, 2}, {2, 2}});
  ChannelInstance instance(t, 1, {1.0, 1.0},
                           {{{1, 1, 1}, {1.0, 0.0}},
                            {{1, 2, 1}, {3.0, 0.0}},
                            {{2, 2, 1}, {2.0, 0.0}}});
  std::vector<double> powers{1.0, 1.0};
  auto rates = achievable_rates_single_carrier(instance, 1, powers);
  CHECK(rates.at({2, 2}) == 0.0);
  CHECK(rate_sum(rates) == doctest::Approx(std::log2(1 + 1 + 9)).epsilon(1e-14));

  std::vector<double> zeros{0.0, 0.0};
  for (const auto& [m, r] : achievable_rates_single_carrier(instance, 1, zeros)) CHECK(r == 0.0);
}

TEST_CASE("achievability matches the formula on seeded random instances") {
  testutil::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    int S = rng.uniform_int(1, 5);
    int D = rng.uniform_int(1, 5);
    ChannelInstance instance = testutil::random_canonical_instance(rng, S, D, 1);
    std::vector<double> powers(S);
    for (double& p : powers) p = rng.uniform(0.0, 100.0);
    double formula = sum_capacity_single_carrier(instance, 1, powers);
    double achieved = rate_sum(achievable_rates_single_carrier(instance, 1, powers));
    CHECK(achieved == doctest::Approx(formula).epsilon(1e-12));
  }
}

TEST_CASE("sum capacity never decreases in any transmit power") {
  testutil::Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    int S = rng.uniform_int(1, 4);
    int D = rng.uniform_int(1, 4);
    ChannelInstance instance = testutil::random_canonical_instance(rng, S, D, 1);
    std::vector<double> powers(S);
    for (double& p : powers) p = rng.uniform(0.0, 20.0);
    double base_value = sum_capacity_single_carrier(instance, 1, powers);
    for (int j = 0; j < S; ++j) {
      auto bumped = powers;
      bumped[j] += rng.uniform(0.01, 5.0);
      CHECK(sum_capacity_single_carrier(instance, 1, bumped) >= base_value - 1e-12);
    }
  }
}

TEST_CASE("the cross-link bonus term is never negative") {
  testutil::Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    int S = rng.uniform_int(1, 5);
    int D = rng.uniform_int(1, 5);
    ChannelInstance instance = testutil::random_canonical_instance(rng, S, D, 1);
    double hub_power = rng.uniform(0.0, 50.0);
    double peak = peak_cross_gain(instance, 1);
    double direct = std::abs(instance.gain(1, S, 1));
    CHECK(peak >= direct);
    double bonus = std::log1p(peak * peak * hub_power) - std::log1p(direct * direct * hub_power);
    CHECK(bonus >= 0.0);
  }
}

TEST_CASE("parallel bound reduces to the single-carrier value when F = 1") {
  ChannelInstance instance = z_example();
  PowerAllocation allocation(2, 1);
  allocation.at(1, 1) = 3.0;
  allocation.at(2, 1) = 1.0;
  std::vector<double> powers{3.0, 1.0};
  CHECK(converse_bound_parallel(instance, allocation) ==
        doctest::Approx(sum_capacity_single_carrier(instance, 1, powers)).epsilon(1e-15));
}

TEST_CASE("parallel bound doubles on identical carriers under an even split") {
  NetworkTopology t(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {{1, 1}, {1, 2}, {2, 2}});
  std::map<GainKey, std::complex<double>> gains;
  for (int f = 1; f <= 2; ++f) {
    gains[{1, 1, f}] = {1.0, 0.0};
    gains[{1, 2, f}] = {1.0, 0.0};
    gains[{2, 2, f}] = {2.0, 0.0};
  }
  ChannelInstance instance(t, 2, {3.0, 1.0}, std::move(gains));
  PowerAllocation allocation(2, 2);
  allocation.at(1, 1) = allocation.at(1, 2) = 1.5;
  allocation.at(2, 1) = allocation.at(2, 2) = 0.5;
  std::vector<double> half{1.5, 0.5};
  CHECK(converse_bound_parallel(instance, allocation) ==
        doctest::Approx(2.0 * sum_capacity_single_carrier(instance, 1, half)).epsilon(1e-14));

  PowerAllocation zero(2, 2);
  CHECK(converse_bound_parallel(instance, zero) == 0.0);
}

TEST_CASE("parallel bound rejects infeasible allocations") {
  ChannelInstance instance = z_example();
  PowerAllocation over(2, 1);
  over.at(1, 1) = 4.0;  // budget is 3
  CHECK_THROWS_AS(converse_bound_parallel(instance, over), Error);
  PowerAllocation negative(2, 1);
  negative.at(2, 1) = -0.1;
  CHECK_THROWS_AS(converse_bound_parallel(instance, negative), Error);
}

TEST_CASE("objective is concave along random feasible segments") {
  testutil::Rng rng(555);
  for (int trial = 0; trial < 60; ++trial) {
    int S = rng.uniform_int(1, 4);
    int D = rng.uniform_int(1, 4);
    int F = rng.uniform_int(1, 4);
    ChannelInstance instance = testutil::random_canonical_instance(rng, S, D, F);
    auto random_allocation = [&] {
      PowerAllocation a(S, F);
      for (int j = 1; j <= S; ++j) {
        double budget = instance.power_budget()[j - 1];
        double remaining = budget;
        for (int f = 1; f <= F; ++f) {
          a.at(j, f) = rng.uniform(0.0, remaining / (F - f + 1));
          remaining -= a.at(j, f);
        }
      }
      return a;
    };
    PowerAllocation a = random_allocation();
    PowerAllocation b = random_allocation();
    PowerAllocation mid(S, F);
    for (int j = 1; j <= S; ++j)
      for (int f = 1; f <= F; ++f) mid.at(j, f) = 0.5 * (a.at(j, f) + b.at(j, f));
    double chord = 0.5 * (converse_bound_parallel(instance, a) +
                          converse_bound_parallel(instance, b));
    CHECK(converse_bound_parallel(instance, mid) >= chord - 1e-9);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  testutil::Rng rng(808);
  for (int trial = 0; trial < 25; ++trial) {
    int S = rng.uniform_int(1, 4);
    int D = rng.uniform_int(1, 4);
    int F = rng.uniform_int(1, 3);
    ChannelInstance instance = testutil::random_canonical_instance(rng, S, D, F, 2.0, 10.0);
    // Interior point: strictly positive, strictly under budget.
    PowerAllocation point(S, F);
    for (int j = 1; j <= S; ++j)
      for (int f = 1; f <= F; ++f)
        point.at(j, f) = 0.5 * instance.power_budget()[j - 1] / F;
    PowerAllocation analytic = converse_bound_gradient(instance, point);
    const double step = 1e-6;
    double err_sq = 0.0, norm_sq = 0.0;
    for (int j = 1; j <= S; ++j)
      for (int f = 1; f <= F; ++f) {
        PowerAllocation up = point, down = point;
        up.at(j, f) += step;
        down.at(j, f) -= step;
        double fd = (converse_bound_parallel(instance, up) -
                     converse_bound_parallel(instance, down)) /
                    (2 * step);
        err_sq += (fd - analytic.at(j, f)) * (fd - analytic.at(j, f));
        norm_sq += analytic.at(j, f) * analytic.at(j, f);
      }
    CHECK(std::sqrt(err_sq) <= 1e-5 * (std::sqrt(norm_sq) + 1e-12));
  }
}

TEST_CASE("water-filling reference on the two-carrier worked example") {
  WaterfillingResult wf = waterfilling_reference(std::vector<double>{1.0, 4.0}, 1.0);
  CHECK(wf.allocation[0] == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(wf.allocation[1] == doctest::Approx(0.875).epsilon(1e-10));
  CHECK(wf.value == doctest::Approx(2.3398500028846243).epsilon(1e-10));

  WaterfillingResult even = waterfilling_reference(std::vector<double>{1.0, 1.0}, 2.0);
  CHECK(even.allocation[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(even.allocation[1] == doctest::Approx(1.0).epsilon(1e-10));

  WaterfillingResult empty = waterfilling_reference(std::vector<double>{1.0, 4.0}, 0.0);
  CHECK(empty.allocation == std::vector<double>{0.0, 0.0});
  CHECK(empty.value == 0.0);

  CHECK_THROWS_AS(waterfilling_reference(std::vector<double>{1.0}, -1.0), Error);
}

TEST_CASE("optimizer reproduces water-filling on the two-carrier single-user case") {
  ChannelInstance instance = single_user({1.0, 2.0}, 1.0);  // |h|^2 = 1 and 4
  CapacityReport report = optimize_power_allocation(instance);
  CHECK(report.converged);
  CHECK(report.kkt_residual < 1e-9);
  CHECK(report.total == doctest::Approx(2.3398500028846243).epsilon(1e-8));
  CHECK(report.allocation.at(1, 1) == doctest::Approx(0.125).epsilon(1e-5));
  CHECK(report.allocation.at(1, 2) == doctest::Approx(0.875).epsilon(1e-5));
  CHECK(report.per_message_rates.at({1, 1}) == doctest::Approx(report.total).epsilon(1e-12));
}

TEST_CASE("optimizer puts the whole budget on a single carrier") {
  ChannelInstance instance = z_example();
  CapacityReport report = optimize_power_allocation(instance);
  CHECK(report.converged);
  CHECK(report.allocation.at(1, 1) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(report.allocation.at(2, 1) == doctest::Approx(1.0).epsilon(1e-9));
  std::vector<double> powers{3.0, 1.0};
  CHECK(report.total ==
        doctest::Approx(sum_capacity_single_carrier(instance, 1, powers)).epsilon(1e-12));
}

TEST_CASE("identical carriers are served uniformly at the optimum") {
  NetworkTopology t(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {{1, 1}, {1, 2}, {2, 2}});
  std::map<GainKey, std::complex<double>> gains;
  for (int f = 1; f <= 3; ++f) {
    gains[{1, 1, f}] = {1.0, 0.0};
    gains[{1, 2, f}] = {0.5, 0.0};
    gains[{2, 2, f}] = {2.0, 0.0};
  }
  ChannelInstance instance(t, 3, {3.0, 1.5}, std::move(gains));
  CapacityReport report = optimize_power_allocation(instance);
  CHECK(report.converged);
  std::vector<double> third{1.0, 0.5};
  CHECK(report.total ==
        doctest::Approx(3.0 * sum_capacity_single_carrier(instance, 1, third)).epsilon(1e-9));
  for (int j = 1; j <= 2; ++j)
    for (int f = 1; f <= 3; ++f)
      CHECK(report.allocation.at(j, f) ==
            doctest::Approx(instance.power_budget()[j - 1] / 3.0).epsilon(1e-4));
}

TEST_CASE("optimizer matches water-filling on random single-user instances") {
  testutil::Rng rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    int F = rng.uniform_int(1, 4);
    std::vector<double> gains(F);
    for (double& g : gains) g = std::abs(rng.complex_gaussian());
    double budget = rng.uniform(0.1, 10.0);
    ChannelInstance instance = single_user(gains, budget);
    std::vector<double> gain_sq(F);
    for (int f = 0; f < F; ++f) gain_sq[f] = gains[f] * gains[f];

    CapacityReport report = optimize_power_allocation(instance);
    WaterfillingResult wf = waterfilling_reference(gain_sq, budget);
    CHECK(report.converged);
    CHECK(std::abs(report.total - wf.value) <= 1e-6);
  }
}

TEST_CASE("optimizer converges on seeded multi-user multi-carrier instances") {
  testutil::Rng rng(4242);
  for (int trial = 0; trial < 30; ++trial) {
    int S = rng.uniform_int(1, 5);
    int D = rng.uniform_int(1, 5);
    int F = rng.uniform_int(1, 4);
    ChannelInstance instance = testutil::random_canonical_instance(rng, S, D, F);
    CapacityReport report = optimize_power_allocation(instance);
    CHECK(report.converged);
    CHECK(report.kkt_residual < 1e-9);
    require_feasible(report.allocation, instance);
    // Optimum dominates the uniform split it started from.
    PowerAllocation uniform(S, F);
    for (int j = 1; j <= S; ++j)
      for (int f = 1; f <= F; ++f) uniform.at(j, f) = instance.power_budget()[j - 1] / F;
    CHECK(report.total >= converse_bound_parallel(instance, uniform) - 1e-9);
    // Per-message rates add up to the capacity.
    double message_total = 0.0;
    for (const auto& [m, r] : report.per_message_rates) message_total += r;
    CHECK(message_total == doctest::Approx(report.total).epsilon(1e-11));
  }
}

TEST_CASE("an impossible iteration budget reports a best effort honestly") {
  ChannelInstance instance = single_user({1.0, 2.0}, 1.0);
  SolverOptions options;
  options.max_iterations = 1;
  CapacityReport report = optimize_power_allocation(instance, options);
  CHECK_FALSE(report.converged);
  CHECK(report.kkt_residual >= options.tolerance);
  CHECK(report.total > 0.0);
}

TEST_CASE("analyze_instance relabels, solves, and maps results back") {
  // Hub destination 2, hub source 1; canonical form needs both swaps.
  NetworkTopology t(2, 2, {{2, 1}, {2, 2}, {1, 1}}, {{2, 1}, {2, 2}, {1, 1}});
  std::map<GainKey, std::complex<double>> gains{
      {{2, 1, 1}, {1.0, 0.0}},  // hub source into hub destination
      {{2, 2, 1}, {1.0, 0.0}},
      {{1, 1, 1}, {2.0, 0.0}},
  };
  ChannelInstance instance(t, 1, {1.0, 3.0}, std::move(gains));
  InstanceAnalysis analysis = analyze_instance(instance);
  REQUIRE(analysis.verdict.separable());
  REQUIRE(analysis.report.has_value());
  CHECK(analysis.verdict.separable_info().hub_source == 1);
  CHECK(analysis.verdict.separable_info().hub_destination == 2);

  // Same instance, relabeled canonically by hand: swap sources 1<->2 and
  // destinations 1<->2.
  std::vector<int> sperm{2, 1}, dperm{2, 1};
  ChannelInstance canonical = relabel(instance, sperm, dperm);
  CapacityReport direct = optimize_power_allocation(canonical);
  CHECK(analysis.report->total == doctest::Approx(direct.total).epsilon(1e-12));
  // Budgets stay attached to their transmitters after the round trip.
  CHECK(analysis.report->allocation.at(1, 1) == doctest::Approx(direct.allocation.at(2, 1)));
  CHECK(analysis.report->allocation.at(2, 1) == doctest::Approx(direct.allocation.at(1, 1)));
  CHECK(analysis.report->per_message_rates.count(MessageId{2, 1}) == 1);
}

TEST_CASE("analyze_instance hands back the witness for inseparable inputs") {
  NetworkTopology x(2, 2, {{1, 1}, {1, 2}, {2, 1}, {2, 2}},
                    {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  ChannelInstance instance(x, 1, {1.0, 1.0}, {});
  InstanceAnalysis analysis = analyze_instance(instance);
  CHECK_FALSE(analysis.verdict.separable());
  CHECK_FALSE(analysis.report.has_value());
  CHECK(analysis.verdict.witness().kind == ForbiddenKind::x_network);
}
