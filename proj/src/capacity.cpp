#include "netsep/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netsep {

double log_scale(LogBase base) {
  return base == LogBase::two ? 1.0 / std::log(2.0) : 1.0;
}

std::vector<double> PowerAllocation::carrier_powers(int carrier) const {
  std::vector<double> out(num_sources_);
  for (int j = 1; j <= num_sources_; ++j) out[j - 1] = at(j, carrier);
  return out;
}

double PowerAllocation::source_total(int source) const {
  double total = 0.0;
  for (int f = 1; f <= num_carriers_; ++f) total += at(source, f);
  return total;
}

void require_feasible(const PowerAllocation& allocation, const ChannelInstance& instance,
                      double tolerance) {
  if (allocation.num_sources() != instance.topology().num_sources() ||
      allocation.num_carriers() != instance.num_carriers())
    throw Error(ErrorCode::validation, "allocation shape does not match the instance");
  for (double p : allocation.data())
    if (!std::isfinite(p) || p < 0)
      throw Error(ErrorCode::validation, "allocation entries must be finite and nonnegative");
  for (int j = 1; j <= allocation.num_sources(); ++j) {
    double budget = instance.power_budget()[j - 1];
    if (allocation.source_total(j) > budget + tolerance * (1.0 + budget))
      throw Error(ErrorCode::validation,
                  "allocation for transmitter " + std::to_string(j) + " exceeds its budget");
  }
}

void require_canonical_mac_z_bc(const ChannelInstance& instance) {
  auto info = is_mac_z_bc(instance.topology());
  if (!info)
    throw Error(ErrorCode::inseparable,
                "instance topology is not a MAC-Z-BC network; its sum capacity is not "
                "characterized by this tool");
  const int S = instance.topology().num_sources();
  std::string hint;
  if (info->hub_destination && *info->hub_destination != 1)
    hint += " relabel destination " + std::to_string(*info->hub_destination) + " -> 1;";
  if (info->hub_source && *info->hub_source != S)
    hint += " relabel source " + std::to_string(*info->hub_source) + " -> " +
            std::to_string(S) + ";";
  if (!hint.empty())
    throw Error(ErrorCode::argument,
                "MAC-Z-BC instance is not canonically labeled:" + hint +
                    " (or run the relabeling pipeline)");
}

namespace {

void check_powers(std::span<const double> powers, int num_sources) {
  if (static_cast<int>(powers.size()) != num_sources)
    throw Error(ErrorCode::argument, "powers vector must have one entry per transmitter");
  for (double p : powers)
    if (!std::isfinite(p) || p < 0)
      throw Error(ErrorCode::argument, "powers must be finite and nonnegative");
}

void check_carrier(const ChannelInstance& instance, int carrier) {
  if (carrier < 1 || carrier > instance.num_carriers())
    throw Error(ErrorCode::argument, "carrier index " + std::to_string(carrier) +
                                         " out of range [1.." +
                                         std::to_string(instance.num_carriers()) + "]");
}

// Flattened per-carrier coefficients of the canonical formula.
struct FormulaCoefficients {
  int num_sources = 0;
  int num_carriers = 0;
  std::vector<double> direct;    // [j][f]: |H_{1,j}(f)|^2
  std::vector<double> hub_peak;  // [f]: (max_j |H_{j,S}(f)|)^2
  std::vector<double> hub_to_1;  // [f]: |H_{1,S}(f)|^2

  double direct_at(int source, int carrier) const {
    return direct[static_cast<size_t>(source - 1) * num_carriers + (carrier - 1)];
  }
};

FormulaCoefficients formula_coefficients(const ChannelInstance& instance) {
  FormulaCoefficients c;
  const int S = instance.topology().num_sources();
  const int F = instance.num_carriers();
  c.num_sources = S;
  c.num_carriers = F;
  c.direct.resize(static_cast<size_t>(S) * F);
  c.hub_peak.resize(F);
  c.hub_to_1.resize(F);
  for (int f = 1; f <= F; ++f) {
    for (int j = 1; j <= S; ++j)
      c.direct[static_cast<size_t>(j - 1) * F + (f - 1)] = instance.gain_power(1, j, f);
    double peak = 0.0;
    for (int j = 1; j <= instance.topology().num_destinations(); ++j)
      peak = std::max(peak, std::abs(instance.gain(j, S, f)));
    c.hub_peak[f - 1] = peak * peak;
    c.hub_to_1[f - 1] = instance.gain_power(1, S, f);
  }
  return c;
}

double carrier_value(const FormulaCoefficients& c, int carrier,
                     std::span<const double> powers, double scale) {
  double received = 0.0;
  for (int j = 1; j <= c.num_sources; ++j)
    received += c.direct_at(j, carrier) * powers[j - 1];
  double hub_power = powers[c.num_sources - 1];
  double mac_term = std::log1p(received);
  double z_term = std::log1p(c.hub_peak[carrier - 1] * hub_power) -
                  std::log1p(c.hub_to_1[carrier - 1] * hub_power);
  return (mac_term + z_term) * scale;
}

}  // namespace

double peak_cross_gain(const ChannelInstance& instance, int carrier) {
  require_canonical_mac_z_bc(instance);
  check_carrier(instance, carrier);
  const int S = instance.topology().num_sources();
  double peak = 0.0;
  for (int j = 1; j <= instance.topology().num_destinations(); ++j)
    peak = std::max(peak, std::abs(instance.gain(j, S, carrier)));
  return peak;
}

double sum_capacity_single_carrier(const ChannelInstance& instance, int carrier,
                                   std::span<const double> powers, LogBase base) {
  require_canonical_mac_z_bc(instance);
  check_carrier(instance, carrier);
  check_powers(powers, instance.topology().num_sources());
  return carrier_value(formula_coefficients(instance), carrier, powers, log_scale(base));
}

std::map<MessageId, double> achievable_rates_single_carrier(const ChannelInstance& instance,
                                                            int carrier,
                                                            std::span<const double> powers,
                                                            LogBase base) {
  require_canonical_mac_z_bc(instance);
  check_carrier(instance, carrier);
  const int S = instance.topology().num_sources();
  const int D = instance.topology().num_destinations();
  check_powers(powers, S);
  const double scale = log_scale(base);

  std::map<MessageId, double> rates;
  for (const MessageId& m : instance.topology().messages()) rates[m] = 0.0;

  // Strongest receiver of the hub transmitter, smallest index on ties.
  int best = 1;
  double best_gain = std::abs(instance.gain(1, S, carrier));
  for (int j = 2; j <= D; ++j) {
    double g = std::abs(instance.gain(j, S, carrier));
    if (g > best_gain) {
      best = j;
      best_gain = g;
    }
  }

  if (best == 1) {
    // Everything is decoded at receiver 1 as one multiple-access channel.
    double received = 0.0;
    std::vector<double> contribution(S, 0.0);
    for (int i = 1; i <= S; ++i) {
      contribution[i - 1] = instance.gain_power(1, i, carrier) * powers[i - 1];
      received += contribution[i - 1];
    }
    double sum_rate = std::log1p(received) * scale;
    if (received > 0.0)
      for (int i = 1; i <= S; ++i)
        if (instance.topology().has_message(1, i))
          rates[MessageId{1, i}] = sum_rate * contribution[i - 1] / received;
    return rates;
  }

  // Hub serves its strongest receiver point-to-point; receiver 1 decodes the
  // rest with the hub's signal treated as noise.
  rates[MessageId{best, S}] =
      std::log1p(best_gain * best_gain * powers[S - 1]) * scale;
  double interference = 1.0 + instance.gain_power(1, S, carrier) * powers[S - 1];
  double received = 0.0;
  std::vector<double> contribution(S, 0.0);
  for (int i = 1; i < S; ++i) {
    contribution[i - 1] = instance.gain_power(1, i, carrier) * powers[i - 1];
    received += contribution[i - 1];
  }
  double mac_sum = std::log1p(received / interference) * scale;
  if (received > 0.0)
    for (int i = 1; i < S; ++i)
      if (instance.topology().has_message(1, i))
        rates[MessageId{1, i}] = mac_sum * contribution[i - 1] / received;
  return rates;
}

double converse_bound_parallel(const ChannelInstance& instance,
                               const PowerAllocation& allocation, LogBase base) {
  require_canonical_mac_z_bc(instance);
  require_feasible(allocation, instance);
  const FormulaCoefficients c = formula_coefficients(instance);
  const double scale = log_scale(base);
  double total = 0.0;
  for (int f = 1; f <= instance.num_carriers(); ++f)
    total += carrier_value(c, f, allocation.carrier_powers(f), scale);
  return total;
}

PowerAllocation converse_bound_gradient(const ChannelInstance& instance,
                                        const PowerAllocation& allocation, LogBase base) {
  require_canonical_mac_z_bc(instance);
  require_feasible(allocation, instance);
  const FormulaCoefficients c = formula_coefficients(instance);
  const double scale = log_scale(base);
  const int S = c.num_sources;
  const int F = c.num_carriers;
  PowerAllocation grad(S, F);
  for (int f = 1; f <= F; ++f) {
    double received = 1.0;
    for (int j = 1; j <= S; ++j) received += c.direct_at(j, f) * allocation.at(j, f);
    for (int j = 1; j <= S; ++j) grad.at(j, f) = scale * c.direct_at(j, f) / received;
    double hub_power = allocation.at(S, f);
    double peak = c.hub_peak[f - 1];
    double to_1 = c.hub_to_1[f - 1];
    grad.at(S, f) += scale * (peak / (1.0 + peak * hub_power) -
                              to_1 / (1.0 + to_1 * hub_power));
  }
  return grad;
}

namespace {

// Euclidean projection onto {p >= 0, sum p <= budget}: clip, and when still
// over budget project onto the simplex face by the sort-based rule.
void project_capped_simplex(std::span<double> row, double budget) {
  if (budget <= 0.0) {
    std::fill(row.begin(), row.end(), 0.0);
    return;
  }
  double clipped_sum = 0.0;
  for (double v : row) clipped_sum += std::max(v, 0.0);
  if (clipped_sum <= budget) {
    for (double& v : row) v = std::max(v, 0.0);
    return;
  }
  std::vector<double> sorted(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    double candidate = (cumulative - budget) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  for (double& v : row) v = std::max(v - theta, 0.0);
}

void project_feasible(std::vector<double>& flat, int num_sources, int num_carriers,
                      const std::vector<double>& budgets) {
  for (int j = 0; j < num_sources; ++j)
    project_capped_simplex(
        std::span<double>(flat.data() + static_cast<size_t>(j) * num_carriers, num_carriers),
        budgets[j]);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

CapacityReport optimize_power_allocation(const ChannelInstance& instance,
                                         const SolverOptions& options) {
  require_canonical_mac_z_bc(instance);
  if (!(options.tolerance > 0.0))
    throw Error(ErrorCode::argument, "solver tolerance must be positive");
  if (options.max_iterations < 1)
    throw Error(ErrorCode::argument, "max_iterations must be at least 1");

  const int S = instance.topology().num_sources();
  const int F = instance.num_carriers();
  const std::vector<double>& budgets = instance.power_budget();
  const FormulaCoefficients coeff = formula_coefficients(instance);
  const double scale = log_scale(options.log_base);
  const size_t n = static_cast<size_t>(S) * F;

  auto objective = [&](const std::vector<double>& flat) {
    double total = 0.0;
    std::vector<double> column(S);
    for (int f = 1; f <= F; ++f) {
      for (int j = 0; j < S; ++j) column[j] = flat[static_cast<size_t>(j) * F + (f - 1)];
      total += carrier_value(coeff, f, column, scale);
    }
    return total;
  };
  auto gradient = [&](const std::vector<double>& flat, std::vector<double>& g) {
    for (int f = 1; f <= F; ++f) {
      double received = 1.0;
      for (int j = 1; j <= S; ++j)
        received += coeff.direct_at(j, f) * flat[static_cast<size_t>(j - 1) * F + (f - 1)];
      for (int j = 1; j <= S; ++j)
        g[static_cast<size_t>(j - 1) * F + (f - 1)] =
            scale * coeff.direct_at(j, f) / received;
      double hub_power = flat[static_cast<size_t>(S - 1) * F + (f - 1)];
      g[static_cast<size_t>(S - 1) * F + (f - 1)] +=
          scale * (coeff.hub_peak[f - 1] / (1.0 + coeff.hub_peak[f - 1] * hub_power) -
                   coeff.hub_to_1[f - 1] / (1.0 + coeff.hub_to_1[f - 1] * hub_power));
    }
  };
  auto residual_norm = [&](const std::vector<double>& flat, const std::vector<double>& g) {
    std::vector<double> step(n);
    for (size_t k = 0; k < n; ++k) step[k] = flat[k] + g[k];
    project_feasible(step, S, F, budgets);
    double sq = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double d = flat[k] - step[k];
      sq += d * d;
    }
    return std::sqrt(sq);
  };

  std::vector<double> point(n);
  for (int j = 0; j < S; ++j)
    for (int f = 0; f < F; ++f)
      point[static_cast<size_t>(j) * F + f] = budgets[j] / F;
  double value = objective(point);
  std::vector<double> grad(n), next(n), next_grad(n);
  gradient(point, grad);

  double step_size = 1.0;
  long iterations = 0;
  double residual = residual_norm(point, grad);

  while (iterations < options.max_iterations && residual >= options.tolerance) {
    ++iterations;

    bool accepted = false;
    double next_value = value;
    for (int halving = 0; halving < 60; ++halving) {
      for (size_t k = 0; k < n; ++k) next[k] = point[k] + step_size * grad[k];
      project_feasible(next, S, F, budgets);
      double advance = 0.0;
      for (size_t k = 0; k < n; ++k) advance += grad[k] * (next[k] - point[k]);
      if (advance <= 0.0) break;  // numerically stationary along this arc
      next_value = objective(next);
      if (next_value >= value + 1e-4 * advance) {
        accepted = true;
        break;
      }
      step_size *= 0.5;
    }
    if (!accepted) break;

    gradient(next, next_grad);

    // Barzilai-Borwein step length for the next round, guarded to stay sane.
    double ss = 0.0, sy = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double s = next[k] - point[k];
      ss += s * s;
      sy += s * (next_grad[k] - grad[k]);
    }
    if (sy < 0.0 && std::isfinite(ss / -sy))
      step_size = std::clamp(ss / -sy, 1e-16, 1e16);
    else
      step_size = std::clamp(step_size * 2.0, 1e-16, 1e16);

    double change = next_value - value;
    point.swap(next);
    grad.swap(next_grad);
    value = next_value;
    residual = residual_norm(point, grad);
    if (change < 1e-12 * std::max(1.0, std::abs(value))) break;
  }

  CapacityReport report;
  report.iterations = iterations;
  report.kkt_residual = residual;
  report.converged = residual < options.tolerance;
  report.allocation = PowerAllocation(S, F);
  for (int j = 1; j <= S; ++j)
    for (int f = 1; f <= F; ++f)
      report.allocation.at(j, f) = point[static_cast<size_t>(j - 1) * F + (f - 1)];

  report.per_carrier.resize(F);
  for (int f = 1; f <= F; ++f) {
    report.per_carrier[f - 1] =
        carrier_value(coeff, f, report.allocation.carrier_powers(f), scale);
    report.total += report.per_carrier[f - 1];
  }
  for (const MessageId& m : instance.topology().messages()) report.per_message_rates[m] = 0.0;
  for (int f = 1; f <= F; ++f) {
    auto rates = achievable_rates_single_carrier(instance, f,
                                                 report.allocation.carrier_powers(f),
                                                 options.log_base);
    for (const auto& [m, r] : rates) report.per_message_rates[m] += r;
  }
  return report;
}

WaterfillingResult waterfilling_reference(std::span<const double> gain_sq, double budget,
                                          LogBase base) {
  if (budget < 0.0 || !std::isfinite(budget))
    throw Error(ErrorCode::argument, "budget must be finite and nonnegative");
  for (double g : gain_sq)
    if (!std::isfinite(g) || g < 0.0)
      throw Error(ErrorCode::argument, "squared gains must be finite and nonnegative");

  WaterfillingResult result;
  result.allocation.assign(gain_sq.size(), 0.0);

  double floor_max = 0.0;
  bool any_usable = false;
  for (double g : gain_sq)
    if (g > 0.0) {
      any_usable = true;
      floor_max = std::max(floor_max, 1.0 / g);
    }
  if (!any_usable || budget == 0.0) return result;

  auto spent = [&](double level) {
    double total = 0.0;
    for (double g : gain_sq)
      if (g > 0.0) total += std::max(0.0, level - 1.0 / g);
    return total;
  };
  double lo = 0.0, hi = floor_max + budget;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (spent(mid) < budget)
      lo = mid;
    else
      hi = mid;
  }
  double level = 0.5 * (lo + hi);
  const double scale = log_scale(base);
  for (size_t f = 0; f < gain_sq.size(); ++f) {
    if (gain_sq[f] > 0.0) result.allocation[f] = std::max(0.0, level - 1.0 / gain_sq[f]);
    result.value += std::log1p(gain_sq[f] * result.allocation[f]) * scale;
  }
  return result;
}

InstanceAnalysis analyze_instance(const ChannelInstance& instance,
                                  const SolverOptions& options) {
  ClassificationVerdict verdict = classify(instance.topology());
  if (!verdict.separable()) return InstanceAnalysis{std::move(verdict), std::nullopt};

  const SeparableInfo& info = verdict.separable_info();
  ChannelInstance canonical =
      relabel(instance, info.source_relabeling, info.destination_relabeling);
  CapacityReport canonical_report = optimize_power_allocation(canonical, options);

  // Map allocation rows and message rates back to the original labels.
  CapacityReport report = canonical_report;
  const int S = instance.topology().num_sources();
  const int F = instance.num_carriers();
  for (int i = 1; i <= S; ++i)
    for (int f = 1; f <= F; ++f)
      report.allocation.at(i, f) =
          canonical_report.allocation.at(info.source_relabeling[i - 1], f);
  report.per_message_rates.clear();
  for (const MessageId& m : instance.topology().messages()) {
    MessageId canonical_id{info.destination_relabeling[m.destination - 1],
                           info.source_relabeling[m.source - 1]};
    report.per_message_rates[m] = canonical_report.per_message_rates.at(canonical_id);
  }
  return InstanceAnalysis{std::move(verdict), std::move(report)};
}

}  // namespace netsep
