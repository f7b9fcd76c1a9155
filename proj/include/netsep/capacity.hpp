#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "netsep/classifier.hpp"
#include "netsep/network.hpp"

namespace netsep {

/// Rates are reported in bits (base 2) by default; base e gives nats.
enum class LogBase { two, e };

double log_scale(LogBase base);

/// A per-transmitter, per-carrier power split. Row j holds transmitter j's
/// powers across the F carriers; each row must be nonnegative and sum to at
/// most that transmitter's budget.
class PowerAllocation {
 public:
  PowerAllocation(int num_sources, int num_carriers, double fill = 0.0)
      : num_sources_(num_sources),
        num_carriers_(num_carriers),
        data_(static_cast<size_t>(num_sources) * num_carriers, fill) {}

  int num_sources() const { return num_sources_; }
  int num_carriers() const { return num_carriers_; }

  double& at(int source, int carrier) {
    return data_[static_cast<size_t>(source - 1) * num_carriers_ + (carrier - 1)];
  }
  double at(int source, int carrier) const {
    return data_[static_cast<size_t>(source - 1) * num_carriers_ + (carrier - 1)];
  }

  /// Column `carrier` as a length-S vector.
  std::vector<double> carrier_powers(int carrier) const;
  double source_total(int source) const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;

 private:
  int num_sources_;
  int num_carriers_;
  std::vector<double> data_;
};

/// Throws Error(validation) if the allocation shape does not match the
/// instance, an entry is negative/non-finite, or a row exceeds its budget
/// beyond the tolerance.
void require_feasible(const PowerAllocation& allocation, const ChannelInstance& instance,
                      double tolerance = 1e-9);

struct SolverOptions {
  LogBase log_base = LogBase::two;
  double tolerance = 1e-9;  // projected-gradient norm target
  long max_iterations = 100000;
};

struct CapacityReport {
  double total = 0.0;
  std::vector<double> per_carrier;
  PowerAllocation allocation{1, 1};
  std::map<MessageId, double> per_message_rates;
  double kkt_residual = 0.0;
  bool converged = false;
  long iterations = 0;
};

/// Throws unless the instance is a MAC-Z-BC network in canonical labeling
/// (hub destination relabeled to 1, hub source to S). The error message of a
/// mislabeled MAC-Z-BC carries the required remapping.
void require_canonical_mac_z_bc(const ChannelInstance& instance);

/// Largest cross-gain magnitude out of the hub transmitter on one carrier:
/// max_j |H_{j,S}(f)|.
double peak_cross_gain(const ChannelInstance& instance, int carrier);

/// Exact single-carrier sum capacity of a canonical MAC-Z-BC instance:
///   log(1 + sum_j |H_{1,j}|^2 P_j) + log((1 + H^2 P_S) / (1 + |H_{1,S}|^2 P_S))
/// with H the peak cross gain. The second term vanishes when the hub
/// transmitter's best receiver is receiver 1.
double sum_capacity_single_carrier(const ChannelInstance& instance, int carrier,
                                   std::span<const double> powers,
                                   LogBase base = LogBase::two);

/// Per-message rates of the capacity-achieving single-carrier scheme: the hub
/// transmitter serves only its strongest receiver (smallest index on ties);
/// everyone else is decoded at receiver 1 as a multiple-access channel,
/// treating the hub's signal as noise when it points elsewhere. Rates inside
/// a MAC sum are split proportionally to received power. The rates sum to
/// sum_capacity_single_carrier (analytically; equal to ~1e-15 relative in
/// floating point).
std::map<MessageId, double> achievable_rates_single_carrier(const ChannelInstance& instance,
                                                            int carrier,
                                                            std::span<const double> powers,
                                                            LogBase base = LogBase::two);

/// Sum of per-carrier sum capacities under the given power split. This is both
/// the genie-aided upper bound on any joint-coding scheme and, by separate
/// coding, achievable — hence exact.
double converse_bound_parallel(const ChannelInstance& instance,
                               const PowerAllocation& allocation,
                               LogBase base = LogBase::two);

/// Gradient of converse_bound_parallel in the allocation entries (same shape).
PowerAllocation converse_bound_gradient(const ChannelInstance& instance,
                                        const PowerAllocation& allocation,
                                        LogBase base = LogBase::two);

/// Maximizes converse_bound_parallel over the power allocation. The objective
/// is smooth and concave and the feasible set is a product of per-transmitter
/// capped simplices, so projected gradient ascent with a backtracking line
/// search converges to the global optimum; the KKT residual reported is the
/// unit-step projected-gradient norm at the final iterate. A report is
/// returned even when the iteration budget runs out (converged = false, best
/// iterate kept).
CapacityReport optimize_power_allocation(const ChannelInstance& instance,
                                         const SolverOptions& options = {});

struct WaterfillingResult {
  std::vector<double> allocation;
  double value = 0.0;
};

/// Closed-form single-user parallel-channel reference: fills power against
/// the squared channel gains up to a common water level (found by bisection).
/// Test oracle for the optimizer.
WaterfillingResult waterfilling_reference(std::span<const double> gain_sq, double budget,
                                          LogBase base = LogBase::two);

/// End-to-end pipeline for arbitrary valid instances: classify, and when
/// separable relabel to canonical form, optimize, and map the results back to
/// the original labels. `report` is empty when the verdict is inseparable.
struct InstanceAnalysis {
  ClassificationVerdict verdict;
  std::optional<CapacityReport> report;
};

InstanceAnalysis analyze_instance(const ChannelInstance& instance,
                                  const SolverOptions& options = {});

}  // namespace netsep
