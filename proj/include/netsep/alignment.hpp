#pragma once

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "netsep/capacity.hpp"
#include "netsep/classifier.hpp"
#include "netsep/network.hpp"

namespace netsep {

using CarrierVector = std::vector<std::complex<double>>;

/// A linear joint-coding scheme over carriers: each active message rides a
/// carrier-space beamforming vector and a fraction of its transmitter's power
/// budget. Inactive messages send nothing (rate zero by construction).
struct BeamformingScheme {
  int num_carriers = 0;
  std::set<MessageId> active;
  std::map<MessageId, CarrierVector> streams;      // one vector per active message
  std::map<MessageId, double> power_split;         // fractions; per-source sums <= 1
};

/// Throws Error(argument) when the scheme is inconsistent with the instance:
/// wrong vector lengths, zero-norm active streams, streams for unknown
/// messages, fractions outside [0,1], or a transmitter oversubscribed.
void validate_scheme(const ChannelInstance& instance, const BeamformingScheme& scheme);

/// The reference channel instance of each inseparable pattern. The X network
/// uses three carriers whose first two form Z-shaped channels and whose third
/// is fully connected; sigma and reverse-sigma use two carriers with unit
/// gains on every edge. Budgets are 1 per transmitter (scheme evaluation
/// scales them). Only the three alignment kinds are supported; requesting the
/// Z-interference kind throws Error(argument).
ChannelInstance canonical_channel(ForbiddenKind kind);

/// The matching beamforming vectors, with the transmit budget split equally
/// across each transmitter's active streams. The sigma scheme silences
/// message (1,2); the reverse-sigma scheme silences (2,2).
BeamformingScheme canonical_scheme(ForbiddenKind kind);

/// Interference geometry at one receiver: active interfering streams grouped
/// by collinearity of their received images (elementwise product of the
/// carrier gains with the beamforming vector). The collinearity test is exact
/// when gains and vectors are Gaussian integers. `aligned` holds when at most
/// one group remains.
struct AlignmentReport {
  int receiver = 0;
  std::vector<std::vector<MessageId>> groups;
  int interference_dimension = 0;
  bool aligned = false;
};

AlignmentReport check_alignment(const ChannelInstance& instance,
                                const BeamformingScheme& scheme, int receiver);

/// Per-stream zero-forcing outcome. The filter is the unit-norm direction
/// orthogonal to every other arriving stream image; `feasible` is false when
/// the desired image lies inside the span that must be nulled (the stream
/// then carries no rate and the report says so).
struct StreamRate {
  double rate = 0.0;
  double snr = 0.0;
  bool active = false;
  bool feasible = true;
  CarrierVector filter;
};

struct RateReport {
  std::map<MessageId, StreamRate> per_message;
  double sum_rate = 0.0;
  bool all_feasible = true;
};

/// Evaluates the scheme with every transmitter's budget scaled to
/// `total_power`: each active stream gets rate log(1 + p |<filter, image>|^2)
/// with p its share of the transmitter power; noise stays unit variance under
/// unit-norm filters.
RateReport zf_rates(const ChannelInstance& instance, const BeamformingScheme& scheme,
                    double total_power, LogBase base = LogBase::two);

/// Best sum degrees of freedom attainable by per-carrier (separate) coding on
/// the canonical instances: 3 for the X network, 2 for sigma and
/// reverse-sigma. These are cited results, not computed here.
double separate_coding_dof_bound(ForbiddenKind kind);

/// Least-squares slope of the scheme's sum rate against log(P). `samples`
/// keeps every grid point; the fit discards the bottom decade where additive
/// constants still dominate.
struct DofFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit on the retained points
  std::vector<std::pair<double, double>> samples;
};

/// Grid requirements: at least 4 strictly increasing positive powers spanning
/// a ratio of at least 1e4. Throws Error(argument) otherwise.
DofFit dof_fit(const ChannelInstance& instance, const BeamformingScheme& scheme,
               std::span<const double> power_grid, LogBase base = LogBase::two);

struct GapPoint {
  double power = 0.0;
  double joint_rate = 0.0;
  double separate_bound = 0.0;  // separate-coding DoF times log(P)
};

struct GapTable {
  ForbiddenKind kind = ForbiddenKind::x_network;
  double separate_dof = 0.0;
  std::vector<GapPoint> points;
  std::optional<double> crossover_power;  // first grid power with joint > bound
  DofFit fit;
};

/// Joint-coding sum rate of the canonical scheme versus the separate-coding
/// DoF line over a power grid. Pass `instance_override` to rerun the canonical
/// scheme on the same topology with different gains (it must match the
/// canonical topology and carrier count).
GapTable gap_experiment(ForbiddenKind kind, std::span<const double> power_grid,
                        LogBase base = LogBase::two,
                        const ChannelInstance* instance_override = nullptr);

std::vector<double> log_spaced_grid(double lo, double hi, int points);

}  // namespace netsep
