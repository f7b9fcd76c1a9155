#include "netsep/alignment.hpp"

#include <algorithm>
#include <cmath>

namespace netsep {

namespace {

using cplx = std::complex<double>;

cplx inner(const CarrierVector& a, const CarrierVector& b) {
  cplx sum(0.0, 0.0);
  for (size_t k = 0; k < a.size(); ++k) sum += std::conj(a[k]) * b[k];
  return sum;
}

double norm_sq(const CarrierVector& v) {
  double sum = 0.0;
  for (const cplx& x : v) sum += std::norm(x);
  return sum;
}

bool is_gaussian_integer_vector(const CarrierVector& v) {
  for (const cplx& x : v) {
    if (std::abs(x.real()) > (1 << 26) || std::abs(x.imag()) > (1 << 26)) return false;
    if (x.real() != std::nearbyint(x.real()) || x.imag() != std::nearbyint(x.imag()))
      return false;
  }
  return true;
}

// Collinearity over the complex field. Gaussian-integer inputs take the exact
// determinant route; everything else falls back to the Cauchy-Schwarz gap
// test |<u,v>|^2 >= (1 - 1e-9) |u|^2 |v|^2.
bool collinear(const CarrierVector& u, const CarrierVector& v) {
  if (is_gaussian_integer_vector(u) && is_gaussian_integer_vector(v)) {
    for (size_t a = 0; a < u.size(); ++a)
      for (size_t b = a + 1; b < u.size(); ++b)
        if (u[a] * v[b] - u[b] * v[a] != cplx(0.0, 0.0)) return false;
    return true;
  }
  double cross = std::norm(inner(u, v));
  return cross >= (1.0 - 1e-9) * norm_sq(u) * norm_sq(v);
}

// Orthonormal basis accumulator (modified Gram-Schmidt, one
// reorthogonalization pass).
struct Basis {
  std::vector<CarrierVector> vectors;

  CarrierVector residual(const CarrierVector& v) const {
    CarrierVector r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const CarrierVector& q : vectors) {
        cplx coeff = inner(q, r);
        for (size_t k = 0; k < r.size(); ++k) r[k] -= coeff * q[k];
      }
    return r;
  }

  // Returns false when v is (numerically) inside the current span.
  bool add(const CarrierVector& v) {
    CarrierVector r = residual(v);
    double rn = std::sqrt(norm_sq(r));
    if (rn <= 1e-9 * std::sqrt(std::max(norm_sq(v), 1e-300))) return false;
    for (cplx& x : r) x /= rn;
    vectors.push_back(std::move(r));
    return true;
  }
};

CarrierVector received_image(const ChannelInstance& instance, int receiver,
                             const MessageId& message, const CarrierVector& beam) {
  CarrierVector image(beam.size());
  for (size_t f = 0; f < beam.size(); ++f)
    image[f] = instance.gain(receiver, message.source, static_cast<int>(f) + 1) * beam[f];
  return image;
}

const char* kind_name(ForbiddenKind kind) { return to_string(kind); }

void verify_canonical_pair(const ChannelInstance& instance, const BeamformingScheme& scheme,
                           ForbiddenKind kind);

}  // namespace

void validate_scheme(const ChannelInstance& instance, const BeamformingScheme& scheme) {
  if (scheme.num_carriers != instance.num_carriers())
    throw Error(ErrorCode::argument,
                "scheme spans " + std::to_string(scheme.num_carriers) +
                    " carriers but the instance has " +
                    std::to_string(instance.num_carriers()));
  for (const MessageId& m : scheme.active) {
    if (!instance.topology().has_message(m.destination, m.source))
      throw Error(ErrorCode::argument,
                  "scheme activates (" + std::to_string(m.destination) + "," +
                      std::to_string(m.source) + ") which is not a message of the topology");
    auto st = scheme.streams.find(m);
    if (st == scheme.streams.end() ||
        static_cast<int>(st->second.size()) != scheme.num_carriers)
      throw Error(ErrorCode::argument, "active message is missing a full-length beam vector");
    if (norm_sq(st->second) == 0.0)
      throw Error(ErrorCode::argument, "active message has a zero beamforming vector");
    auto ps = scheme.power_split.find(m);
    if (ps == scheme.power_split.end() || ps->second < 0.0 || ps->second > 1.0)
      throw Error(ErrorCode::argument, "active message needs a power fraction in [0,1]");
  }
  for (const auto& [m, v] : scheme.streams)
    if (!scheme.active.contains(m))
      throw Error(ErrorCode::argument, "stream present for an inactive message");
  std::map<int, double> per_source;
  for (const auto& [m, fraction] : scheme.power_split) per_source[m.source] += fraction;
  for (const auto& [source, total] : per_source)
    if (total > 1.0 + 1e-12)
      throw Error(ErrorCode::argument, "power fractions at transmitter " +
                                           std::to_string(source) + " sum to " +
                                           std::to_string(total) + " > 1");
}

ChannelInstance canonical_channel(ForbiddenKind kind) {
  std::map<GainKey, cplx> gains;
  auto unit_edges = [&](const NetworkTopology& t, int carriers) {
    for (const Edge& e : t.edges())
      for (int f = 1; f <= carriers; ++f)
        gains[GainKey{e.destination, e.source, f}] = cplx(1.0, 0.0);
  };

  switch (kind) {
    case ForbiddenKind::x_network: {
      const NetworkTopology& t = canonical_forbidden_topology(kind);
      unit_edges(t, 3);
      gains[GainKey{1, 2, 1}] = cplx(0.0, 0.0);  // carrier 1 is a Z shape
      gains[GainKey{2, 1, 2}] = cplx(0.0, 0.0);  // carrier 2 is the mirrored Z
      ChannelInstance instance(t, 3, {1.0, 1.0}, std::move(gains));
      verify_canonical_pair(instance, canonical_scheme(kind), kind);
      return instance;
    }
    case ForbiddenKind::sigma: {
      const NetworkTopology& t = canonical_forbidden_topology(kind);
      unit_edges(t, 2);
      ChannelInstance instance(t, 2, {1.0, 1.0}, std::move(gains));
      verify_canonical_pair(instance, canonical_scheme(kind), kind);
      return instance;
    }
    case ForbiddenKind::reverse_sigma: {
      const NetworkTopology& t = canonical_forbidden_topology(kind);
      unit_edges(t, 2);
      ChannelInstance instance(t, 2, {1.0, 1.0, 1.0}, std::move(gains));
      verify_canonical_pair(instance, canonical_scheme(kind), kind);
      return instance;
    }
    case ForbiddenKind::z_interference:
      throw Error(ErrorCode::argument,
                  "no canonical gap instance for the Z-interference pattern; its "
                  "inseparability is not exhibited by a linear scheme here");
  }
  throw Error(ErrorCode::argument, "unknown kind");
}

BeamformingScheme canonical_scheme(ForbiddenKind kind) {
  BeamformingScheme s;
  auto set_stream = [&](int rx, int tx, CarrierVector v, double fraction) {
    MessageId m{rx, tx};
    s.active.insert(m);
    s.streams[m] = std::move(v);
    s.power_split[m] = fraction;
  };
  switch (kind) {
    case ForbiddenKind::x_network:
      s.num_carriers = 3;
      set_stream(1, 1, {1, 0, 1}, 0.5);
      set_stream(1, 2, {1, 0, 1}, 0.5);
      set_stream(2, 2, {0, 1, 1}, 0.5);
      set_stream(2, 1, {0, 1, 1}, 0.5);
      return s;
    case ForbiddenKind::sigma:
      s.num_carriers = 2;
      set_stream(1, 1, {1, 0}, 0.5);
      set_stream(2, 1, {1, 1}, 0.5);
      set_stream(3, 2, {1, 0}, 1.0);
      // (1,2) stays silent: its interference would not align.
      return s;
    case ForbiddenKind::reverse_sigma:
      s.num_carriers = 2;
      set_stream(1, 1, {1, 0}, 1.0);
      set_stream(1, 2, {1, 1}, 1.0);  // identical signal on both carriers
      set_stream(2, 3, {1, 0}, 1.0);
      // (2,2) stays silent so receiver 2 can cancel transmitter 2 entirely.
      return s;
    case ForbiddenKind::z_interference:
      throw Error(ErrorCode::argument, "no canonical scheme for the Z-interference pattern");
  }
  throw Error(ErrorCode::argument, "unknown kind");
}

AlignmentReport check_alignment(const ChannelInstance& instance,
                                const BeamformingScheme& scheme, int receiver) {
  validate_scheme(instance, scheme);
  if (receiver < 1 || receiver > instance.topology().num_destinations())
    throw Error(ErrorCode::argument, "receiver index out of range");

  AlignmentReport report;
  report.receiver = receiver;

  std::vector<std::pair<MessageId, CarrierVector>> interference;
  for (const MessageId& m : scheme.active) {
    if (m.destination == receiver) continue;
    if (!instance.topology().has_edge(receiver, m.source)) continue;
    CarrierVector image = received_image(instance, receiver, m, scheme.streams.at(m));
    if (norm_sq(image) == 0.0) continue;
    interference.emplace_back(m, std::move(image));
  }

  std::vector<CarrierVector> representatives;
  for (const auto& [m, image] : interference) {
    bool placed = false;
    for (size_t g = 0; g < representatives.size(); ++g)
      if (collinear(representatives[g], image)) {
        report.groups[g].push_back(m);
        placed = true;
        break;
      }
    if (!placed) {
      representatives.push_back(image);
      report.groups.push_back({m});
    }
  }

  Basis basis;
  for (const auto& [m, image] : interference) basis.add(image);
  report.interference_dimension = static_cast<int>(basis.vectors.size());
  report.aligned = report.groups.size() <= 1;
  return report;
}

RateReport zf_rates(const ChannelInstance& instance, const BeamformingScheme& scheme,
                    double total_power, LogBase base) {
  validate_scheme(instance, scheme);
  if (!(total_power >= 0.0) || !std::isfinite(total_power))
    throw Error(ErrorCode::argument, "total power must be finite and nonnegative");
  const double scale = log_scale(base);

  RateReport report;
  for (const MessageId& m : instance.topology().messages())
    report.per_message[m] = StreamRate{};

  for (const MessageId& m : scheme.active) {
    StreamRate& out = report.per_message[m];
    out.active = true;
    const int receiver = m.destination;
    CarrierVector desired = received_image(instance, receiver, m, scheme.streams.at(m));

    Basis nulled;
    for (const MessageId& other : scheme.active) {
      if (other == m) continue;
      if (!instance.topology().has_edge(receiver, other.source)) continue;
      CarrierVector image = received_image(instance, receiver, other, scheme.streams.at(other));
      if (norm_sq(image) > 0.0) nulled.add(image);
    }

    CarrierVector filter = nulled.residual(desired);
    double gain = std::sqrt(norm_sq(filter));
    if (gain <= 1e-9 * std::sqrt(std::max(norm_sq(desired), 1e-300))) {
      out.feasible = false;
      report.all_feasible = false;
      continue;
    }
    for (cplx& x : filter) x /= gain;
    double projected = std::norm(inner(filter, desired));
    double stream_power = scheme.power_split.at(m) * total_power;
    out.filter = std::move(filter);
    out.snr = stream_power * projected;
    out.rate = std::log1p(out.snr) * scale;
    report.sum_rate += out.rate;
  }
  return report;
}

double separate_coding_dof_bound(ForbiddenKind kind) {
  switch (kind) {
    case ForbiddenKind::x_network: return 3.0;
    case ForbiddenKind::sigma: return 2.0;
    case ForbiddenKind::reverse_sigma: return 2.0;
    case ForbiddenKind::z_interference:
      throw Error(ErrorCode::argument,
                  "no separate-coding DoF line for the Z-interference pattern");
  }
  throw Error(ErrorCode::argument, "unknown kind");
}

namespace {

void validate_power_grid(std::span<const double> grid) {
  if (grid.size() < 4)
    throw Error(ErrorCode::argument, "degenerate power grid: need at least 4 points");
  for (size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k]))
      throw Error(ErrorCode::argument, "degenerate power grid: powers must be positive");
    if (k > 0 && grid[k] <= grid[k - 1])
      throw Error(ErrorCode::argument, "degenerate power grid: must be strictly increasing");
  }
  if (grid.back() / grid.front() < 1e4 * (1.0 - 1e-9))
    throw Error(ErrorCode::argument,
                "degenerate power grid: must span at least four decades");
}

// Self-check of the shipped instances: the scheme's interference must align
// (or be perfectly cancellable) exactly as constructed.
void verify_canonical_pair(const ChannelInstance& instance, const BeamformingScheme& scheme,
                           ForbiddenKind kind) {
  for (int j = 1; j <= instance.topology().num_destinations(); ++j) {
    AlignmentReport r = check_alignment(instance, scheme, j);
    if (!r.aligned)
      throw Error(ErrorCode::argument, std::string("canonical ") + kind_name(kind) +
                                           " instance failed its alignment self-check");
  }
  RateReport rates = zf_rates(instance, scheme, 1.0);
  if (!rates.all_feasible)
    throw Error(ErrorCode::argument, std::string("canonical ") + kind_name(kind) +
                                         " instance failed its nulling self-check");
}

}  // namespace

DofFit dof_fit(const ChannelInstance& instance, const BeamformingScheme& scheme,
               std::span<const double> power_grid, LogBase base) {
  validate_power_grid(power_grid);
  DofFit fit;
  for (double p : power_grid)
    fit.samples.emplace_back(p, zf_rates(instance, scheme, p, base).sum_rate);

  const double cutoff = power_grid.front() * 10.0;
  std::vector<double> xs, ys;
  const double scale = log_scale(base);
  for (const auto& [p, rate] : fit.samples) {
    if (p < cutoff) continue;  // bottom decade: constants still dominate
    xs.push_back(std::log(p) * scale);
    ys.push_back(rate);
  }
  if (xs.size() < 2)
    throw Error(ErrorCode::argument, "degenerate power grid: too few points above the "
                                     "bottom decade");

  double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    double e = ys[k] - (fit.slope * xs[k] + fit.intercept);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

GapTable gap_experiment(ForbiddenKind kind, std::span<const double> power_grid, LogBase base,
                        const ChannelInstance* instance_override) {
  ChannelInstance instance = canonical_channel(kind);
  if (instance_override) {
    if (instance_override->topology() != instance.topology() ||
        instance_override->num_carriers() != instance.num_carriers())
      throw Error(ErrorCode::argument,
                  std::string("override instance does not match the canonical ") +
                      kind_name(kind) + " topology and carrier count");
    instance = *instance_override;
  }
  BeamformingScheme scheme = canonical_scheme(kind);

  GapTable table;
  table.kind = kind;
  table.separate_dof = separate_coding_dof_bound(kind);
  table.fit = dof_fit(instance, scheme, power_grid, base);

  const double scale = log_scale(base);
  for (const auto& [p, joint] : table.fit.samples) {
    GapPoint point;
    point.power = p;
    point.joint_rate = joint;
    point.separate_bound = table.separate_dof * std::log(p) * scale;
    if (!table.crossover_power && point.joint_rate > point.separate_bound)
      table.crossover_power = p;
    table.points.push_back(point);
  }
  return table;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw Error(ErrorCode::argument, "log grid needs 0 < lo < hi and at least 2 points");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace netsep
