#include "netsep.h"

#include <cstring>
#include <new>
#include <string>

#include "netsep/alignment.hpp"
#include "netsep/capacity.hpp"
#include "netsep/classifier.hpp"
#include "netsep/json_io.hpp"
#include "netsep/network.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

netsep_status status_from(netsep::ErrorCode code) {
  switch (code) {
    case netsep::ErrorCode::io: return NETSEP_ERROR_IO;
    case netsep::ErrorCode::validation: return NETSEP_ERROR_VALIDATION;
    case netsep::ErrorCode::inseparable: return NETSEP_ERROR_INSEPARABLE;
    case netsep::ErrorCode::nonconvergence: return NETSEP_ERROR_NONCONVERGENCE;
    case netsep::ErrorCode::argument: return NETSEP_ERROR_ARGUMENT;
  }
  return NETSEP_ERROR_ARGUMENT;
}

template <typename Fn>
netsep_status guarded(Fn&& fn) {
  try {
    fn();
    return NETSEP_OK;
  } catch (const netsep::Error& e) {
    set_error(e.what());
    return status_from(e.code());
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return NETSEP_ERROR_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return NETSEP_ERROR_ARGUMENT;
  }
}

bool kind_from(netsep_witness_kind kind, netsep::ForbiddenKind* out) {
  switch (kind) {
    case NETSEP_WITNESS_Z_INTERFERENCE: *out = netsep::ForbiddenKind::z_interference; return true;
    case NETSEP_WITNESS_X_NETWORK: *out = netsep::ForbiddenKind::x_network; return true;
    case NETSEP_WITNESS_SIGMA: *out = netsep::ForbiddenKind::sigma; return true;
    case NETSEP_WITNESS_REVERSE_SIGMA: *out = netsep::ForbiddenKind::reverse_sigma; return true;
  }
  return false;
}

netsep_witness_kind kind_to(netsep::ForbiddenKind kind) {
  switch (kind) {
    case netsep::ForbiddenKind::z_interference: return NETSEP_WITNESS_Z_INTERFERENCE;
    case netsep::ForbiddenKind::x_network: return NETSEP_WITNESS_X_NETWORK;
    case netsep::ForbiddenKind::sigma: return NETSEP_WITNESS_SIGMA;
    case netsep::ForbiddenKind::reverse_sigma: return NETSEP_WITNESS_REVERSE_SIGMA;
  }
  return NETSEP_WITNESS_Z_INTERFERENCE;
}

netsep::LogBase base_from(netsep_log_base base) {
  return base == NETSEP_LOG_BASE_E ? netsep::LogBase::e : netsep::LogBase::two;
}

}  // namespace

struct netsep_network {
  netsep::NetworkTopology topology;
  std::optional<netsep::ChannelInstance> instance;
};

struct netsep_verdict {
  netsep::ClassificationVerdict verdict;
};

struct netsep_capacity {
  netsep::InstanceAnalysis analysis;
  std::vector<netsep::MessageId> message_order;
};

struct netsep_gap {
  netsep::GapTable table;
};

extern "C" {

const char* netsep_version(void) { return "0.1.0"; }

const char* netsep_last_error(void) { return g_last_error.c_str(); }

void netsep_string_free(char* text) { delete[] text; }

netsep_status netsep_network_parse_json(const char* json_text, netsep_network** out) {
  if (!json_text || !out) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] {
    netsep::ParsedNetwork parsed = netsep::parse_network_json(json_text);
    *out = new netsep_network{std::move(parsed.topology), std::move(parsed.instance)};
  });
}

netsep_status netsep_network_to_json(const netsep_network* network, char** out_json) {
  if (!network || !out_json) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out_json = nullptr;
  return guarded([&] {
    std::string text = netsep::network_to_json(
        network->topology, network->instance ? &*network->instance : nullptr);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out_json = buffer;
  });
}

netsep_status netsep_canonical_network(netsep_witness_kind kind, netsep_network** out) {
  if (!out) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out = nullptr;
  netsep::ForbiddenKind k;
  if (!kind_from(kind, &k)) {
    set_error("unknown witness kind");
    return NETSEP_ERROR_ARGUMENT;
  }
  return guarded([&] {
    netsep::ChannelInstance instance = netsep::canonical_channel(k);
    netsep::NetworkTopology topology = instance.topology();
    *out = new netsep_network{std::move(topology), std::move(instance)};
  });
}

void netsep_network_free(netsep_network* network) { delete network; }

int netsep_network_num_sources(const netsep_network* n) {
  return n ? n->topology.num_sources() : 0;
}
int netsep_network_num_destinations(const netsep_network* n) {
  return n ? n->topology.num_destinations() : 0;
}
int netsep_network_num_edges(const netsep_network* n) {
  return n ? static_cast<int>(n->topology.edges().size()) : 0;
}
int netsep_network_num_messages(const netsep_network* n) {
  return n ? static_cast<int>(n->topology.messages().size()) : 0;
}
int netsep_network_has_channel(const netsep_network* n) {
  return n && n->instance ? 1 : 0;
}
int netsep_network_num_carriers(const netsep_network* n) {
  return n && n->instance ? n->instance->num_carriers() : 0;
}

netsep_status netsep_classify(const netsep_network* network, netsep_verdict** out) {
  if (!network || !out) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] {
    *out = new netsep_verdict{netsep::classify(network->topology)};
  });
}

void netsep_verdict_free(netsep_verdict* verdict) { delete verdict; }

int netsep_verdict_is_separable(const netsep_verdict* v) {
  return v && v->verdict.separable() ? 1 : 0;
}

int netsep_verdict_hub_source(const netsep_verdict* v) {
  if (!v || !v->verdict.separable()) return 0;
  return v->verdict.separable_info().hub_source.value_or(0);
}

int netsep_verdict_hub_destination(const netsep_verdict* v) {
  if (!v || !v->verdict.separable()) return 0;
  return v->verdict.separable_info().hub_destination.value_or(0);
}

int netsep_verdict_source_relabel(const netsep_verdict* v, int source) {
  if (!v || !v->verdict.separable()) return 0;
  const auto& perm = v->verdict.separable_info().source_relabeling;
  if (source < 1 || source > static_cast<int>(perm.size())) return 0;
  return perm[source - 1];
}

int netsep_verdict_destination_relabel(const netsep_verdict* v, int destination) {
  if (!v || !v->verdict.separable()) return 0;
  const auto& perm = v->verdict.separable_info().destination_relabeling;
  if (destination < 1 || destination > static_cast<int>(perm.size())) return 0;
  return perm[destination - 1];
}

netsep_status netsep_verdict_witness_kind(const netsep_verdict* v, netsep_witness_kind* out) {
  if (!v || !out || v->verdict.separable()) {
    set_error("verdict carries no witness");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out = kind_to(v->verdict.witness().kind);
  return NETSEP_OK;
}

int netsep_verdict_witness_num_edges(const netsep_verdict* v) {
  if (!v || v->verdict.separable()) return 0;
  return static_cast<int>(v->verdict.witness().edges.size());
}

netsep_status netsep_verdict_witness_edge(const netsep_verdict* v, int index, int* rx,
                                          int* tx) {
  if (!v || !rx || !tx || v->verdict.separable()) {
    set_error("verdict carries no witness");
    return NETSEP_ERROR_ARGUMENT;
  }
  const auto& edges = v->verdict.witness().edges;
  if (index < 0 || index >= static_cast<int>(edges.size())) {
    set_error("witness edge index out of range");
    return NETSEP_ERROR_ARGUMENT;
  }
  *rx = edges[index].destination;
  *tx = edges[index].source;
  return NETSEP_OK;
}

int netsep_verdict_witness_num_sources(const netsep_verdict* v) {
  if (!v || v->verdict.separable()) return 0;
  return static_cast<int>(v->verdict.witness().source_map.size());
}

int netsep_verdict_witness_num_destinations(const netsep_verdict* v) {
  if (!v || v->verdict.separable()) return 0;
  return static_cast<int>(v->verdict.witness().destination_map.size());
}

int netsep_verdict_witness_source_map(const netsep_verdict* v, int canonical_source) {
  if (!v || v->verdict.separable()) return 0;
  const auto& map = v->verdict.witness().source_map;
  if (canonical_source < 1 || canonical_source > static_cast<int>(map.size())) return 0;
  return map[canonical_source - 1];
}

int netsep_verdict_witness_destination_map(const netsep_verdict* v, int canonical_destination) {
  if (!v || v->verdict.separable()) return 0;
  const auto& map = v->verdict.witness().destination_map;
  if (canonical_destination < 1 || canonical_destination > static_cast<int>(map.size()))
    return 0;
  return map[canonical_destination - 1];
}

void netsep_solver_options_init(netsep_solver_options* options) {
  if (!options) return;
  options->log_base = NETSEP_LOG_BASE_2;
  options->tolerance = 1e-9;
  options->max_iterations = 100000;
}

netsep_status netsep_capacity_optimize(const netsep_network* network,
                                       const netsep_solver_options* options,
                                       netsep_capacity** out) {
  if (!network || !out) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out = nullptr;
  if (!network->instance) {
    set_error("network has no channel section; capacity needs carriers, powers and gains");
    return NETSEP_ERROR_VALIDATION;
  }
  netsep_solver_options defaults;
  netsep_solver_options_init(&defaults);
  const netsep_solver_options* opt = options ? options : &defaults;
  netsep::SolverOptions solver;
  solver.log_base = base_from(opt->log_base);
  solver.tolerance = opt->tolerance;
  solver.max_iterations = opt->max_iterations;

  netsep_status status = guarded([&] {
    netsep::InstanceAnalysis analysis = netsep::analyze_instance(*network->instance, solver);
    if (!analysis.verdict.separable())
      throw netsep::Error(netsep::ErrorCode::inseparable,
                          "network is inseparable; sum capacity is not characterized "
                          "(witness: " +
                              std::string(netsep::to_string(analysis.verdict.witness().kind)) +
                              ")");
    auto handle = new netsep_capacity{std::move(analysis), {}};
    for (const auto& [m, rate] : handle->analysis.report->per_message_rates)
      handle->message_order.push_back(m);
    *out = handle;
  });
  if (status != NETSEP_OK) return status;
  if (!(*out)->analysis.report->converged) {
    set_error("optimizer stopped above tolerance (residual " +
              std::to_string((*out)->analysis.report->kkt_residual) + ")");
    return NETSEP_ERROR_NONCONVERGENCE;
  }
  return NETSEP_OK;
}

void netsep_capacity_free(netsep_capacity* capacity) { delete capacity; }

double netsep_capacity_total(const netsep_capacity* c) {
  return c && c->analysis.report ? c->analysis.report->total : 0.0;
}
double netsep_capacity_kkt_residual(const netsep_capacity* c) {
  return c && c->analysis.report ? c->analysis.report->kkt_residual : 0.0;
}
int netsep_capacity_converged(const netsep_capacity* c) {
  return c && c->analysis.report && c->analysis.report->converged ? 1 : 0;
}
long netsep_capacity_iterations(const netsep_capacity* c) {
  return c && c->analysis.report ? c->analysis.report->iterations : 0;
}

double netsep_capacity_per_carrier(const netsep_capacity* c, int carrier) {
  if (!c || !c->analysis.report) return 0.0;
  const auto& per = c->analysis.report->per_carrier;
  if (carrier < 1 || carrier > static_cast<int>(per.size())) return 0.0;
  return per[carrier - 1];
}

double netsep_capacity_allocation(const netsep_capacity* c, int source, int carrier) {
  if (!c || !c->analysis.report) return 0.0;
  const auto& alloc = c->analysis.report->allocation;
  if (source < 1 || source > alloc.num_sources() || carrier < 1 ||
      carrier > alloc.num_carriers())
    return 0.0;
  return alloc.at(source, carrier);
}

int netsep_capacity_num_messages(const netsep_capacity* c) {
  return c ? static_cast<int>(c->message_order.size()) : 0;
}

netsep_status netsep_capacity_message_rate(const netsep_capacity* c, int index, int* rx,
                                           int* tx, double* rate) {
  if (!c || !rx || !tx || !rate || !c->analysis.report) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  if (index < 0 || index >= static_cast<int>(c->message_order.size())) {
    set_error("message index out of range");
    return NETSEP_ERROR_ARGUMENT;
  }
  const netsep::MessageId& m = c->message_order[index];
  *rx = m.destination;
  *tx = m.source;
  *rate = c->analysis.report->per_message_rates.at(m);
  return NETSEP_OK;
}

int netsep_capacity_canonical_source(const netsep_capacity* c, int source) {
  if (!c || !c->analysis.verdict.separable()) return 0;
  const auto& perm = c->analysis.verdict.separable_info().source_relabeling;
  if (source < 1 || source > static_cast<int>(perm.size())) return 0;
  return perm[source - 1];
}

int netsep_capacity_canonical_destination(const netsep_capacity* c, int destination) {
  if (!c || !c->analysis.verdict.separable()) return 0;
  const auto& perm = c->analysis.verdict.separable_info().destination_relabeling;
  if (destination < 1 || destination > static_cast<int>(perm.size())) return 0;
  return perm[destination - 1];
}

netsep_status netsep_gap_run(netsep_witness_kind kind, const netsep_network* instance_or_null,
                             const double* power_grid, int grid_len, netsep_log_base base,
                             netsep_gap** out) {
  if (!power_grid || !out) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  *out = nullptr;
  netsep::ForbiddenKind k;
  if (!kind_from(kind, &k)) {
    set_error("unknown witness kind");
    return NETSEP_ERROR_ARGUMENT;
  }
  if (instance_or_null && !instance_or_null->instance) {
    set_error("override network has no channel section");
    return NETSEP_ERROR_VALIDATION;
  }
  return guarded([&] {
    std::span<const double> grid(power_grid, static_cast<size_t>(grid_len));
    const netsep::ChannelInstance* override_instance =
        instance_or_null ? &*instance_or_null->instance : nullptr;
    *out = new netsep_gap{
        netsep::gap_experiment(k, grid, base_from(base), override_instance)};
  });
}

void netsep_gap_free(netsep_gap* gap) { delete gap; }

int netsep_gap_num_points(const netsep_gap* g) {
  return g ? static_cast<int>(g->table.points.size()) : 0;
}

netsep_status netsep_gap_point(const netsep_gap* g, int index, double* power,
                               double* joint_rate, double* separate_bound) {
  if (!g || !power || !joint_rate || !separate_bound) {
    set_error("null argument");
    return NETSEP_ERROR_ARGUMENT;
  }
  if (index < 0 || index >= static_cast<int>(g->table.points.size())) {
    set_error("gap point index out of range");
    return NETSEP_ERROR_ARGUMENT;
  }
  const netsep::GapPoint& p = g->table.points[index];
  *power = p.power;
  *joint_rate = p.joint_rate;
  *separate_bound = p.separate_bound;
  return NETSEP_OK;
}

double netsep_gap_separate_dof(const netsep_gap* g) {
  return g ? g->table.separate_dof : 0.0;
}
double netsep_gap_slope(const netsep_gap* g) { return g ? g->table.fit.slope : 0.0; }
double netsep_gap_intercept(const netsep_gap* g) { return g ? g->table.fit.intercept : 0.0; }
double netsep_gap_fit_residual(const netsep_gap* g) {
  return g ? g->table.fit.residual : 0.0;
}
int netsep_gap_has_crossover(const netsep_gap* g) {
  return g && g->table.crossover_power ? 1 : 0;
}
double netsep_gap_crossover_power(const netsep_gap* g) {
  return g && g->table.crossover_power ? *g->table.crossover_power : 0.0;
}

} /* extern "C" */
