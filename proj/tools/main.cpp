// Command-line front end. All analysis goes through the shared-library C API;
// this file only handles flags, files, and report formatting.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "netsep.h"
#include "report.hpp"

namespace {

using netsep_cli::ojson;
using netsep_cli::Request;

struct NetworkDeleter {
  void operator()(netsep_network* p) const { netsep_network_free(p); }
};
struct VerdictDeleter {
  void operator()(netsep_verdict* p) const { netsep_verdict_free(p); }
};
struct CapacityDeleter {
  void operator()(netsep_capacity* p) const { netsep_capacity_free(p); }
};
struct GapDeleter {
  void operator()(netsep_gap* p) const { netsep_gap_free(p); }
};

using NetworkPtr = std::unique_ptr<netsep_network, NetworkDeleter>;
using VerdictPtr = std::unique_ptr<netsep_verdict, VerdictDeleter>;
using CapacityPtr = std::unique_ptr<netsep_capacity, CapacityDeleter>;
using GapPtr = std::unique_ptr<netsep_gap, GapDeleter>;

// The process exit code mirrors the library status: 1 I/O or parse or usage,
// 2 validation, 3 inseparable capacity request, 4 non-convergence.
int exit_code_of(netsep_status status) {
  switch (status) {
    case NETSEP_OK: return 0;
    case NETSEP_ERROR_IO: return 1;
    case NETSEP_ERROR_VALIDATION: return 2;
    case NETSEP_ERROR_INSEPARABLE: return 3;
    case NETSEP_ERROR_NONCONVERGENCE: return 4;
    case NETSEP_ERROR_ARGUMENT: return 1;
  }
  return 1;
}

class CliFailure : public std::runtime_error {
 public:
  CliFailure(int code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

[[noreturn]] void fail(netsep_status status) {
  throw CliFailure(exit_code_of(status), netsep_last_error());
}

NetworkPtr load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure(1, "cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  netsep_network* raw = nullptr;
  netsep_status status = netsep_network_parse_json(text.c_str(), &raw);
  if (status != NETSEP_OK)
    throw CliFailure(exit_code_of(status), path + ": " + netsep_last_error());
  return NetworkPtr(raw);
}

bool parse_kind(const std::string& name, netsep_witness_kind* out) {
  if (name == "x") {
    *out = NETSEP_WITNESS_X_NETWORK;
    return true;
  }
  if (name == "sigma") {
    *out = NETSEP_WITNESS_SIGMA;
    return true;
  }
  if (name == "rsigma" || name == "reverse-sigma") {
    *out = NETSEP_WITNESS_REVERSE_SIGMA;
    return true;
  }
  return false;
}

void finish(ojson report, const Request& request,
            std::chrono::steady_clock::time_point started) {
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - started)
                  .count();
  report["duration_ms"] = ms;
  netsep_cli::emit(netsep_cli::dump_report(report), request.output_path);
}

int run_classify(const Request& request) {
  auto started = std::chrono::steady_clock::now();
  NetworkPtr network = load_network(request.input_path);
  netsep_verdict* raw = nullptr;
  netsep_status status = netsep_classify(network.get(), &raw);
  if (status != NETSEP_OK) fail(status);
  VerdictPtr verdict(raw);

  ojson report = netsep_cli::report_header(request);
  report["network"] = netsep_cli::network_echo(network.get());
  report["result"] = netsep_cli::verdict_json(verdict.get());
  finish(std::move(report), request, started);
  return 0;
}

int run_capacity(const Request& request) {
  auto started = std::chrono::steady_clock::now();
  NetworkPtr network = load_network(request.input_path);

  netsep_solver_options options;
  netsep_solver_options_init(&options);
  options.log_base = netsep_cli::log_base_of(request);
  options.tolerance = request.tolerance;
  options.max_iterations = request.max_iterations;

  ojson report = netsep_cli::report_header(request);
  report["network"] = netsep_cli::network_echo(network.get());

  netsep_capacity* raw = nullptr;
  netsep_status status = netsep_capacity_optimize(network.get(), &options, &raw);
  CapacityPtr capacity(raw);

  if (status == NETSEP_ERROR_INSEPARABLE) {
    // Re-classify so the report can carry the witness alongside the error.
    netsep_verdict* v = nullptr;
    if (netsep_classify(network.get(), &v) == NETSEP_OK) {
      VerdictPtr verdict(v);
      report["result"] = netsep_cli::verdict_json(verdict.get());
    }
    report["error"] = {{"category", "inseparable"}, {"message", netsep_last_error()}};
    finish(std::move(report), request, started);
    return 3;
  }
  if (status != NETSEP_OK && status != NETSEP_ERROR_NONCONVERGENCE) fail(status);

  report["result"] = netsep_cli::capacity_json(capacity.get(), network.get());
  if (status == NETSEP_ERROR_NONCONVERGENCE) {
    report["error"] = {{"category", "nonconvergence"}, {"message", netsep_last_error()}};
    finish(std::move(report), request, started);
    return 4;
  }
  finish(std::move(report), request, started);
  return 0;
}

int run_gap(const Request& request, bool fit_only) {
  auto started = std::chrono::steady_clock::now();
  netsep_witness_kind kind;
  if (!parse_kind(request.kind, &kind))
    throw CliFailure(1, "unknown --kind \"" + request.kind +
                            "\"; expected x, sigma, or rsigma");

  NetworkPtr override_network;
  if (!request.input_path.empty()) override_network = load_network(request.input_path);

  std::vector<double> grid = netsep_cli::parse_power_grid(request.pgrid);
  netsep_gap* raw = nullptr;
  netsep_status status =
      netsep_gap_run(kind, override_network.get(), grid.data(),
                     static_cast<int>(grid.size()), netsep_cli::log_base_of(request), &raw);
  if (status != NETSEP_OK) fail(status);
  GapPtr gap(raw);

  if (request.format == "csv") {
    netsep_cli::emit(netsep_cli::gap_csv(gap.get()), request.output_path);
    return 0;
  }

  ojson report = netsep_cli::report_header(request);
  if (override_network)
    report["network"] = netsep_cli::network_echo(override_network.get());
  else {
    netsep_network* canonical = nullptr;
    if (netsep_canonical_network(kind, &canonical) == NETSEP_OK) {
      NetworkPtr holder(canonical);
      report["network"] = netsep_cli::network_echo(holder.get());
    }
  }
  report["result"] = netsep_cli::gap_json(gap.get(), fit_only);
  finish(std::move(report), request, started);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netsep: separability classification, MAC-Z-BC sum capacity, and "
               "joint-vs-separate coding gaps for parallel Gaussian networks"};
  app.require_subcommand(1);

  Request request;
  auto add_common = [&](CLI::App* cmd, bool with_grid) {
    cmd->add_option("--output", request.output_path, "write the report here (default stdout)");
    cmd->add_option("--format", request.format, "json or csv (csv for gap/dof tables)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--log-base", request.log_base, "2 (bits) or e (nats)")
        ->check(CLI::IsMember({"2", "e"}));
    cmd->add_option("--tol", request.tolerance, "optimizer tolerance (default 1e-9)");
    cmd->add_option("--max-iter", request.max_iterations,
                    "optimizer iteration cap (default 100000)");
    if (with_grid)
      cmd->add_option("--pgrid", request.pgrid, "power grid lo:hi:npoints (default 1e3:1e9:7)");
    cmd->add_option("--seed", request.seed, "seed echoed into the report");
  };

  CLI::App* classify = app.add_subcommand("classify", "separable or inseparable, with witness");
  classify->add_option("--input", request.input_path, "network JSON file")->required();
  add_common(classify, false);

  CLI::App* capacity = app.add_subcommand(
      "capacity", "sum capacity and optimal power allocation of a MAC-Z-BC instance");
  capacity->add_option("--input", request.input_path, "instance JSON file")->required();
  add_common(capacity, false);

  CLI::App* allocate = app.add_subcommand(
      "allocate", "same pipeline as capacity; emphasizes the per-carrier power split");
  allocate->add_option("--input", request.input_path, "instance JSON file")->required();
  add_common(allocate, false);

  CLI::App* gap = app.add_subcommand(
      "gap", "joint-coding sum rate vs the separate-coding line over a power grid");
  gap->add_option("--kind", request.kind, "x, sigma, or rsigma")->required();
  gap->add_option("--input", request.input_path,
                  "optional gain override (must match the canonical topology)");
  add_common(gap, true);

  CLI::App* dof = app.add_subcommand("dof", "degrees-of-freedom slope fit of the joint scheme");
  dof->add_option("--kind", request.kind, "x, sigma, or rsigma")->required();
  dof->add_option("--input", request.input_path, "optional gain override");
  add_common(dof, true);

  CLI::App* demo = app.add_subcommand("demo", "canonical instance + scheme + gap table");
  demo->add_option("kind", request.kind, "x, sigma, or rsigma")->required();
  add_common(demo, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // help/version exit clean; usage errors map to 1
  }

  try {
    if (classify->parsed()) {
      request.command = "classify";
      return run_classify(request);
    }
    if (capacity->parsed()) {
      request.command = "capacity";
      return run_capacity(request);
    }
    if (allocate->parsed()) {
      request.command = "allocate";
      return run_capacity(request);
    }
    if (gap->parsed()) {
      request.command = "gap";
      return run_gap(request, false);
    }
    if (dof->parsed()) {
      request.command = "dof";
      return run_gap(request, true);
    }
    if (demo->parsed()) {
      request.command = "demo";
      request.input_path.clear();  // demo never reads a file
      return run_gap(request, false);
    }
  } catch (const CliFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
