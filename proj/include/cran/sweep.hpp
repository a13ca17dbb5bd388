#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cran/association.hpp"
#include "cran/beamforming.hpp"
#include "cran/channel_gen.hpp"
#include "cran/model.hpp"

namespace cran {

enum class Scheme { alg1, bench1, bench2, bench3 };

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// Everything a Monte-Carlo run needs. RRHs share one fronthaul capacity
/// per sweep point; fronthaul_cap_bps is the per-RRH vector used by
/// single-instance commands.
struct ExperimentConfig {
  int n_rrh = 0;
  int n_users = 0;
  int n_antennas = 0;
  double bandwidth_hz = 10e6;
  std::vector<double> tx_power_dbm;  // one per RRH
  GenConfig gen;
  std::vector<double> fronthaul_sweep_bps;
  std::vector<double> fronthaul_cap_bps;  // empty or one per RRH
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<Scheme> schemes{Scheme::alg1, Scheme::bench1, Scheme::bench2,
                              Scheme::bench3};
  SolverTolerances tol;
  bool last_link_guard = true;
  bool redraw_topology = true;  // false: one topology, fresh fading per trial

  /// Throws std::invalid_argument whose message starts with the field name.
  void validate() const;

  double noise_power_w() const;
  /// Network with every RRH at fronthaul capacity common_cap_bps.
  NetworkConfig network(double common_cap_bps) const;
  /// Network with the per-RRH fronthaul_cap_bps vector.
  NetworkConfig network() const;
};

struct TrialInstance {
  Topology topology;
  ChannelState channels;
};

/// Deterministic instance for a trial; independent of the sweep point.
TrialInstance make_trial(const ExperimentConfig& cfg, int trial);

/// Runs one scheme. Without a topology, nearest means strongest channel.
/// Throws RunIndeterminate like the schemes themselves.
SolveReport run_scheme(Scheme scheme, const ChannelState& ch,
                       const Topology* topo, const NetworkConfig& net,
                       const RunOptions& opts);

struct TrialRow {
  double fronthaul_bps = 0.0;
  Scheme scheme = Scheme::alg1;
  int trial = 0;
  bool ok = false;
  double gamma = 0.0;
  int iterations = 0;
  double runtime_ms = 0.0;
};

struct AggregateRow {
  double fronthaul_bps = 0.0;
  Scheme scheme = Scheme::alg1;
  double gamma = 0.0;     // mean linear SINR over ok trials
  double gamma_db = 0.0;  // mean of the per-trial dB values
  double iterations = 0.0;
  double runtime_ms = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct SweepResult {
  std::vector<TrialRow> rows;  // ordered by (T, trial, scheme)
  std::vector<AggregateRow> aggregates;  // ordered by (T, scheme)
};

SweepResult run_sweep(const ExperimentConfig& cfg, int threads = 1);

/// CSV with the trial rows of each sweep point followed by its "mean" rows.
/// Runtimes are left blank unless with_timing is set, so that equal inputs
/// give equal bytes.
void write_csv(std::ostream& out, const SweepResult& result,
               bool with_timing = false);

/// Worker count from CRAN_THREADS, else 1.
int default_threads();

}  // namespace cran
