#include "cran/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cran/parallel.hpp"

namespace cran {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// Seed streams derived from the experiment seed; distinct purposes never
// share an index.
constexpr std::uint64_t kSharedTopology = ~std::uint64_t{0};
std::uint64_t topology_stream(int trial) { return 2 * static_cast<std::uint64_t>(trial); }
std::uint64_t fading_stream(int trial) { return 2 * static_cast<std::uint64_t>(trial) + 1; }

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::alg1: return "alg1";
    case Scheme::bench1: return "bench1";
    case Scheme::bench2: return "bench2";
    case Scheme::bench3: return "bench3";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::alg1, Scheme::bench1, Scheme::bench2, Scheme::bench3})
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  require(n_rrh >= 1, "n_rrh: must be >= 1");
  require(n_users >= 1, "n_users: must be >= 1");
  require(n_antennas >= 1, "n_antennas: must be >= 1");
  require(bandwidth_hz > 0.0 && std::isfinite(bandwidth_hz),
          "bandwidth_hz: must be positive");
  require(static_cast<int>(tx_power_dbm.size()) == n_rrh,
          "tx_power_dbm: expected a scalar or one value per RRH");
  for (double p : tx_power_dbm)
    require(std::isfinite(p), "tx_power_dbm: values must be finite");
  require(!fronthaul_sweep_bps.empty(), "fronthaul_sweep_bps: must be nonempty");
  for (std::size_t i = 0; i < fronthaul_sweep_bps.size(); ++i) {
    require(fronthaul_sweep_bps[i] >= 0.0 && !std::isnan(fronthaul_sweep_bps[i]),
            "fronthaul_sweep_bps: values must be nonnegative");
    require(i == 0 || fronthaul_sweep_bps[i] > fronthaul_sweep_bps[i - 1],
            "fronthaul_sweep_bps: must be strictly increasing");
  }
  require(fronthaul_cap_bps.empty() ||
              static_cast<int>(fronthaul_cap_bps.size()) == n_rrh,
          "fronthaul_cap_bps: expected a scalar or one value per RRH");
  for (double t : fronthaul_cap_bps)
    require(t >= 0.0 && !std::isnan(t), "fronthaul_cap_bps: values must be nonnegative");
  require(trials >= 1, "trials: must be >= 1");
  require(!schemes.empty(), "schemes: must name at least one scheme");
  for (std::size_t i = 0; i < schemes.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      require(schemes[i] != schemes[j], "schemes: duplicate entry");
  gen.validate();
  tol.validate();
}

double ExperimentConfig::noise_power_w() const {
  return noise_power(gen.noise_psd_dbm_hz, gen.noise_figure_db, bandwidth_hz);
}

NetworkConfig ExperimentConfig::network(double common_cap_bps) const {
  NetworkConfig net;
  net.n_rrh = n_rrh;
  net.n_users = n_users;
  net.n_antennas = n_antennas;
  net.bandwidth_hz = bandwidth_hz;
  for (double p : tx_power_dbm) net.power_cap_w.push_back(dbm_to_watts(p));
  net.fronthaul_cap_bps.assign(n_rrh, common_cap_bps);
  net.noise_power_w = noise_power_w();
  return net;
}

NetworkConfig ExperimentConfig::network() const {
  if (fronthaul_cap_bps.empty())
    throw std::invalid_argument("fronthaul_cap_bps: required for a single instance");
  NetworkConfig net = network(0.0);
  net.fronthaul_cap_bps = fronthaul_cap_bps;
  return net;
}

TrialInstance make_trial(const ExperimentConfig& cfg, int trial) {
  const std::uint64_t topo_seed = derive_seed(
      cfg.seed, cfg.redraw_topology ? topology_stream(trial) : kSharedTopology);
  TrialInstance inst;
  inst.topology = generate_topology(cfg.gen, cfg.n_rrh, cfg.n_users, topo_seed);
  inst.channels = generate_channels(inst.topology, cfg.gen, cfg.n_antennas,
                                    derive_seed(cfg.seed, fading_stream(trial)));
  return inst;
}

SolveReport run_scheme(Scheme scheme, const ChannelState& ch,
                       const Topology* topo, const NetworkConfig& net,
                       const RunOptions& opts) {
  switch (scheme) {
    case Scheme::alg1:
      return run_algorithm1(ch, net, opts, Selector::removal_score);
    case Scheme::bench1:
      return run_algorithm1(ch, net, opts, Selector::interference_score);
    case Scheme::bench2:
      return run_benchmark2(ch, net, opts, topo);
    case Scheme::bench3:
      return run_benchmark3(ch, net, opts, topo);
  }
  throw std::logic_error("unknown scheme");
}

SweepResult run_sweep(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  std::vector<TrialInstance> instances;
  instances.reserve(cfg.trials);
  for (int i = 0; i < cfg.trials; ++i) instances.push_back(make_trial(cfg, i));

  const std::size_t n_t = cfg.fronthaul_sweep_bps.size();
  const std::size_t n_s = cfg.schemes.size();
  const std::size_t per_point = static_cast<std::size_t>(cfg.trials) * n_s;
  const RunOptions opts{cfg.tol, cfg.last_link_guard};

  SweepResult out;
  out.rows.resize(n_t * per_point);
  parallel_for(out.rows.size(), threads, [&](std::size_t idx) {
    const std::size_t ti = idx / per_point;
    const int trial = static_cast<int>(idx % per_point / n_s);
    TrialRow& row = out.rows[idx];
    row.fronthaul_bps = cfg.fronthaul_sweep_bps[ti];
    row.scheme = cfg.schemes[idx % n_s];
    row.trial = trial;
    const NetworkConfig net = cfg.network(row.fronthaul_bps);
    const auto start = std::chrono::steady_clock::now();
    try {
      const SolveReport rep = run_scheme(row.scheme, instances[trial].channels,
                                         &instances[trial].topology, net, opts);
      row.ok = true;
      row.gamma = rep.final_gamma;
      row.iterations = static_cast<int>(rep.iterations.size());
    } catch (const RunIndeterminate& e) {
      row.iterations = static_cast<int>(e.partial().iterations.size());
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  });

  for (std::size_t ti = 0; ti < n_t; ++ti) {
    for (std::size_t si = 0; si < n_s; ++si) {
      AggregateRow agg;
      agg.fronthaul_bps = cfg.fronthaul_sweep_bps[ti];
      agg.scheme = cfg.schemes[si];
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const TrialRow& r = out.rows[ti * per_point + trial * n_s + si];
        if (!r.ok) {
          ++agg.n_failed;
          continue;
        }
        ++agg.n_ok;
        agg.gamma += r.gamma;
        agg.gamma_db += to_db(r.gamma);
        agg.iterations += r.iterations;
        agg.runtime_ms += r.runtime_ms;
      }
      if (agg.n_ok > 0) {
        agg.gamma /= agg.n_ok;
        agg.gamma_db /= agg.n_ok;
        agg.iterations /= agg.n_ok;
        agg.runtime_ms /= agg.n_ok;
      } else {
        agg.gamma = agg.gamma_db = agg.iterations = agg.runtime_ms = std::nan("");
      }
      out.aggregates.push_back(agg);
    }
  }
  return out;
}

void write_csv(std::ostream& out, const SweepResult& result, bool with_timing) {
  out << "fronthaul_bps,scheme,trial,gamma_linear,gamma_db,iterations,runtime_ms,status\n";
  std::size_t next_row = 0;
  for (std::size_t a = 0; a < result.aggregates.size();) {
    const double t = result.aggregates[a].fronthaul_bps;
    for (; next_row < result.rows.size() && result.rows[next_row].fronthaul_bps == t;
         ++next_row) {
      const TrialRow& r = result.rows[next_row];
      out << number(r.fronthaul_bps) << ',' << scheme_name(r.scheme) << ','
          << r.trial << ',';
      if (r.ok) out << number(r.gamma) << ',' << number(to_db(r.gamma));
      else out << ',';
      out << ',' << r.iterations << ',';
      if (with_timing) out << number(r.runtime_ms);
      out << ',' << (r.ok ? "ok" : "indeterminate") << '\n';
    }
    for (; a < result.aggregates.size() && result.aggregates[a].fronthaul_bps == t; ++a) {
      const AggregateRow& g = result.aggregates[a];
      out << number(g.fronthaul_bps) << ',' << scheme_name(g.scheme) << ",mean,"
          << number(g.gamma) << ',' << number(g.gamma_db) << ','
          << number(g.iterations) << ',';
      if (with_timing) out << number(g.runtime_ms);
      out << ",n_ok=" << g.n_ok << ";n_failed=" << g.n_failed << '\n';
    }
  }
}

int default_threads() {
  if (const char* env = std::getenv("CRAN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace cran
