// Command-line front end: channel generation, single-instance solves, the
// exhaustive oracle and the Monte-Carlo sweep.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cran/association.hpp"
#include "cran/io.hpp"
#include "cran/oracle.hpp"
#include "cran/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIndeterminate = 2;

struct Args {
  std::string config;
  std::string channels;
  std::string out;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  std::optional<double> fronthaul;
  std::optional<int> threads;
  bool timing = false;
  bool allow_unserved = false;
};

cran::NetworkConfig single_network(const cran::ExperimentConfig& cfg,
                                   const Args& args) {
  if (args.fronthaul) return cfg.network(*args.fronthaul);
  if (cfg.fronthaul_cap_bps.empty())
    throw cran::ConfigError(
        "no fronthaul capacity: pass --fronthaul or set fronthaul_cap_bps in the config");
  return cfg.network();
}

int threads_for(const Args& args) {
  if (args.threads) {
    if (*args.threads < 1) throw cran::ConfigError("--threads: must be >= 1");
    return *args.threads;
  }
  return cran::default_threads();
}

int gen_channels(const Args& args) {
  cran::ExperimentConfig cfg = cran::load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  cran::TrialInstance inst = cran::make_trial(cfg, 0);
  cran::ChannelFile file{std::move(inst.channels), cfg.noise_power_w(),
                         std::move(inst.topology)};
  cran::write_channel_file(args.out, file);
  return kExitOk;
}

int solve(const Args& args) {
  const cran::ExperimentConfig cfg = cran::load_config(args.config);
  const auto scheme = cran::parse_scheme(args.scheme);
  if (!scheme)
    throw cran::ConfigError("--scheme: unknown scheme '" + args.scheme + "'");
  cran::ChannelFile file = cran::read_channel_file(args.channels);
  const cran::NetworkConfig net = single_network(cfg, args);
  const cran::RunOptions opts{cfg.tol, cfg.last_link_guard};
  try {
    const cran::SolveReport rep =
        cran::run_scheme(*scheme, file.channels,
                         file.topology ? &*file.topology : nullptr, net, opts);
    std::cout << cran::report_to_json(rep).dump(2) << '\n';
    return kExitOk;
  } catch (const cran::RunIndeterminate& e) {
    nlohmann::json partial = cran::report_to_json(e.partial());
    partial["status"] = "indeterminate";
    partial["error"] = e.what();
    std::cout << partial.dump(2) << '\n';
    std::cerr << "error: " << e.what() << '\n';
    return kExitIndeterminate;
  }
}

int sweep(const Args& args) {
  const cran::ExperimentConfig cfg = cran::load_config(args.config);
  const int threads = threads_for(args);
  const cran::SweepResult result = cran::run_sweep(cfg, threads);
  std::ofstream out(args.out);
  if (!out) throw cran::ConfigError("cannot write '" + args.out + "'");
  cran::write_csv(out, result, args.timing);
  out.close();
  if (!out) throw cran::ConfigError("error writing '" + args.out + "'");
  int failed = 0;
  for (const auto& a : result.aggregates) failed += a.n_failed;
  if (failed > 0)
    std::cerr << "warning: " << failed << " runs were indeterminate (see status column)\n";
  return kExitOk;
}

int oracle(const Args& args) {
  const cran::ExperimentConfig cfg = cran::load_config(args.config);
  const cran::ChannelFile file = cran::read_channel_file(args.channels);
  const cran::NetworkConfig net = single_network(cfg, args);
  if (file.channels.n_users() != net.n_users || file.channels.n_rrh() != net.n_rrh ||
      file.channels.n_antennas() != net.n_antennas)
    throw cran::DimensionError("channel file dimensions do not match the config");
  const cran::OracleResult best = cran::exhaustive_best(
      file.channels, net, cfg.tol, !args.allow_unserved, threads_for(args));
  const nlohmann::json doc = {{"gamma_opt", best.gamma},
                              {"gamma_opt_db", cran::to_db(best.gamma)},
                              {"assoc_opt", best.association.sets()},
                              {"evaluated", best.evaluated}};
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-RAN max-min SINR beamforming simulator"};
  app.require_subcommand(1);
  Args args;

  auto* gen = app.add_subcommand("gen-channels", "Draw one topology and channel realization");
  gen->add_option("--config", args.config, "Experiment config (JSON)")->required();
  gen->add_option("--seed", args.seed, "Override the config seed");
  gen->add_option("--out", args.out, "Output channel file")->required();

  auto* sol = app.add_subcommand("solve", "Run one scheme and print its trace");
  sol->add_option("--scheme", args.scheme, "alg1, bench1, bench2 or bench3")->required();
  sol->add_option("--channels", args.channels, "Channel file")->required();
  sol->add_option("--config", args.config, "Experiment config (JSON)")->required();
  sol->add_option("--fronthaul", args.fronthaul, "Common fronthaul capacity in bit/s");

  auto* swp = app.add_subcommand("sweep", "Monte-Carlo sweep over fronthaul capacity");
  swp->add_option("--config", args.config, "Experiment config (JSON)")->required();
  swp->add_option("--out", args.out, "Output CSV")->required();
  swp->add_flag("--timing", args.timing, "Fill the runtime_ms column");
  swp->add_option("--threads", args.threads, "Worker threads (default: CRAN_THREADS or 1)");

  auto* orc = app.add_subcommand("oracle", "Exhaustive search over all associations");
  orc->add_option("--channels", args.channels, "Channel file")->required();
  orc->add_option("--config", args.config, "Experiment config (JSON)")->required();
  orc->add_option("--fronthaul", args.fronthaul, "Common fronthaul capacity in bit/s");
  orc->add_option("--threads", args.threads, "Worker threads (default: CRAN_THREADS or 1)");
  orc->add_flag("--allow-unserved", args.allow_unserved,
                "Also evaluate associations that leave a user unserved");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*gen) return gen_channels(args);
    if (*sol) return solve(args);
    if (*swp) return sweep(args);
    return oracle(args);
  } catch (const cran::SolverIndeterminate& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIndeterminate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
