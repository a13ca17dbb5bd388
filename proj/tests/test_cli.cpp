#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const char* sim() { return CRAN_SIM_PATH; }

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "cran_cli_test";
  fs::create_directories(d);
  return d;
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + sim() + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config() {
  const fs::path p = scratch() / "tiny.json";
  std::ofstream(p) << R"({
    "n_rrh": 2, "n_users": 2, "n_antennas": 2,
    "fronthaul_sweep_bps": [1e7, 1e9],
    "fronthaul_cap_bps": 2e7,
    "trials": 2, "seed": 99,
    "schemes": ["alg1", "bench3"]
  })";
  return p;
}

}  // namespace

TEST_CASE("sweep writes a CSV") {
  const fs::path cfg = write_config();
  const fs::path csv = scratch() / "sweep.csv";
  fs::remove(csv);
  const Run r = run("sweep --config \"" + cfg.string() + "\" --out \"" + csv.string() + "\"");
  CHECK(r.code == 0);
  const std::string body = slurp(csv);
  CHECK(body.rfind("fronthaul_bps,scheme,trial,", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 1 + 2 * (4 + 2));
}

TEST_CASE("missing config is a usage error naming the file") {
  const Run r = run("sweep --config /nonexistent/cfg.json --out x.csv");
  CHECK(r.code == 1);
  CHECK(r.err.find("/nonexistent/cfg.json") != std::string::npos);
}

TEST_CASE("unknown options and subcommands are rejected") {
  CHECK(run("sweep --config a.json --out b.csv --bogus").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("").code == 1);
}

TEST_CASE("generate channels, solve and run the oracle") {
  const fs::path cfg = write_config();
  const fs::path ch = scratch() / "channels.json";
  REQUIRE(run("gen-channels --config \"" + cfg.string() + "\" --seed 5 --out \"" +
              ch.string() + "\"")
              .code == 0);
  const auto doc = nlohmann::json::parse(slurp(ch));
  CHECK(doc["h"].size() == 2);

  const Run s = run("solve --scheme alg1 --channels \"" + ch.string() + "\" --config \"" +
                    cfg.string() + "\"");
  REQUIRE(s.code == 0);
  const auto trace = nlohmann::json::parse(s.out);
  CHECK(trace["scheme"] == "alg1");
  CHECK(trace["iterations"].size() >= 1);
  CHECK(trace["iterations"][0]["t"] == 1);

  const Run o = run("oracle --channels \"" + ch.string() + "\" --config \"" + cfg.string() +
                    "\" --fronthaul 1e9");
  REQUIRE(o.code == 0);
  const auto best = nlohmann::json::parse(o.out);
  CHECK(best["evaluated"] == 9);
  CHECK(best["gamma_opt"].get<double>() > 0.0);

  CHECK(run("solve --scheme alg9 --channels \"" + ch.string() + "\" --config \"" +
            cfg.string() + "\"")
            .code == 1);
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"desk_scale.json", "paper_scale.json"}) {
    const fs::path cfg = fs::path(CRAN_CONFIG_DIR) / name;
    const fs::path ch = scratch() / "shipped.json";
    CHECK_MESSAGE(run("gen-channels --config \"" + cfg.string() + "\" --out \"" + ch.string() + "\"")
                      .code == 0,
                  name);
  }
}
