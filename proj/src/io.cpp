#include "cran/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

namespace cran {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double number_of(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

int integer_of(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  const auto i = v.get<std::int64_t>();
  if (i < INT32_MIN || i > INT32_MAX) fail(field, "out of range");
  return static_cast<int>(i);
}

std::vector<double> numbers_of(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_of(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// Scalar broadcast to every RRH, or a list with one entry per RRH.
std::vector<double> per_rrh(const json& v, const std::string& field, int n_rrh) {
  if (v.is_number()) return std::vector<double>(std::max(n_rrh, 0), v.get<double>());
  std::vector<double> out = numbers_of(v, field);
  if (static_cast<int>(out.size()) != n_rrh)
    fail(field, "expected " + std::to_string(n_rrh) + " values, got " +
                    std::to_string(out.size()));
  return out;
}

class Fields {
 public:
  explicit Fields(const json& obj, std::string prefix = "")
      : obj_(obj), prefix_(std::move(prefix)) {}

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(name(key), "missing");
    return *v;
  }
  std::string name(const std::string& key) const { return prefix_ + key; }

  void reject_unknown() const {
    for (const auto& item : obj_.items())
      if (!seen_.count(item.key())) fail(name(item.key()), "unknown field");
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

json topology_points(const std::vector<Point>& pts) {
  json arr = json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point> points_from(const json& v, const std::string& field,
                               std::size_t expected) {
  if (!v.is_array() || v.size() != expected)
    fail(field, "expected " + std::to_string(expected) + " [x, y] pairs");
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) fail(f, "expected [x, y]");
    out.push_back({number_of(v[i][0], f), number_of(v[i][1], f)});
  }
  return out;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

json gamma_value(double g) { return std::isinf(g) ? json(nullptr) : json(g); }

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  Fields f(doc);
  ExperimentConfig cfg;
  cfg.n_rrh = integer_of(f.need("n_rrh"), "n_rrh");
  cfg.n_users = integer_of(f.need("n_users"), "n_users");
  cfg.n_antennas = integer_of(f.need("n_antennas"), "n_antennas");
  if (cfg.n_rrh < 1) fail("n_rrh", "must be >= 1");

  if (auto v = f.find("bandwidth_hz")) cfg.bandwidth_hz = number_of(*v, "bandwidth_hz");
  cfg.tx_power_dbm = std::vector<double>(cfg.n_rrh, 30.0);
  if (auto v = f.find("tx_power_dbm")) cfg.tx_power_dbm = per_rrh(*v, "tx_power_dbm", cfg.n_rrh);
  if (auto v = f.find("radius_m")) cfg.gen.radius_m = number_of(*v, "radius_m");
  if (auto v = f.find("pathloss_a_db")) cfg.gen.pathloss_a_db = number_of(*v, "pathloss_a_db");
  if (auto v = f.find("pathloss_b")) cfg.gen.pathloss_b = number_of(*v, "pathloss_b");
  if (auto v = f.find("noise_psd_dbm_hz"))
    cfg.gen.noise_psd_dbm_hz = number_of(*v, "noise_psd_dbm_hz");
  if (auto v = f.find("noise_figure_db")) cfg.gen.noise_figure_db = number_of(*v, "noise_figure_db");
  if (auto v = f.find("min_distance_m")) cfg.gen.min_distance_m = number_of(*v, "min_distance_m");
  if (auto v = f.find("rrh_layout")) {
    if (*v == "uniform") cfg.gen.rrh_layout = RrhLayout::uniform;
    else if (*v == "ring") cfg.gen.rrh_layout = RrhLayout::ring;
    else fail("rrh_layout", "expected \"uniform\" or \"ring\"");
  }
  if (auto v = f.find("ring_radius_frac"))
    cfg.gen.ring_radius_frac = number_of(*v, "ring_radius_frac");

  cfg.fronthaul_sweep_bps = numbers_of(f.need("fronthaul_sweep_bps"), "fronthaul_sweep_bps");
  if (auto v = f.find("fronthaul_cap_bps"))
    cfg.fronthaul_cap_bps = per_rrh(*v, "fronthaul_cap_bps", cfg.n_rrh);
  if (auto v = f.find("trials")) cfg.trials = integer_of(*v, "trials");
  if (auto v = f.find("seed")) {
    if (!v->is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    cfg.seed = v->get<std::uint64_t>();
  }
  if (auto v = f.find("schemes")) {
    if (!v->is_array()) fail("schemes", "expected a list of scheme names");
    cfg.schemes.clear();
    for (const json& s : *v) {
      const auto parsed = s.is_string() ? parse_scheme(s.get<std::string>()) : std::nullopt;
      if (!parsed) fail("schemes", "unknown scheme " + s.dump() +
                                       " (expected alg1, bench1, bench2, bench3)");
      cfg.schemes.push_back(*parsed);
    }
  }
  if (auto v = f.find("tolerances")) {
    if (!v->is_object()) fail("tolerances", "expected an object");
    Fields t(*v, "tolerances.");
    if (auto x = t.find("bisection_rel_tol"))
      cfg.tol.bisection_rel_tol = number_of(*x, t.name("bisection_rel_tol"));
    if (auto x = t.find("cone_feas_tol"))
      cfg.tol.cone_feas_tol = number_of(*x, t.name("cone_feas_tol"));
    if (auto x = t.find("max_bisection_iters"))
      cfg.tol.max_bisection_iters = integer_of(*x, t.name("max_bisection_iters"));
    t.reject_unknown();
  }
  if (auto v = f.find("last_link_guard")) {
    if (!v->is_boolean()) fail("last_link_guard", "expected true or false");
    cfg.last_link_guard = v->get<bool>();
  }
  if (auto v = f.find("redraw_topology")) {
    if (!v->is_boolean()) fail("redraw_topology", "expected true or false");
    cfg.redraw_topology = v->get<bool>();
  }
  f.reject_unknown();

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json channels_to_json(const ChannelFile& file) {
  const ChannelState& ch = file.channels;
  json h = json::array();
  for (int k = 0; k < ch.n_users(); ++k) {
    json per_rrh = json::array();
    for (int n = 0; n < ch.n_rrh(); ++n) {
      json vec = json::array();
      for (int m = 0; m < ch.n_antennas(); ++m)
        vec.push_back({ch(k, n)(m).real(), ch(k, n)(m).imag()});
      per_rrh.push_back(std::move(vec));
    }
    h.push_back(std::move(per_rrh));
  }
  json doc = {{"n_rrh", ch.n_rrh()},
              {"n_users", ch.n_users()},
              {"n_antennas", ch.n_antennas()},
              {"noise_power_w", file.noise_power_w},
              {"h", std::move(h)}};
  if (file.topology) {
    doc["rrh_pos"] = topology_points(file.topology->rrh_pos);
    doc["user_pos"] = topology_points(file.topology->user_pos);
    doc["radius_m"] = file.topology->radius_m;
  }
  return doc;
}

ChannelFile channels_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("channel file: expected a JSON object");
  Fields f(doc);
  const int n_rrh = integer_of(f.need("n_rrh"), "n_rrh");
  const int n_users = integer_of(f.need("n_users"), "n_users");
  const int n_antennas = integer_of(f.need("n_antennas"), "n_antennas");
  if (n_rrh < 1 || n_users < 1 || n_antennas < 1)
    fail("n_rrh/n_users/n_antennas", "must all be >= 1");
  ChannelFile out;
  out.noise_power_w = number_of(f.need("noise_power_w"), "noise_power_w");
  out.channels = ChannelState(n_users, n_rrh, n_antennas);
  const json& h = f.need("h");
  if (!h.is_array() || static_cast<int>(h.size()) != n_users)
    fail("h", "expected " + std::to_string(n_users) + " user entries");
  for (int k = 0; k < n_users; ++k) {
    const std::string fk = "h[" + std::to_string(k) + "]";
    if (!h[k].is_array() || static_cast<int>(h[k].size()) != n_rrh)
      fail(fk, "expected " + std::to_string(n_rrh) + " RRH entries");
    for (int n = 0; n < n_rrh; ++n) {
      const std::string fn = fk + "[" + std::to_string(n) + "]";
      const json& vec = h[k][n];
      if (!vec.is_array() || static_cast<int>(vec.size()) != n_antennas)
        fail(fn, "expected " + std::to_string(n_antennas) + " antenna entries");
      for (int m = 0; m < n_antennas; ++m) {
        const std::string fm = fn + "[" + std::to_string(m) + "]";
        if (!vec[m].is_array() || vec[m].size() != 2) fail(fm, "expected [re, im]");
        out.channels(k, n)(m) = Complex(number_of(vec[m][0], fm), number_of(vec[m][1], fm));
      }
    }
  }
  if (!out.channels.all_finite()) fail("h", "entries must be finite");

  const json* rrh = f.find("rrh_pos");
  const json* users = f.find("user_pos");
  const json* radius = f.find("radius_m");
  if (rrh || users) {
    if (!rrh || !users) fail(rrh ? "user_pos" : "rrh_pos", "positions come in pairs");
    Topology topo;
    topo.rrh_pos = points_from(*rrh, "rrh_pos", n_rrh);
    topo.user_pos = points_from(*users, "user_pos", n_users);
    if (radius) topo.radius_m = number_of(*radius, "radius_m");
    out.topology = std::move(topo);
  }
  f.reject_unknown();
  return out;
}

void write_channel_file(const std::filesystem::path& path, const ChannelFile& file) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << channels_to_json(file).dump(1) << '\n';
  if (!out) throw ConfigError("error writing '" + path.string() + "'");
}

ChannelFile read_channel_file(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  try {
    return channels_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json report_to_json(const SolveReport& report) {
  json iters = json::array();
  for (const IterationRecord& r : report.iterations) {
    json rec = {{"t", r.t},
                {"gamma1", gamma_value(r.gamma1)},
                {"gamma2", gamma_value(r.gamma2)},
                {"gamma", gamma_value(r.gamma)},
                {"removed_user", r.removed ? json(r.removed->user) : json(nullptr)},
                {"removed_rrh", r.removed ? json(r.removed->rrh) : json(nullptr)},
                {"omega_sizes", r.omega_sizes}};
    if (r.added) {
      rec["added_user"] = r.added->user;
      rec["added_rrh"] = r.added->rrh;
    }
    iters.push_back(std::move(rec));
  }
  return {{"scheme", report.scheme},
          {"iterations", std::move(iters)},
          {"final_gamma", report.final_gamma},
          {"final_gamma_db", to_db(report.final_gamma)},
          {"final_association", report.final_association.sets()}};
}

}  // namespace cran
