#include "cran/channel_gen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cran {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Point uniform_in_disk(Rng& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

void GenConfig::validate() const {
  if (!(radius_m > 0.0)) throw std::invalid_argument("radius_m: must be positive");
  if (!(min_distance_m > 0.0))
    throw std::invalid_argument("min_distance_m: must be positive");
  if (!(ring_radius_frac >= 0.0 && ring_radius_frac <= 1.0))
    throw std::invalid_argument("ring_radius_frac: must lie in [0, 1]");
}

double Topology::distance(int k, int n) const {
  return std::hypot(user_pos[k].x - rrh_pos[n].x, user_pos[k].y - rrh_pos[n].y);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Complex Rng::complex_gaussian() {
  // Box-Muller; |g|^2 = -ln(u1) is Exp(1), so E|g|^2 = 1.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

Topology generate_topology(const GenConfig& cfg, int n_rrh, int n_users,
                           std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  Topology topo;
  topo.radius_m = cfg.radius_m;
  topo.rrh_pos.reserve(n_rrh);
  if (cfg.rrh_layout == RrhLayout::ring) {
    const double r = cfg.ring_radius_frac * cfg.radius_m;
    for (int n = 0; n < n_rrh; ++n) {
      const double theta = 2.0 * std::numbers::pi * n / n_rrh;
      topo.rrh_pos.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  } else {
    for (int n = 0; n < n_rrh; ++n)
      topo.rrh_pos.push_back(uniform_in_disk(rng, cfg.radius_m));
  }
  topo.user_pos.reserve(n_users);
  for (int k = 0; k < n_users; ++k)
    topo.user_pos.push_back(uniform_in_disk(rng, cfg.radius_m));
  return topo;
}

double path_loss_db(const GenConfig& cfg, double distance_m) {
  const double d = std::max(distance_m, cfg.min_distance_m);
  return cfg.pathloss_a_db + cfg.pathloss_b * std::log10(d);
}

ChannelState generate_channels(const Topology& topo, const GenConfig& cfg,
                               int n_antennas, std::uint64_t seed) {
  const int n_users = static_cast<int>(topo.user_pos.size());
  const int n_rrh = static_cast<int>(topo.rrh_pos.size());
  ChannelState ch(n_users, n_rrh, n_antennas);
  Rng rng(seed);
  for (int k = 0; k < n_users; ++k) {
    for (int n = 0; n < n_rrh; ++n) {
      const double gain =
          std::sqrt(from_db(-path_loss_db(cfg, topo.distance(k, n))));
      auto h = ch(k, n);
      for (int m = 0; m < n_antennas; ++m) h(m) = gain * rng.complex_gaussian();
    }
  }
  return ch;
}

double noise_power(double psd_dbm_hz, double noise_figure_db,
                   double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("noise_power: bandwidth must be positive");
  return from_db(psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) +
                 noise_figure_db - 30.0);
}

}  // namespace cran
