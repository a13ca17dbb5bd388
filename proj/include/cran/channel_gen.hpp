#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cran/model.hpp"

namespace cran {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class RrhLayout { uniform, ring };

/// Deployment and propagation parameters. Defaults follow the reference
/// deployment: 500 m disk, PL(d) = 30.6 + 36.7 log10(d) dB, -169 dBm/Hz
/// noise with a 7 dB noise figure.
struct GenConfig {
  double radius_m = 500.0;
  double pathloss_a_db = 30.6;
  double pathloss_b = 36.7;
  double noise_psd_dbm_hz = -169.0;
  double noise_figure_db = 7.0;
  double min_distance_m = 1.0;
  RrhLayout rrh_layout = RrhLayout::uniform;
  double ring_radius_frac = 0.5;  // ring radius as a fraction of radius_m

  void validate() const;
};

struct Topology {
  std::vector<Point> rrh_pos;
  std::vector<Point> user_pos;
  double radius_m = 0.0;

  double distance(int k, int n) const;
};

/// SplitMix64 finalizer applied to base ^ mix(index). Used to derive
/// independent per-trial and per-purpose seeds from one experiment seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Portable random stream: std::mt19937_64 (bit-exact across standard
/// libraries) with hand-written transforms, since the std distributions
/// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Circularly symmetric complex Gaussian with unit variance.
  Complex complex_gaussian();

 private:
  std::mt19937_64 engine_;
};

Topology generate_topology(const GenConfig& cfg, int n_rrh, int n_users,
                           std::uint64_t seed);

/// Path loss in dB at distance d (clamped to min_distance_m).
double path_loss_db(const GenConfig& cfg, double distance_m);

/// Rayleigh fading scaled by the distance-dependent path loss.
ChannelState generate_channels(const Topology& topo, const GenConfig& cfg,
                               int n_antennas, std::uint64_t seed);

/// Receiver noise power in watts over the given bandwidth.
double noise_power(double psd_dbm_hz, double noise_figure_db,
                   double bandwidth_hz);

}  // namespace cran
