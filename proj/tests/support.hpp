#pragma once

// Shared helpers for the test binaries: a small seeded generator that does
// not share code with the library RNG, and slow reference versions of the
// formulas under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cran/association.hpp"
#include "cran/channel_gen.hpp"
#include "cran/model.hpp"

namespace testing_support {

using cran::Complex;

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  Complex cnormal() { return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)}; }

 private:
  std::uint64_t state_;
};

inline cran::ChannelState random_channels(TestRng& rng, int k, int n, int m,
                                          double scale = 1.0) {
  cran::ChannelState ch(k, n, m);
  for (int u = 0; u < k; ++u)
    for (int r = 0; r < n; ++r)
      for (int a = 0; a < m; ++a) ch(u, r)(a) = scale * rng.cnormal();
  return ch;
}

inline cran::BeamformerSet random_beamformers(TestRng& rng, int k, int n, int m) {
  cran::BeamformerSet bf(k, n, m);
  for (int u = 0; u < k; ++u)
    for (int r = 0; r < n; ++r)
      for (int a = 0; a < m; ++a) bf(u, r)(a) = rng.cnormal();
  return bf;
}

// Random map in which every user keeps at least one RRH.
inline cran::AssociationMap random_serving_association(TestRng& rng, int n_rrh,
                                                       int n_users) {
  cran::AssociationMap a(n_rrh, n_users);
  for (int k = 0; k < n_users; ++k) {
    a.insert(rng.integer(0, n_rrh - 1), k);
    for (int n = 0; n < n_rrh; ++n)
      if (rng.uniform() < 0.5) a.insert(n, k);
  }
  return a;
}

// sum_m conj(h_m) w_m, written out.
inline Complex inner(const cran::ChannelState& ch, const cran::BeamformerSet& bf,
                     int hk, int n, int wk) {
  Complex acc = 0.0;
  for (int m = 0; m < ch.n_antennas(); ++m)
    acc += std::conj(ch(hk, n)(m)) * bf(wk, n)(m);
  return acc;
}

inline double ref_sinr(const cran::ChannelState& ch, const cran::BeamformerSet& bf,
                       double noise, int k) {
  Complex sig = 0.0;
  for (int n = 0; n < ch.n_rrh(); ++n) sig += inner(ch, bf, k, n, k);
  double den = noise;
  for (int j = 0; j < ch.n_users(); ++j) {
    if (j == k) continue;
    Complex x = 0.0;
    for (int n = 0; n < ch.n_rrh(); ++n) x += inner(ch, bf, k, n, j);
    den += std::norm(x);
  }
  return std::norm(sig) / den;
}

inline double ref_removal_score(const cran::ChannelState& ch,
                                const cran::BeamformerSet& bf, double noise,
                                int k, int n_bar) {
  double num = 0.0;
  for (int n = 0; n < ch.n_rrh(); ++n)
    if (n != n_bar) num += std::norm(inner(ch, bf, k, n, k));
  double den = noise;
  for (int j = 0; j < ch.n_users(); ++j) {
    if (j == k) continue;
    Complex x = 0.0;
    for (int n = 0; n < ch.n_rrh(); ++n) x += inner(ch, bf, k, n, j);
    den += std::norm(x);
  }
  return num / den;
}

inline double ref_interference_score(const cran::ChannelState& ch,
                                     const cran::BeamformerSet& bf, int k, int n) {
  double s = 0.0;
  for (int j = 0; j < ch.n_users(); ++j)
    if (j != k) s += std::norm(inner(ch, bf, j, n, k));
  return s;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Reference deployment (1 W per RRH, -169 dBm/Hz, 7 dB, 10 MHz) drawn with
// the library generator.
struct Instance {
  cran::Topology topo;
  cran::ChannelState ch;
  cran::NetworkConfig net;
};

inline Instance deployment(int n_rrh, int n_antennas, int n_users,
                           std::uint64_t seed, double fronthaul_bps) {
  cran::GenConfig g;
  Instance inst;
  inst.topo = cran::generate_topology(g, n_rrh, n_users, cran::derive_seed(seed, 0));
  inst.ch = cran::generate_channels(inst.topo, g, n_antennas, cran::derive_seed(seed, 1));
  inst.net.n_rrh = n_rrh;
  inst.net.n_users = n_users;
  inst.net.n_antennas = n_antennas;
  inst.net.bandwidth_hz = 10e6;
  inst.net.power_cap_w.assign(n_rrh, 1.0);
  inst.net.fronthaul_cap_bps.assign(n_rrh, fronthaul_bps);
  inst.net.noise_power_w = cran::noise_power(-169.0, 7.0, 10e6);
  return inst;
}

}  // namespace testing_support
