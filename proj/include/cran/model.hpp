#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cran {

using Complex = std::complex<double>;

/// Inputs whose shapes disagree (wrong K, N or M somewhere).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value outside the domain of a formula, e.g. a negative SINR.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Static description of the C-RAN: N RRHs with M antennas each, K
/// single-antenna users, bandwidth and the per-RRH power and fronthaul caps.
struct NetworkConfig {
  int n_rrh = 0;
  int n_users = 0;
  int n_antennas = 0;
  double bandwidth_hz = 0.0;
  std::vector<double> power_cap_w;        // one per RRH
  std::vector<double> fronthaul_cap_bps;  // one per RRH
  double noise_power_w = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// A complex M-vector for every (user, RRH) pair.
class LinkVectors {
 public:
  LinkVectors() = default;
  LinkVectors(int n_users, int n_rrh, int n_antennas);

  int n_users() const { return n_users_; }
  int n_rrh() const { return n_rrh_; }
  int n_antennas() const { return n_antennas_; }

  auto operator()(int k, int n) { return data_.col(index(k, n)); }
  auto operator()(int k, int n) const { return data_.col(index(k, n)); }

  bool all_finite() const;
  bool same_shape(const LinkVectors& other) const {
    return n_users_ == other.n_users_ && n_rrh_ == other.n_rrh_ &&
           n_antennas_ == other.n_antennas_;
  }
  void set_zero() { data_.setZero(); }

  friend bool operator==(const LinkVectors& a, const LinkVectors& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  Eigen::Index index(int k, int n) const {
    return static_cast<Eigen::Index>(k) * n_rrh_ + n;
  }

  int n_users_ = 0;
  int n_rrh_ = 0;
  int n_antennas_ = 0;
  Eigen::MatrixXcd data_;  // n_antennas x (n_users * n_rrh)
};

/// h(k, n): channel from RRH n to user k, linear amplitude.
class ChannelState : public LinkVectors {
 public:
  using LinkVectors::LinkVectors;
};

/// w(k, n): RRH n's beamformer for user k, amplitude in sqrt(W).
class BeamformerSet : public LinkVectors {
 public:
  using LinkVectors::LinkVectors;
};

/// Per-RRH served-user sets. Indices are zero-based.
class AssociationMap {
 public:
  AssociationMap() = default;
  AssociationMap(int n_rrh, int n_users);

  static AssociationMap full(int n_rrh, int n_users);
  /// Throws DimensionError on an out-of-range or duplicated user index.
  static AssociationMap from_sets(int n_users,
                                  const std::vector<std::vector<int>>& omega);
  /// alpha is K x N; nonzero entries are links.
  static AssociationMap from_indicator(const Eigen::MatrixXi& alpha);

  int n_rrh() const { return n_rrh_; }
  int n_users() const { return n_users_; }

  bool contains(int n, int k) const { return member_[slot(n, k)] != 0; }
  void insert(int n, int k) { member_[slot(n, k)] = 1; }
  void erase(int n, int k) { member_[slot(n, k)] = 0; }

  int size(int n) const;
  int total() const;
  std::vector<int> sizes() const;
  std::vector<int> users(int n) const;
  std::vector<int> serving_rrhs(int k) const;
  bool all_served() const;
  std::vector<std::vector<int>> sets() const;
  Eigen::MatrixXi indicator() const;

  friend bool operator==(const AssociationMap&, const AssociationMap&) = default;

 private:
  std::size_t slot(int n, int k) const {
    return static_cast<std::size_t>(n) * n_users_ + k;
  }

  int n_rrh_ = 0;
  int n_users_ = 0;
  std::vector<std::uint8_t> member_;
};

/// Throws DimensionError unless h and w agree with each other.
void check_shapes(const ChannelState& ch, const BeamformerSet& bf);

/// Linear SINR of user k with joint transmission from all RRHs.
double compute_sinr(const ChannelState& ch, const BeamformerSet& bf,
                    double noise_power_w, int k);
std::vector<double> compute_sinrs(const ChannelState& ch,
                                  const BeamformerSet& bf,
                                  double noise_power_w);

/// B log2(1 + gamma) in bits per second.
double achievable_rate(double gamma, double bandwidth_hz);

/// K x N matrix: 0 where ||w(k,n)||^2 <= zero_tol_rel * P_n, else 1.
Eigen::MatrixXi association_indicator(const BeamformerSet& bf,
                                      std::span<const double> power_cap_w,
                                      double zero_tol_rel = 1e-10);

/// Sum of served-user rates per RRH.
std::vector<double> fronthaul_load(const AssociationMap& assoc,
                                   std::span<const double> per_user_rates);

/// sum_k ||w(k,n)||^2 for each n.
std::vector<double> per_rrh_power(const BeamformerSet& bf);

double to_db(double linear);
double from_db(double db);
double dbm_to_watts(double dbm);

}  // namespace cran
