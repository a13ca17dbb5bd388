#include "cran/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cran {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void NetworkConfig::validate() const {
  require(n_rrh >= 1, "n_rrh: must be >= 1");
  require(n_users >= 1, "n_users: must be >= 1");
  require(n_antennas >= 1, "n_antennas: must be >= 1");
  require(bandwidth_hz > 0.0 && std::isfinite(bandwidth_hz),
          "bandwidth_hz: must be positive");
  require(noise_power_w > 0.0 && std::isfinite(noise_power_w),
          "noise_power_w: must be positive");
  require(static_cast<int>(power_cap_w.size()) == n_rrh,
          "power_cap_w: expected one value per RRH");
  require(static_cast<int>(fronthaul_cap_bps.size()) == n_rrh,
          "fronthaul_cap_bps: expected one value per RRH");
  for (double p : power_cap_w)
    require(p > 0.0 && std::isfinite(p), "power_cap_w: values must be positive");
  for (double t : fronthaul_cap_bps)
    require(t >= 0.0 && !std::isnan(t),
            "fronthaul_cap_bps: values must be nonnegative");
}

LinkVectors::LinkVectors(int n_users, int n_rrh, int n_antennas)
    : n_users_(n_users), n_rrh_(n_rrh), n_antennas_(n_antennas) {
  if (n_users < 0 || n_rrh < 0 || n_antennas < 0)
    throw DimensionError("LinkVectors: negative dimension");
  data_ = Eigen::MatrixXcd::Zero(n_antennas,
                                 static_cast<Eigen::Index>(n_users) * n_rrh);
}

bool LinkVectors::all_finite() const { return data_.allFinite(); }

AssociationMap::AssociationMap(int n_rrh, int n_users)
    : n_rrh_(n_rrh),
      n_users_(n_users),
      member_(static_cast<std::size_t>(n_rrh) * n_users, 0) {}

AssociationMap AssociationMap::full(int n_rrh, int n_users) {
  AssociationMap a(n_rrh, n_users);
  std::fill(a.member_.begin(), a.member_.end(), 1);
  return a;
}

AssociationMap AssociationMap::from_sets(
    int n_users, const std::vector<std::vector<int>>& omega) {
  AssociationMap a(static_cast<int>(omega.size()), n_users);
  for (int n = 0; n < a.n_rrh_; ++n) {
    for (int k : omega[n]) {
      if (k < 0 || k >= n_users)
        throw DimensionError("association: user index " + std::to_string(k) +
                             " out of range at RRH " + std::to_string(n));
      if (a.contains(n, k))
        throw DimensionError("association: duplicate user " +
                             std::to_string(k) + " at RRH " + std::to_string(n));
      a.insert(n, k);
    }
  }
  return a;
}

AssociationMap AssociationMap::from_indicator(const Eigen::MatrixXi& alpha) {
  AssociationMap a(static_cast<int>(alpha.cols()),
                   static_cast<int>(alpha.rows()));
  for (int k = 0; k < alpha.rows(); ++k)
    for (int n = 0; n < alpha.cols(); ++n)
      if (alpha(k, n) != 0) a.insert(n, k);
  return a;
}

int AssociationMap::size(int n) const {
  int c = 0;
  for (int k = 0; k < n_users_; ++k) c += contains(n, k);
  return c;
}

int AssociationMap::total() const {
  return static_cast<int>(std::count(member_.begin(), member_.end(), 1));
}

std::vector<int> AssociationMap::sizes() const {
  std::vector<int> out(n_rrh_);
  for (int n = 0; n < n_rrh_; ++n) out[n] = size(n);
  return out;
}

std::vector<int> AssociationMap::users(int n) const {
  std::vector<int> out;
  for (int k = 0; k < n_users_; ++k)
    if (contains(n, k)) out.push_back(k);
  return out;
}

std::vector<int> AssociationMap::serving_rrhs(int k) const {
  std::vector<int> out;
  for (int n = 0; n < n_rrh_; ++n)
    if (contains(n, k)) out.push_back(n);
  return out;
}

bool AssociationMap::all_served() const {
  for (int k = 0; k < n_users_; ++k) {
    bool served = false;
    for (int n = 0; n < n_rrh_ && !served; ++n) served = contains(n, k);
    if (!served) return false;
  }
  return true;
}

std::vector<std::vector<int>> AssociationMap::sets() const {
  std::vector<std::vector<int>> out(n_rrh_);
  for (int n = 0; n < n_rrh_; ++n) out[n] = users(n);
  return out;
}

Eigen::MatrixXi AssociationMap::indicator() const {
  Eigen::MatrixXi alpha = Eigen::MatrixXi::Zero(n_users_, n_rrh_);
  for (int n = 0; n < n_rrh_; ++n)
    for (int k = 0; k < n_users_; ++k) alpha(k, n) = contains(n, k) ? 1 : 0;
  return alpha;
}

void check_shapes(const ChannelState& ch, const BeamformerSet& bf) {
  if (!ch.same_shape(bf))
    throw DimensionError("channel and beamformer dimensions differ");
}

double compute_sinr(const ChannelState& ch, const BeamformerSet& bf,
                    double noise_power_w, int k) {
  check_shapes(ch, bf);
  if (k < 0 || k >= ch.n_users())
    throw DimensionError("compute_sinr: user index out of range");
  double interference = 0.0;
  double signal = 0.0;
  for (int j = 0; j < ch.n_users(); ++j) {
    Complex rx{0.0, 0.0};
    for (int n = 0; n < ch.n_rrh(); ++n) rx += ch(k, n).dot(bf(j, n));
    if (j == k)
      signal = std::norm(rx);
    else
      interference += std::norm(rx);
  }
  return signal / (interference + noise_power_w);
}

std::vector<double> compute_sinrs(const ChannelState& ch,
                                  const BeamformerSet& bf,
                                  double noise_power_w) {
  std::vector<double> out(ch.n_users());
  for (int k = 0; k < ch.n_users(); ++k)
    out[k] = compute_sinr(ch, bf, noise_power_w, k);
  return out;
}

double achievable_rate(double gamma, double bandwidth_hz) {
  if (!(gamma >= 0.0)) throw DomainError("achievable_rate: negative SINR");
  if (!(bandwidth_hz > 0.0))
    throw DomainError("achievable_rate: bandwidth must be positive");
  return bandwidth_hz * std::log2(1.0 + gamma);
}

Eigen::MatrixXi association_indicator(const BeamformerSet& bf,
                                      std::span<const double> power_cap_w,
                                      double zero_tol_rel) {
  if (static_cast<int>(power_cap_w.size()) != bf.n_rrh())
    throw DimensionError("association_indicator: one power cap per RRH");
  Eigen::MatrixXi alpha = Eigen::MatrixXi::Zero(bf.n_users(), bf.n_rrh());
  for (int k = 0; k < bf.n_users(); ++k)
    for (int n = 0; n < bf.n_rrh(); ++n)
      alpha(k, n) = bf(k, n).squaredNorm() > zero_tol_rel * power_cap_w[n];
  return alpha;
}

std::vector<double> fronthaul_load(const AssociationMap& assoc,
                                   std::span<const double> per_user_rates) {
  if (static_cast<int>(per_user_rates.size()) != assoc.n_users())
    throw DimensionError("fronthaul_load: one rate per user");
  std::vector<double> load(assoc.n_rrh(), 0.0);
  for (int n = 0; n < assoc.n_rrh(); ++n)
    for (int k = 0; k < assoc.n_users(); ++k)
      if (assoc.contains(n, k)) load[n] += per_user_rates[k];
  return load;
}

std::vector<double> per_rrh_power(const BeamformerSet& bf) {
  std::vector<double> p(bf.n_rrh(), 0.0);
  for (int n = 0; n < bf.n_rrh(); ++n)
    for (int k = 0; k < bf.n_users(); ++k) p[n] += bf(k, n).squaredNorm();
  return p;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return from_db(dbm - 30.0); }

}  // namespace cran
