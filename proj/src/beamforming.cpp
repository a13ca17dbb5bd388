#include "cran/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cran/socp.hpp"

namespace cran {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_inputs(const ChannelState& ch, const AssociationMap& assoc,
                  std::span<const double> power_cap_w, double noise_power_w) {
  if (assoc.n_rrh() != ch.n_rrh() || assoc.n_users() != ch.n_users())
    throw DimensionError("association shape does not match the channels");
  if (static_cast<int>(power_cap_w.size()) != ch.n_rrh())
    throw DimensionError("expected one power cap per RRH");
  if (!ch.all_finite()) throw DimensionError("channel contains non-finite entries");
  for (double p : power_cap_w)
    if (!(p > 0.0)) throw std::invalid_argument("power caps must be positive");
  if (!(noise_power_w > 0.0))
    throw std::invalid_argument("noise power must be positive");
}

// Real embedding of the beamforming variables of one association. Channels
// are normalized to h_kn sqrt(P_n) / sigma and beamformers to
// v_kn = w_kn / sqrt(P_n), so the noise term is 1 and every power cap is 1.
// Each link (k, n) owns 2M consecutive reals [Re v; Im v].
class LinkProgram {
 public:
  LinkProgram(const ChannelState& ch, const AssociationMap& assoc,
              std::span<const double> power_cap_w, double noise_power_w)
      : users_(ch.n_users()), rrhs_(ch.n_rrh()), antennas_(ch.n_antennas()),
        link_of_(static_cast<std::size_t>(users_) * rrhs_, -1) {
    const double sigma = std::sqrt(noise_power_w);
    double pmax = 0.0;
    for (int n = 0; n < rrhs_; ++n) {
      amplitude_.push_back(std::sqrt(power_cap_w[n]));
      pmax = std::max(pmax, power_cap_w[n]);
    }
    for (int k = 0; k < users_; ++k)
      for (int n = 0; n < rrhs_; ++n)
        if (assoc.contains(n, k)) {
          link_of_[slot(k, n)] = static_cast<int>(links_.size());
          links_.push_back({k, n});
        }
    nv_ = static_cast<Index>(links_.size()) * 2 * antennas_;

    rrh_vars_.resize(rrhs_);
    for (std::size_t l = 0; l < links_.size(); ++l)
      for (Index i = 0; i < 2 * antennas_; ++i)
        rrh_vars_[links_[l].second].push_back(offset(static_cast<int>(l)) + i);

    weights_ = VectorXd::Zero(nv_);
    for (std::size_t l = 0; l < links_.size(); ++l)
      weights_.segment(offset(static_cast<int>(l)), 2 * antennas_)
          .setConstant(std::sqrt(power_cap_w[links_[l].second] / pmax));

    signal_.assign(users_, VectorXd::Zero(nv_));
    interference_.assign(users_, MatrixXd::Zero(2 * (users_ - 1), nv_));
    for (int k = 0; k < users_; ++k) {
      int row = 0;
      for (int j = 0; j < users_; ++j) {
        for (int n = 0; n < rrhs_; ++n) {
          const int l = link_of_[slot(j, n)];
          if (l < 0) continue;
          const Eigen::VectorXcd hn = ch(k, n) * (amplitude_[n] / sigma);
          const Index o = offset(l);
          // conj(h)v = (hr.vr + hi.vi) + i (hr.vi - hi.vr)
          if (j == k) {
            signal_[k].segment(o, antennas_) = hn.real();
            signal_[k].segment(o + antennas_, antennas_) = hn.imag();
          } else {
            interference_[k].block(row, o, 1, antennas_) = hn.real().transpose();
            interference_[k].block(row, o + antennas_, 1, antennas_) =
                hn.imag().transpose();
            interference_[k].block(row + 1, o, 1, antennas_) =
                -hn.imag().transpose();
            interference_[k].block(row + 1, o + antennas_, 1, antennas_) =
                hn.real().transpose();
          }
        }
        if (j != k) row += 2;
      }
      interference_gram_.push_back(interference_[k].transpose() * interference_[k]);
    }
  }

  Index n_vars() const { return nv_; }

  // maximize t  s.t.  (Re(a_k'v) - t, sqrt(g) B_k v, sqrt(g)) in Q, ||v_n|| <= 1
  socp::Problem margin_program(double gamma) const {
    socp::Problem p = skeleton(gamma, /*objective_cone=*/false);
    p.c(nv_) = -1.0;
    return p;
  }

  // minimize t  s.t.  ||D v|| <= t, (Re(a_k'v), sqrt(g) B_k v, sqrt(g)) in Q,
  // ||v_n|| <= 1, where D weights each RRH by its power cap.
  socp::Problem power_program(double gamma) const {
    socp::Problem p = skeleton(gamma, /*objective_cone=*/true);
    p.c(nv_) = 1.0;
    return p;
  }

  BeamformerSet to_beamformers(const VectorXd& x) const {
    BeamformerSet bf(users_, rrhs_, antennas_);
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const auto [k, n] = links_[l];
      const Index o = offset(static_cast<int>(l));
      auto w = bf(k, n);
      for (int m = 0; m < antennas_; ++m)
        w(m) = amplitude_[n] * Complex(x(o + m), x(o + antennas_ + m));
    }
    return bf;
  }

 private:
  std::size_t slot(int k, int n) const {
    return static_cast<std::size_t>(k) * rrhs_ + n;
  }
  Index offset(int link) const { return static_cast<Index>(link) * 2 * antennas_; }

  socp::Problem skeleton(double gamma, bool objective_cone) const {
    const Index nx = nv_ + 1;
    const double sg = std::sqrt(gamma);
    const int sinr_dim = 2 * users_;

    socp::Problem p;
    if (objective_cone) p.cone_dims.push_back(static_cast<int>(nv_ + 1));
    for (int k = 0; k < users_; ++k) p.cone_dims.push_back(sinr_dim);
    for (int n = 0; n < rrhs_; ++n)
      if (!rrh_vars_[n].empty())
        p.cone_dims.push_back(static_cast<int>(rrh_vars_[n].size()) + 1);
    Index m = 0;
    for (int d : p.cone_dims) m += d;

    p.c = VectorXd::Zero(nx);
    p.G = MatrixXd::Zero(m, nx);
    p.h = VectorXd::Zero(m);
    p.gram.reserve(p.cone_dims.size());

    Index r = 0;
    if (objective_cone) {
      p.G(r, nv_) = -1.0;
      p.G.block(r + 1, 0, nv_, nv_).diagonal() = -weights_;
      MatrixXd gram = MatrixXd::Zero(nx, nx);
      gram.topLeftCorner(nv_, nv_).diagonal() = weights_.cwiseAbs2();
      gram(nv_, nv_) = 1.0;
      p.gram.push_back(std::move(gram));
      r += nv_ + 1;
    }
    for (int k = 0; k < users_; ++k) {
      p.G.block(r, 0, 1, nv_) = -signal_[k].transpose();
      if (!objective_cone) p.G(r, nv_) = 1.0;
      p.G.block(r + 1, 0, 2 * (users_ - 1), nv_) = -sg * interference_[k];
      p.h(r + sinr_dim - 1) = sg;
      const VectorXd row0 = p.G.row(r).transpose();
      MatrixXd gram = row0 * row0.transpose();
      gram.topLeftCorner(nv_, nv_) += gamma * interference_gram_[k];
      p.gram.push_back(std::move(gram));
      r += sinr_dim;
    }
    for (int n = 0; n < rrhs_; ++n) {
      if (rrh_vars_[n].empty()) continue;
      p.h(r) = 1.0;
      MatrixXd gram = MatrixXd::Zero(nx, nx);
      for (std::size_t i = 0; i < rrh_vars_[n].size(); ++i) {
        p.G(r + 1 + static_cast<Index>(i), rrh_vars_[n][i]) = -1.0;
        gram(rrh_vars_[n][i], rrh_vars_[n][i]) = 1.0;
      }
      p.gram.push_back(std::move(gram));
      r += static_cast<Index>(rrh_vars_[n].size()) + 1;
    }
    return p;
  }

  int users_;
  int rrhs_;
  int antennas_;
  std::vector<int> link_of_;
  std::vector<std::pair<int, int>> links_;
  Index nv_ = 0;
  std::vector<double> amplitude_;
  std::vector<std::vector<Index>> rrh_vars_;
  VectorXd weights_;
  std::vector<VectorXd> signal_;
  std::vector<MatrixXd> interference_;
  std::vector<MatrixXd> interference_gram_;
};

void accumulate(SolverStats& stats, const socp::Result& r) {
  stats.ipm_iterations += r.iterations;
  stats.primal_residual = r.primal_residual;
  stats.dual_residual = r.dual_residual;
  stats.gap = r.gap;
}

struct Probe {
  Feasibility status = Feasibility::indeterminate;
  double margin = 0.0;
  VectorXd x;
};

Probe probe(const LinkProgram& prog, double gamma, const SolverTolerances& tol,
            SolverStats& stats) {
  const socp::Result r = socp::solve(prog.margin_program(gamma));
  ++stats.probes;
  accumulate(stats, r);
  Probe out;
  if (r.status == socp::Status::failed) return out;
  out.margin = r.x(prog.n_vars());
  stats.margin = out.margin;
  out.x = r.x;
  if (r.status == socp::Status::optimal) {
    out.status = out.margin >= -tol.cone_feas_tol ? Feasibility::feasible
                                                   : Feasibility::infeasible;
  } else {
    const double doubt = std::max(1e-6, r.gap);
    if (out.margin >= doubt)
      out.status = Feasibility::feasible;
    else if (out.margin < -doubt)
      out.status = Feasibility::infeasible;
  }
  return out;
}

std::optional<VectorXd> power_min_vars(const LinkProgram& prog, double gamma,
                                       SolverStats& stats) {
  const socp::Result r = socp::solve(prog.power_program(gamma));
  accumulate(stats, r);
  if (r.status == socp::Status::failed) return std::nullopt;
  return r.x;
}

bool has_signal(const ChannelState& ch, const AssociationMap& assoc, int k) {
  for (int n = 0; n < ch.n_rrh(); ++n)
    if (assoc.contains(n, k) && ch(k, n).squaredNorm() > 0.0) return true;
  return false;
}

}  // namespace

void SolverTolerances::validate() const {
  if (!(bisection_rel_tol > 0.0))
    throw std::invalid_argument("bisection_rel_tol: must be positive");
  if (!(cone_feas_tol > 0.0))
    throw std::invalid_argument("cone_feas_tol: must be positive");
  if (max_bisection_iters < 1)
    throw std::invalid_argument("max_bisection_iters: must be positive");
}

SolverStats& SolverStats::operator+=(const SolverStats& o) {
  probes += o.probes;
  ipm_iterations += o.ipm_iterations;
  margin = o.margin;
  primal_residual = o.primal_residual;
  dual_residual = o.dual_residual;
  gap = o.gap;
  return *this;
}

double mrt_bound(const ChannelState& ch, const AssociationMap& assoc,
                 std::span<const double> power_cap_w, double noise_power_w,
                 int k) {
  double amp = 0.0;
  for (int n = 0; n < ch.n_rrh(); ++n)
    if (assoc.contains(n, k)) amp += std::sqrt(power_cap_w[n]) * ch(k, n).norm();
  return amp * amp / noise_power_w;
}

FeasibilityOutcome check_feasible(const ChannelState& ch,
                                  const AssociationMap& assoc,
                                  double gamma_target,
                                  std::span<const double> power_cap_w,
                                  double noise_power_w,
                                  const SolverTolerances& tol) {
  check_inputs(ch, assoc, power_cap_w, noise_power_w);
  if (!(gamma_target >= 0.0))
    throw DomainError("check_feasible: negative SINR target");
  FeasibilityOutcome out;
  if (gamma_target == 0.0) {
    out.status = Feasibility::feasible;
    out.beamformers = BeamformerSet(ch.n_users(), ch.n_rrh(), ch.n_antennas());
    return out;
  }
  for (int k = 0; k < ch.n_users(); ++k) {
    if (!has_signal(ch, assoc, k)) {
      out.status = Feasibility::infeasible;
      return out;
    }
  }
  const LinkProgram prog(ch, assoc, power_cap_w, noise_power_w);
  const Probe p = probe(prog, gamma_target, tol, out.stats);
  out.status = p.status;
  if (p.status == Feasibility::feasible) out.beamformers = prog.to_beamformers(p.x);
  return out;
}

MaxMinResult solve_max_min(const ChannelState& ch, const AssociationMap& assoc,
                           std::span<const double> power_cap_w,
                           double noise_power_w, const SolverTolerances& tol) {
  check_inputs(ch, assoc, power_cap_w, noise_power_w);
  tol.validate();
  MaxMinResult out{0.0, BeamformerSet(ch.n_users(), ch.n_rrh(), ch.n_antennas()), {}};

  double upper = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.n_users(); ++k)
    upper = std::min(upper, mrt_bound(ch, assoc, power_cap_w, noise_power_w, k));
  if (!(upper > 0.0)) return out;

  const LinkProgram prog(ch, assoc, power_cap_w, noise_power_w);
  auto run = [&](double gamma) {
    Probe p = probe(prog, gamma, tol, out.stats);
    if (p.status == Feasibility::indeterminate)
      throw SolverIndeterminate("feasibility probe at SINR " +
                                std::to_string(gamma) + " did not converge");
    return p;
  };

  double lo = 0.0;
  VectorXd x_lo;
  Probe top = run(upper);
  if (top.status == Feasibility::feasible) {
    lo = upper;
    x_lo = std::move(top.x);
  } else {
    double hi = upper;
    Probe bottom = run(0.0);
    x_lo = std::move(bottom.x);
    // Root of the margin as a function of sqrt(gamma); margins are kept
    // with Illinois down-weighting of a stale endpoint.
    double f_lo = bottom.margin;
    double f_hi = top.margin;
    int side = 0;
    int since_check = 0;
    double checkpoint_width = hi - lo;
    bool force_bisect = false;
    const double nudge = 0.5 * tol.bisection_rel_tol;
    while (out.stats.probes < tol.max_bisection_iters) {
      if (lo > 0.0 && hi - lo <= tol.bisection_rel_tol * lo) break;
      const double sl = std::sqrt(lo);
      const double sh = std::sqrt(hi);
      double gamma;
      if (force_bisect) {
        gamma = 0.25 * (sl + sh) * (sl + sh);
        force_bisect = false;
      } else {
        const double s = sl - f_lo * (sh - sl) / (f_hi - f_lo);
        gamma = s * s;
        // Step just past the estimate so the opposite end can close in.
        if (side > 0) gamma *= 1.0 + nudge;
        if (side < 0) gamma *= 1.0 - nudge;
        if (!(gamma > lo && gamma < hi)) gamma = 0.25 * (sl + sh) * (sl + sh);
      }
      Probe p = run(gamma);
      if (p.status == Feasibility::feasible) {
        lo = gamma;
        f_lo = p.margin;
        x_lo = std::move(p.x);
        if (side > 0) f_hi *= 0.5;
        side = 1;
      } else {
        hi = gamma;
        f_hi = p.margin;
        if (side < 0) f_lo *= 0.5;
        side = -1;
      }
      if (++since_check == 4) {
        force_bisect = hi - lo > 0.5 * checkpoint_width;
        checkpoint_width = hi - lo;
        since_check = 0;
      }
    }
  }

  out.gamma = lo;
  if (lo == 0.0) return out;
  // Minimum-power beamformers at the reported target equalize all SINRs.
  for (double target : {lo, lo * (1.0 - 0.5 * tol.bisection_rel_tol)}) {
    if (auto x = power_min_vars(prog, target, out.stats)) {
      out.beamformers = prog.to_beamformers(*x);
      return out;
    }
  }
  out.beamformers = prog.to_beamformers(x_lo);
  return out;
}

BeamformerSet solve_power_min(const ChannelState& ch,
                              const AssociationMap& assoc, double gamma_target,
                              std::span<const double> power_cap_w,
                              double noise_power_w) {
  check_inputs(ch, assoc, power_cap_w, noise_power_w);
  if (!(gamma_target >= 0.0))
    throw DomainError("solve_power_min: negative SINR target");
  if (gamma_target == 0.0)
    return BeamformerSet(ch.n_users(), ch.n_rrh(), ch.n_antennas());
  for (int k = 0; k < ch.n_users(); ++k)
    if (!has_signal(ch, assoc, k))
      throw InfeasibleTarget("solve_power_min: user " + std::to_string(k) +
                             " has no serving RRH");
  const LinkProgram prog(ch, assoc, power_cap_w, noise_power_w);
  SolverStats stats;
  if (auto x = power_min_vars(prog, gamma_target, stats))
    return prog.to_beamformers(*x);
  const FeasibilityOutcome f =
      check_feasible(ch, assoc, gamma_target, power_cap_w, noise_power_w);
  if (f.status == Feasibility::infeasible)
    throw InfeasibleTarget("solve_power_min: SINR target " +
                           std::to_string(gamma_target) + " is not achievable");
  throw SolverIndeterminate("solve_power_min: interior-point method did not converge");
}

}  // namespace cran
