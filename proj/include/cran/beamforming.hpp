#pragma once

#include <optional>
#include <span>
#include <stdexcept>

#include "cran/model.hpp"

namespace cran {

struct SolverTolerances {
  double bisection_rel_tol = 1e-4;
  double cone_feas_tol = 1e-7;
  int max_bisection_iters = 60;

  void validate() const;
};

/// A cone program that the interior-point method could not settle. Never
/// reported as "infeasible".
class SolverIndeterminate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// solve_power_min was asked for an SINR target that cannot be met.
class InfeasibleTarget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Feasibility { feasible, infeasible, indeterminate };

struct SolverStats {
  int probes = 0;          // feasibility programs solved
  int ipm_iterations = 0;  // interior-point iterations over all programs
  double margin = 0.0;     // optimal slack margin of the last probe
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;

  SolverStats& operator+=(const SolverStats& o);
};

struct FeasibilityOutcome {
  Feasibility status = Feasibility::indeterminate;
  std::optional<BeamformerSet> beamformers;  // present iff feasible
  SolverStats stats;
};

/// Decides whether every user can reach SINR gamma_target with beamformers
/// confined to the association and within the per-RRH power caps.
///
/// The test maximizes a common slack margin t in
///   Re(sum_n h_kn^H w_kn) - t >= sqrt(gamma) ||(interference_k, sigma)||
/// and reports feasible iff the optimal t >= -cone_feas_tol (after
/// normalizing channels by the noise amplitude and the power caps).
FeasibilityOutcome check_feasible(const ChannelState& ch,
                                  const AssociationMap& assoc,
                                  double gamma_target,
                                  std::span<const double> power_cap_w,
                                  double noise_power_w,
                                  const SolverTolerances& tol = {});

struct MaxMinResult {
  double gamma = 0.0;
  BeamformerSet beamformers;
  SolverStats stats;
};

/// Max-min SINR over the wireless links only, for a fixed association.
///
/// Searches the SINR target over [0, gamma_ub] with a bracketing root
/// finder (false position with Illinois weighting, safeguarded by
/// bisection) on the feasibility margin. The returned gamma is the largest
/// probe classified feasible; the bracket width on exit is at most
/// bisection_rel_tol * gamma. The beamformers are the minimum-power
/// solution at that target, so every user sees the same SINR.
///
/// A user without any serving RRH yields gamma = 0 and zero beamformers.
/// Throws SolverIndeterminate if a probe cannot be classified.
MaxMinResult solve_max_min(const ChannelState& ch, const AssociationMap& assoc,
                           std::span<const double> power_cap_w,
                           double noise_power_w,
                           const SolverTolerances& tol = {});

/// Minimum total transmit power meeting gamma_target for every user.
/// Throws InfeasibleTarget when the target is out of reach.
BeamformerSet solve_power_min(const ChannelState& ch,
                              const AssociationMap& assoc, double gamma_target,
                              std::span<const double> power_cap_w,
                              double noise_power_w);

/// (sum_n sqrt(P_n) ||h_kn||)^2 / sigma^2 over the RRHs serving user k:
/// the SINR of user k alone with maximum-ratio transmission at full power.
double mrt_bound(const ChannelState& ch, const AssociationMap& assoc,
                 std::span<const double> power_cap_w, double noise_power_w,
                 int k);

}  // namespace cran
