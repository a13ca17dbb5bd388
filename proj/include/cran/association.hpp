#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cran/beamforming.hpp"
#include "cran/channel_gen.hpp"
#include "cran/model.hpp"

namespace cran {

struct Link {
  int user = 0;
  int rrh = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

struct LinkChoice {
  int user = 0;
  int rrh = 0;
  double score = 0.0;
};

/// Largest common SINR the fronthaul links can carry when RRH n forwards
/// |Omega_n| equal-rate streams: min_n 2^(T_n / (B |Omega_n|)) - 1 over
/// RRHs that serve someone. +infinity if no RRH serves anyone.
double fronthaul_cap(const AssociationMap& assoc,
                     std::span<const double> fronthaul_cap_bps,
                     double bandwidth_hz);

/// RRHs attaining min T_n / |Omega_n| among those with a nonempty set.
/// Throws std::invalid_argument if every set is empty.
std::vector<int> bottleneck_rrhs(const AssociationMap& assoc,
                                 std::span<const double> fronthaul_cap_bps);

/// Active links at the bottleneck RRHs, ordered by (user, rrh). With the
/// guard on, a user's only remaining link is never a candidate.
std::vector<Link> candidate_links(std::span<const int> bottleneck,
                                  const AssociationMap& assoc,
                                  bool last_link_guard = true);

/// Power user k still receives from its other RRHs, over its interference
/// plus noise: large when dropping (k, n) costs user k little.
double removal_score(const ChannelState& ch, const BeamformerSet& bf,
                     double noise_power_w, Link link);

/// Interference that link (k, n) causes at every other user.
double interference_score(const ChannelState& ch, const BeamformerSet& bf,
                          Link link);

/// Argmax of removal_score over the candidates; ties go to the smallest
/// (user, rrh). Throws std::invalid_argument on an empty candidate list.
LinkChoice select_removal(const ChannelState& ch, const BeamformerSet& bf,
                          std::span<const Link> candidates,
                          double noise_power_w);

/// Same selection rule with interference_score.
LinkChoice benchmark1_select(const ChannelState& ch, const BeamformerSet& bf,
                             std::span<const Link> candidates);

enum class Selector { removal_score, interference_score };

struct IterationRecord {
  int t = 0;
  double gamma1 = 0.0;  // wireless-only max-min SINR
  double gamma2 = 0.0;  // fronthaul cap; +inf when unbounded
  double gamma = 0.0;   // min(gamma1, gamma2)
  std::optional<Link> removed;
  std::optional<Link> added;
  std::vector<int> omega_sizes;
};

struct SolveReport {
  std::string scheme;
  std::vector<IterationRecord> iterations;
  double final_gamma = 0.0;
  BeamformerSet final_beamformers;
  AssociationMap final_association;
  SolverStats stats;
};

struct RunOptions {
  SolverTolerances tol;
  bool last_link_guard = true;
};

/// A scheme aborted because a cone program could not be settled. Carries
/// the iterations completed so far.
class RunIndeterminate : public SolverIndeterminate {
 public:
  RunIndeterminate(const std::string& what, SolveReport partial)
      : SolverIndeterminate(what), partial_(std::move(partial)) {}

  const SolveReport& partial() const { return partial_; }

 private:
  SolveReport partial_;
};

/// Iterative link removal. Starts from full cooperation and, while the
/// wireless side beats the fronthaul cap, drops one link at a bottleneck
/// RRH chosen by the selector. The answer is the better of the last two
/// iterates.
SolveReport run_algorithm1(const ChannelState& ch, const NetworkConfig& cfg,
                           const RunOptions& opts = {},
                           Selector selector = Selector::removal_score);

/// Each user attached to its closest RRH, or to its strongest channel when
/// no topology is given. Ties go to the smallest RRH index.
AssociationMap nearest_rrh_association(const ChannelState& ch,
                                       const Topology* topo = nullptr);

/// Greedy activation of the strongest inactive link, stopping at the first
/// decrease of the max-min SINR.
SolveReport run_benchmark2(const ChannelState& ch, const NetworkConfig& cfg,
                           const RunOptions& opts = {},
                           const Topology* topo = nullptr);

/// Nearest-RRH association, evaluated once.
SolveReport run_benchmark3(const ChannelState& ch, const NetworkConfig& cfg,
                           const RunOptions& opts = {},
                           const Topology* topo = nullptr);

}  // namespace cran
