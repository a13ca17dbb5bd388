#include "cran/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cran/oracle.hpp"

namespace cran {

namespace {

constexpr double kTieRelTol = 1e-12;

bool beats(double score, double best) {
  return score > best + kTieRelTol * std::abs(best);
}

template <class Score>
LinkChoice argmax_link(std::span<const Link> candidates, const char* who,
                       Score&& score) {
  if (candidates.empty())
    throw std::invalid_argument(std::string(who) + ": no candidate links");
  std::vector<Link> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end());
  LinkChoice best{order.front().user, order.front().rrh, score(order.front())};
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double s = score(order[i]);
    if (beats(s, best.score)) best = {order[i].user, order[i].rrh, s};
  }
  return best;
}

void check_instance(const ChannelState& ch, const NetworkConfig& cfg) {
  cfg.validate();
  if (ch.n_users() != cfg.n_users || ch.n_rrh() != cfg.n_rrh ||
      ch.n_antennas() != cfg.n_antennas)
    throw DimensionError("channel dimensions do not match the network config");
}

AssociationMap used_links(const BeamformerSet& bf, const NetworkConfig& cfg,
                          const AssociationMap& allowed) {
  const Eigen::MatrixXi alpha = association_indicator(bf, cfg.power_cap_w);
  AssociationMap out(cfg.n_rrh, cfg.n_users);
  for (int n = 0; n < cfg.n_rrh; ++n)
    for (int k = 0; k < cfg.n_users; ++k)
      if (alpha(k, n) != 0 && allowed.contains(n, k)) out.insert(n, k);
  return out;
}

FixedAssociationResult evaluate(const ChannelState& ch, const AssociationMap& assoc,
                                const NetworkConfig& cfg, const RunOptions& opts,
                                const SolveReport& so_far) {
  try {
    return solve_fixed_association(ch, assoc, cfg, opts.tol);
  } catch (const SolverIndeterminate& e) {
    throw RunIndeterminate(e.what(), so_far);
  } catch (const InfeasibleTarget& e) {
    // Only reachable through numerical trouble: gamma2 < gamma1 is feasible.
    throw RunIndeterminate(e.what(), so_far);
  }
}

IterationRecord record_for(int t, const FixedAssociationResult& fx,
                           const AssociationMap& assoc) {
  IterationRecord rec;
  rec.t = t;
  rec.gamma1 = fx.gamma1;
  rec.gamma2 = fx.gamma2;
  rec.gamma = fx.gamma;
  rec.omega_sizes = assoc.sizes();
  return rec;
}

}  // namespace

double fronthaul_cap(const AssociationMap& assoc,
                     std::span<const double> fronthaul_cap_bps,
                     double bandwidth_hz) {
  if (static_cast<int>(fronthaul_cap_bps.size()) != assoc.n_rrh())
    throw DimensionError("expected one fronthaul cap per RRH");
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("bandwidth must be positive");
  double cap = std::numeric_limits<double>::infinity();
  for (int n = 0; n < assoc.n_rrh(); ++n) {
    const int served = assoc.size(n);
    if (served == 0) continue;
    const double bits = fronthaul_cap_bps[n] / (bandwidth_hz * served);
    cap = std::min(cap, std::expm1(bits * std::numbers::ln2));
  }
  return cap;
}

std::vector<int> bottleneck_rrhs(const AssociationMap& assoc,
                                 std::span<const double> fronthaul_cap_bps) {
  if (static_cast<int>(fronthaul_cap_bps.size()) != assoc.n_rrh())
    throw DimensionError("expected one fronthaul cap per RRH");
  double lowest = std::numeric_limits<double>::infinity();
  for (int n = 0; n < assoc.n_rrh(); ++n)
    if (const int served = assoc.size(n); served > 0)
      lowest = std::min(lowest, fronthaul_cap_bps[n] / served);
  if (std::isinf(lowest))
    throw std::invalid_argument("bottleneck_rrhs: no RRH serves any user");
  std::vector<int> psi;
  for (int n = 0; n < assoc.n_rrh(); ++n) {
    const int served = assoc.size(n);
    if (served > 0 && !beats(fronthaul_cap_bps[n] / served, lowest)) psi.push_back(n);
  }
  return psi;
}

std::vector<Link> candidate_links(std::span<const int> bottleneck,
                                  const AssociationMap& assoc,
                                  bool last_link_guard) {
  std::vector<Link> phi;
  for (int n : bottleneck)
    for (int k : assoc.users(n)) {
      if (last_link_guard && assoc.serving_rrhs(k).size() == 1) continue;
      phi.push_back({k, n});
    }
  std::sort(phi.begin(), phi.end());
  return phi;
}

double removal_score(const ChannelState& ch, const BeamformerSet& bf,
                     double noise_power_w, Link link) {
  check_shapes(ch, bf);
  const int k = link.user;
  double kept = 0.0;
  for (int n = 0; n < ch.n_rrh(); ++n)
    if (n != link.rrh) kept += std::norm(ch(k, n).dot(bf(k, n)));
  double interference = noise_power_w;
  for (int j = 0; j < ch.n_users(); ++j) {
    if (j == k) continue;
    Complex sum = 0.0;
    for (int n = 0; n < ch.n_rrh(); ++n) sum += ch(k, n).dot(bf(j, n));
    interference += std::norm(sum);
  }
  return kept / interference;
}

double interference_score(const ChannelState& ch, const BeamformerSet& bf,
                          Link link) {
  check_shapes(ch, bf);
  double leak = 0.0;
  for (int j = 0; j < ch.n_users(); ++j)
    if (j != link.user)
      leak += std::norm(ch(j, link.rrh).dot(bf(link.user, link.rrh)));
  return leak;
}

LinkChoice select_removal(const ChannelState& ch, const BeamformerSet& bf,
                          std::span<const Link> candidates,
                          double noise_power_w) {
  return argmax_link(candidates, "select_removal", [&](Link l) {
    return removal_score(ch, bf, noise_power_w, l);
  });
}

LinkChoice benchmark1_select(const ChannelState& ch, const BeamformerSet& bf,
                             std::span<const Link> candidates) {
  return argmax_link(candidates, "benchmark1_select",
                     [&](Link l) { return interference_score(ch, bf, l); });
}

SolveReport run_algorithm1(const ChannelState& ch, const NetworkConfig& cfg,
                           const RunOptions& opts, Selector selector) {
  check_instance(ch, cfg);
  opts.tol.validate();
  SolveReport rep;
  rep.scheme = selector == Selector::removal_score ? "alg1" : "bench1";

  struct Iterate {
    double gamma;
    BeamformerSet bf;
    AssociationMap assoc;
  };
  std::optional<Iterate> previous;
  std::optional<Iterate> current;

  AssociationMap assoc = AssociationMap::full(cfg.n_rrh, cfg.n_users);
  for (int t = 1;; ++t) {
    const FixedAssociationResult fx = evaluate(ch, assoc, cfg, opts, rep);
    rep.stats += fx.stats;
    IterationRecord rec = record_for(t, fx, assoc);
    current = Iterate{fx.gamma, fx.beamformers, assoc};
    if (fx.gamma1 <= fx.gamma2) {
      rep.iterations.push_back(std::move(rec));
      break;
    }
    const std::vector<int> psi = bottleneck_rrhs(assoc, cfg.fronthaul_cap_bps);
    const std::vector<Link> phi = candidate_links(psi, assoc, opts.last_link_guard);
    if (phi.empty()) {
      rep.iterations.push_back(std::move(rec));
      break;
    }
    const LinkChoice pick =
        selector == Selector::removal_score
            ? select_removal(ch, fx.wireless_beamformers, phi, cfg.noise_power_w)
            : benchmark1_select(ch, fx.wireless_beamformers, phi);
    rec.removed = Link{pick.user, pick.rrh};
    rep.iterations.push_back(std::move(rec));
    previous = std::move(current);
    assoc.erase(pick.rrh, pick.user);
  }

  // The last iterate wins ties.
  Iterate& chosen =
      previous && previous->gamma > current->gamma ? *previous : *current;
  rep.final_gamma = chosen.gamma;
  rep.final_association = used_links(chosen.bf, cfg, chosen.assoc);
  rep.final_beamformers = std::move(chosen.bf);
  return rep;
}

AssociationMap nearest_rrh_association(const ChannelState& ch,
                                       const Topology* topo) {
  if (topo && (static_cast<int>(topo->rrh_pos.size()) != ch.n_rrh() ||
               static_cast<int>(topo->user_pos.size()) != ch.n_users()))
    throw DimensionError("topology does not match the channel dimensions");
  AssociationMap assoc(ch.n_rrh(), ch.n_users());
  for (int k = 0; k < ch.n_users(); ++k) {
    int pick = 0;
    double best = topo ? topo->distance(k, 0) : ch(k, 0).squaredNorm();
    for (int n = 1; n < ch.n_rrh(); ++n) {
      if (topo) {
        const double d = topo->distance(k, n);
        if (d < best) best = d, pick = n;
      } else {
        const double g = ch(k, n).squaredNorm();
        if (g > best) best = g, pick = n;
      }
    }
    assoc.insert(pick, k);
  }
  return assoc;
}

SolveReport run_benchmark2(const ChannelState& ch, const NetworkConfig& cfg,
                           const RunOptions& opts, const Topology* topo) {
  check_instance(ch, cfg);
  opts.tol.validate();
  SolveReport rep;
  rep.scheme = "bench2";

  AssociationMap assoc = nearest_rrh_association(ch, topo);
  FixedAssociationResult fx = evaluate(ch, assoc, cfg, opts, rep);
  rep.stats += fx.stats;
  rep.iterations.push_back(record_for(1, fx, assoc));
  FixedAssociationResult best = std::move(fx);
  AssociationMap best_assoc = assoc;

  for (int t = 2;; ++t) {
    std::optional<Link> strongest;
    double gain = -1.0;
    for (int k = 0; k < cfg.n_users; ++k)
      for (int n = 0; n < cfg.n_rrh; ++n)
        if (!assoc.contains(n, k) && ch(k, n).squaredNorm() > gain) {
          gain = ch(k, n).squaredNorm();
          strongest = Link{k, n};
        }
    if (!strongest) break;
    assoc.insert(strongest->rrh, strongest->user);
    fx = evaluate(ch, assoc, cfg, opts, rep);
    rep.stats += fx.stats;
    IterationRecord rec = record_for(t, fx, assoc);
    rec.added = strongest;
    rep.iterations.push_back(std::move(rec));
    // A drop within twice the bisection tolerance is solver noise.
    if (fx.gamma < best.gamma * (1.0 - 2.0 * opts.tol.bisection_rel_tol)) break;
    best = std::move(fx);
    best_assoc = assoc;
  }

  rep.final_gamma = best.gamma;
  rep.final_association = used_links(best.beamformers, cfg, best_assoc);
  rep.final_beamformers = std::move(best.beamformers);
  return rep;
}

SolveReport run_benchmark3(const ChannelState& ch, const NetworkConfig& cfg,
                           const RunOptions& opts, const Topology* topo) {
  check_instance(ch, cfg);
  opts.tol.validate();
  SolveReport rep;
  rep.scheme = "bench3";
  const AssociationMap assoc = nearest_rrh_association(ch, topo);
  FixedAssociationResult fx = evaluate(ch, assoc, cfg, opts, rep);
  rep.stats += fx.stats;
  rep.iterations.push_back(record_for(1, fx, assoc));
  rep.final_gamma = fx.gamma;
  rep.final_association = used_links(fx.beamformers, cfg, assoc);
  rep.final_beamformers = std::move(fx.beamformers);
  return rep;
}

}  // namespace cran
