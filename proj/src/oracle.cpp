#include "cran/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "cran/association.hpp"
#include "cran/parallel.hpp"

namespace cran {

FixedAssociationResult solve_fixed_association(const ChannelState& ch,
                                               const AssociationMap& assoc,
                                               const NetworkConfig& cfg,
                                               const SolverTolerances& tol) {
  FixedAssociationResult out;
  MaxMinResult mm = solve_max_min(ch, assoc, cfg.power_cap_w, cfg.noise_power_w, tol);
  out.stats = mm.stats;
  out.gamma1 = mm.gamma;
  out.gamma2 = fronthaul_cap(assoc, cfg.fronthaul_cap_bps, cfg.bandwidth_hz);
  out.wireless_beamformers = std::move(mm.beamformers);
  if (out.gamma1 <= out.gamma2) {
    out.gamma = out.gamma1;
    out.beamformers = out.wireless_beamformers;
    return out;
  }
  out.gamma = out.gamma2;
  // gamma2 < gamma1 is reachable in exact arithmetic; the retry absorbs the
  // classifier's tolerance when the two are within a bisection step.
  try {
    out.beamformers = solve_power_min(ch, assoc, out.gamma2, cfg.power_cap_w,
                                      cfg.noise_power_w);
  } catch (const InfeasibleTarget&) {
    out.beamformers =
        solve_power_min(ch, assoc, out.gamma2 * (1.0 - 0.5 * tol.bisection_rel_tol),
                        cfg.power_cap_w, cfg.noise_power_w);
  }
  return out;
}

OracleResult exhaustive_best(const ChannelState& ch, const NetworkConfig& cfg,
                             const SolverTolerances& tol, bool require_all_served,
                             int threads) {
  const int n_rrh = ch.n_rrh();
  const int n_users = ch.n_users();
  const int links = n_rrh * n_users;
  if (links > kOracleMaxLinks)
    throw OracleSizeError("exhaustive search over " + std::to_string(links) +
                          " links exceeds the limit of " +
                          std::to_string(kOracleMaxLinks));

  const std::uint32_t count = 1u << links;
  auto decode = [&](std::uint32_t mask) {
    AssociationMap a(n_rrh, n_users);
    for (int k = 0; k < n_users; ++k)
      for (int n = 0; n < n_rrh; ++n)
        if (mask >> (k * n_rrh + n) & 1u) a.insert(n, k);
    return a;
  };

  std::vector<double> value(count, -1.0);  // -1: skipped
  parallel_for(count, threads, [&](std::size_t i) {
    const AssociationMap a = decode(static_cast<std::uint32_t>(i));
    if (require_all_served && !a.all_served()) return;
    value[i] = solve_fixed_association(ch, a, cfg, tol).gamma;
  });

  OracleResult best;
  std::int64_t best_mask = -1;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (value[i] < 0.0) continue;
    ++best.evaluated;
    if (best_mask < 0 || value[i] > best.gamma) {
      best.gamma = value[i];
      best_mask = i;
    }
  }
  best.association = best_mask < 0 ? AssociationMap(n_rrh, n_users)
                                   : decode(static_cast<std::uint32_t>(best_mask));
  return best;
}

}  // namespace cran
