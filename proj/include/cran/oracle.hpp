#pragma once

#include <stdexcept>

#include "cran/beamforming.hpp"
#include "cran/model.hpp"

namespace cran {

struct FixedAssociationResult {
  double gamma = 0.0;   // min(gamma1, gamma2)
  double gamma1 = 0.0;  // wireless-only max-min SINR
  double gamma2 = 0.0;  // fronthaul cap
  BeamformerSet beamformers;           // achieve gamma
  BeamformerSet wireless_beamformers;  // achieve gamma1
  SolverStats stats;
};

/// Max-min SINR under both power and fronthaul caps for a fixed
/// association. When the fronthaul binds, the beamformers are the
/// minimum-power solution at the fronthaul cap.
FixedAssociationResult solve_fixed_association(const ChannelState& ch,
                                               const AssociationMap& assoc,
                                               const NetworkConfig& cfg,
                                               const SolverTolerances& tol = {});

/// Requested search exceeds the exhaustive size limit.
class OracleSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kOracleMaxLinks = 12;

struct OracleResult {
  double gamma = 0.0;
  AssociationMap association;
  int evaluated = 0;  // associations actually solved
};

/// Tries every association. Link (k, n) is bit k*N + n of the enumeration
/// counter; the first strict maximum wins. Throws OracleSizeError when
/// N*K exceeds kOracleMaxLinks.
OracleResult exhaustive_best(const ChannelState& ch, const NetworkConfig& cfg,
                             const SolverTolerances& tol = {},
                             bool require_all_served = true, int threads = 1);

}  // namespace cran
