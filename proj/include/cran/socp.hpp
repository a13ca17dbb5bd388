#pragma once

#include <vector>

#include <Eigen/Dense>

namespace cran::socp {

/// Second-order cone program in standard inequality form
///
///     minimize    c'x
///     subject to  h - G x = s,   s in Q(d_1) x ... x Q(d_p)
///
/// where Q(d) = { (u0, u1) in R x R^(d-1) : u0 >= ||u1|| }. A cone of
/// dimension one is the nonnegative ray.
struct Problem {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::vector<int> cone_dims;
  /// Optional G_c'G_c for every cone block, in cone order. Callers that
  /// solve many programs sharing a sparsity pattern can supply these.
  std::vector<Eigen::MatrixXd> gram;
};

struct Settings {
  double feastol = 1e-9;
  double abstol = 1e-9;
  double reltol = 1e-9;
  int max_iters = 100;
};

enum class Status {
  optimal,     // all stopping criteria met
  inaccurate,  // stalled close to the optimum (residuals and gap below 1e-6)
  failed,
};

struct Result {
  Status status = Status::failed;
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd z;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step. There is no infeasibility detection:
/// callers must pose programs that are strictly feasible and bounded, as
/// the beamforming layer does.
Result solve(const Problem& problem, const Settings& settings = {});

// Cone arithmetic on a single block, exposed for testing.

/// Largest alpha >= 0 with x + alpha d in Q(dim x); +inf if unbounded.
/// x must be strictly interior.
double max_step(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& d);

/// Jordan product u o v = (u'v, u0 v1 + v0 u1).
Eigen::VectorXd jordan_product(const Eigen::Ref<const Eigen::VectorXd>& u,
                               const Eigen::Ref<const Eigen::VectorXd>& v);

/// Solves u o x = v for x.
Eigen::VectorXd jordan_divide(const Eigen::Ref<const Eigen::VectorXd>& u,
                              const Eigen::Ref<const Eigen::VectorXd>& v);

/// Nesterov-Todd scaling W = eta (2 v v' - J) of one cone, with
/// W z = W^{-1} s. v is the hyperbolic reflector built from the scaling
/// point wbar: v = (wbar + e) / sqrt(2 (wbar_0 + 1)).
struct NtScaling {
  double eta = 1.0;
  Eigen::VectorXd v;

  NtScaling(const Eigen::Ref<const Eigen::VectorXd>& s,
            const Eigen::Ref<const Eigen::VectorXd>& z);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::VectorXd apply_inverse(const Eigen::Ref<const Eigen::VectorXd>& v) const;
};

}  // namespace cran::socp
