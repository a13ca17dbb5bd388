#include "cran/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cran::socp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// (u0 - ||u1||)(u0 + ||u1||), computed without cancellation in the sum.
double jordan_det(const Eigen::Ref<const VectorXd>& u) {
  const double tail = u.size() > 1 ? u.tail(u.size() - 1).norm() : 0.0;
  return (u(0) - tail) * (u(0) + tail);
}

struct Blocks {
  std::vector<Index> offset;
  std::vector<Index> dim;

  explicit Blocks(const std::vector<int>& dims) {
    Index o = 0;
    for (int d : dims) {
      if (d < 1) throw std::invalid_argument("socp: cone dimension must be >= 1");
      offset.push_back(o);
      dim.push_back(d);
      o += d;
    }
  }
  std::size_t count() const { return dim.size(); }
  Index total() const { return offset.empty() ? 0 : offset.back() + dim.back(); }
};

// Adds (1 + alpha) e to every block when v is not strictly interior, where
// alpha is the smallest shift that reaches the cone boundary.
void push_interior(VectorXd& v, const Blocks& blocks) {
  double alpha = -kInf;
  for (std::size_t i = 0; i < blocks.count(); ++i) {
    const auto b = v.segment(blocks.offset[i], blocks.dim[i]);
    const double tail = b.size() > 1 ? b.tail(b.size() - 1).norm() : 0.0;
    alpha = std::max(alpha, tail - b(0));
  }
  if (alpha < -1e-8 * std::max(1.0, v.norm())) return;
  for (std::size_t i = 0; i < blocks.count(); ++i)
    v(blocks.offset[i]) += 1.0 + alpha;
}

double max_step_all(const VectorXd& x, const VectorXd& d, const Blocks& blocks) {
  double a = kInf;
  for (std::size_t i = 0; i < blocks.count(); ++i)
    a = std::min(a, max_step(x.segment(blocks.offset[i], blocks.dim[i]),
                             d.segment(blocks.offset[i], blocks.dim[i])));
  return a;
}

class KktSystem {
 public:
  KktSystem(const Problem& p, const Blocks& blocks,
            const std::vector<MatrixXd>& gram)
      : p_(p), blocks_(blocks), gram_(gram) {}

  // Factors G' W^{-2} G for the current scaling; a null scaling means W = I.
  bool factor(const std::vector<NtScaling>* scalings) {
    const Index n = p_.G.cols();
    MatrixXd H = MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < blocks_.count(); ++i) {
      if (!scalings) {
        H += gram_[i];
        continue;
      }
      const NtScaling& w = (*scalings)[i];
      const auto Gc = p_.G.middleRows(blocks_.offset[i], blocks_.dim[i]);
      VectorXd a = w.v;  // a = J v
      a.tail(a.size() - 1) *= -1.0;
      const VectorXd pv = Gc.transpose() * a;
      const VectorXd qv = Gc.transpose() * w.v;
      const double inv_eta2 = 1.0 / (w.eta * w.eta);
      H.noalias() += inv_eta2 * gram_[i];
      H.noalias() += (4.0 * a.squaredNorm() * inv_eta2) * pv * pv.transpose();
      H.noalias() -= (2.0 * inv_eta2) * (pv * qv.transpose() + qv * pv.transpose());
    }
    scalings_ = scalings;
    double reg = 0.0;
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 6; ++attempt) {
      MatrixXd Hr = H;
      if (reg > 0.0) Hr.diagonal().array() += reg;
      llt_.compute(Hr);
      if (llt_.info() == Eigen::Success) return true;
      reg = reg == 0.0 ? 1e-13 * scale : reg * 100.0;
    }
    return false;
  }

  // Solves [0 G'; G -W^2] [dx; dz] = [bx; bz], with a few rounds of
  // iterative refinement against the unreduced system.
  void solve(const VectorXd& bx, const VectorXd& bz, VectorXd& dx,
             VectorXd& dz) const {
    reduced_solve(bx, bz, dx, dz);
    const double bnorm = std::max(bx.lpNorm<Eigen::Infinity>(),
                                  bz.lpNorm<Eigen::Infinity>());
    VectorXd cx, cz;
    double last = kInf;
    for (int round = 0; round < 3; ++round) {
      const VectorXd ex = bx - p_.G.transpose() * dz;
      const VectorXd ez = bz - p_.G * dx + scale2(dz);
      const double err = std::max(ex.lpNorm<Eigen::Infinity>(),
                                  ez.lpNorm<Eigen::Infinity>());
      if (!(err > 1e-14 * std::max(1.0, bnorm)) || !(err < 0.5 * last)) break;
      last = err;
      reduced_solve(ex, ez, cx, cz);
      dx += cx;
      dz += cz;
    }
  }

  VectorXd scale(const VectorXd& v) const { return map(v, false); }
  VectorXd scale_inv(const VectorXd& v) const { return map(v, true); }
  VectorXd scale2(const VectorXd& v) const { return scale(scale(v)); }
  VectorXd scale_inv2(const VectorXd& v) const { return scale_inv(scale_inv(v)); }

 private:
  void reduced_solve(const VectorXd& bx, const VectorXd& bz, VectorXd& dx,
                     VectorXd& dz) const {
    dx = llt_.solve(bx + p_.G.transpose() * scale_inv2(bz));
    dz = scale_inv2(p_.G * dx - bz);
  }

  VectorXd map(const VectorXd& v, bool inverse) const {
    if (!scalings_) return v;
    VectorXd out(v.size());
    for (std::size_t i = 0; i < blocks_.count(); ++i) {
      const auto seg = v.segment(blocks_.offset[i], blocks_.dim[i]);
      const NtScaling& w = (*scalings_)[i];
      out.segment(blocks_.offset[i], blocks_.dim[i]) =
          inverse ? w.apply_inverse(seg) : w.apply(seg);
    }
    return out;
  }

  const Problem& p_;
  const Blocks& blocks_;
  const std::vector<MatrixXd>& gram_;
  const std::vector<NtScaling>* scalings_ = nullptr;
  Eigen::LLT<MatrixXd> llt_;
};

VectorXd blockwise(const VectorXd& u, const VectorXd& v, const Blocks& blocks,
                   bool divide) {
  VectorXd out(u.size());
  for (std::size_t i = 0; i < blocks.count(); ++i) {
    const auto us = u.segment(blocks.offset[i], blocks.dim[i]);
    const auto vs = v.segment(blocks.offset[i], blocks.dim[i]);
    out.segment(blocks.offset[i], blocks.dim[i]) =
        divide ? jordan_divide(us, vs) : jordan_product(us, vs);
  }
  return out;
}

}  // namespace

double max_step(const Eigen::Ref<const VectorXd>& x,
                const Eigen::Ref<const VectorXd>& d) {
  const double det = jordan_det(x);
  if (!(det > 0.0) || x(0) <= 0.0) return 0.0;
  const double xnorm = std::sqrt(det);
  const Index tail = x.size() - 1;
  const double xbar0 = x(0) / xnorm;
  double rho0 = xbar0 * d(0);
  if (tail > 0) rho0 -= x.tail(tail).dot(d.tail(tail)) / xnorm;
  rho0 /= xnorm;
  double rho1 = 0.0;
  if (tail > 0) {
    const double factor = (rho0 + d(0) / xnorm) / (xbar0 + 1.0);
    rho1 = (d.tail(tail) / xnorm - factor * x.tail(tail) / xnorm).norm();
  }
  const double rho = rho1 - rho0;
  return rho > 0.0 ? 1.0 / rho : kInf;
}

VectorXd jordan_product(const Eigen::Ref<const VectorXd>& u,
                        const Eigen::Ref<const VectorXd>& v) {
  VectorXd out(u.size());
  out(0) = u.dot(v);
  const Index tail = u.size() - 1;
  if (tail > 0) out.tail(tail) = u(0) * v.tail(tail) + v(0) * u.tail(tail);
  return out;
}

VectorXd jordan_divide(const Eigen::Ref<const VectorXd>& u,
                       const Eigen::Ref<const VectorXd>& v) {
  VectorXd out(u.size());
  const Index tail = u.size() - 1;
  const double det = jordan_det(u);
  double x0 = u(0) * v(0);
  if (tail > 0) x0 -= u.tail(tail).dot(v.tail(tail));
  x0 /= det;
  out(0) = x0;
  if (tail > 0) out.tail(tail) = (v.tail(tail) - x0 * u.tail(tail)) / u(0);
  return out;
}

NtScaling::NtScaling(const Eigen::Ref<const VectorXd>& s,
                     const Eigen::Ref<const VectorXd>& z) {
  const double snorm = std::sqrt(jordan_det(s));
  const double znorm = std::sqrt(jordan_det(z));
  const VectorXd sbar = s / snorm;
  VectorXd jzbar = z / znorm;
  const double gamma = std::sqrt((1.0 + sbar.dot(jzbar)) / 2.0);
  if (jzbar.size() > 1) jzbar.tail(jzbar.size() - 1) *= -1.0;
  VectorXd wbar = (sbar + jzbar) / (2.0 * gamma);
  wbar(0) += 1.0;
  v = wbar / std::sqrt(2.0 * wbar(0));
  eta = std::sqrt(snorm / znorm);
}

VectorXd NtScaling::apply(const Eigen::Ref<const VectorXd>& u) const {
  VectorXd out = (2.0 * v.dot(u)) * v;
  out(0) -= u(0);
  if (u.size() > 1) out.tail(u.size() - 1) += u.tail(u.size() - 1);
  return eta * out;
}

VectorXd NtScaling::apply_inverse(const Eigen::Ref<const VectorXd>& u) const {
  VectorXd jv = v;
  if (jv.size() > 1) jv.tail(jv.size() - 1) *= -1.0;
  VectorXd out = (2.0 * jv.dot(u)) * jv;
  out(0) -= u(0);
  if (u.size() > 1) out.tail(u.size() - 1) += u.tail(u.size() - 1);
  return out / eta;
}

Result solve(const Problem& p, const Settings& st) {
  const Index n = p.c.size();
  const Index m = p.h.size();
  const Blocks blocks(p.cone_dims);
  if (p.G.rows() != m || p.G.cols() != n || blocks.total() != m)
    throw std::invalid_argument("socp: inconsistent problem dimensions");

  std::vector<MatrixXd> local_gram;
  const std::vector<MatrixXd>* gram = &p.gram;
  if (p.gram.size() != blocks.count()) {
    local_gram.reserve(blocks.count());
    for (std::size_t i = 0; i < blocks.count(); ++i) {
      const auto Gc = p.G.middleRows(blocks.offset[i], blocks.dim[i]);
      local_gram.push_back(Gc.transpose() * Gc);
    }
    gram = &local_gram;
  }

  Result res;
  KktSystem kkt(p, blocks, *gram);
  if (!kkt.factor(nullptr)) return res;

  // Least-squares starting point, then shifted into the cone interior.
  VectorXd x, z, dx, dz;
  kkt.solve(VectorXd::Zero(n), p.h, x, z);
  VectorXd s = -z;  // s = h - G x
  kkt.solve(-p.c, VectorXd::Zero(m), dx, z);
  push_interior(s, blocks);
  push_interior(z, blocks);

  const double hnorm = std::max(1.0, p.h.norm());
  const double cnorm = std::max(1.0, p.c.norm());
  const double degree = static_cast<double>(blocks.count());

  std::vector<NtScaling> scalings;
  scalings.reserve(blocks.count());

  auto evaluate = [&](Result& r) {
    const VectorXd rx = p.G.transpose() * z + p.c;
    const VectorXd rz = p.G * x + s - p.h;
    r.x = x;
    r.s = s;
    r.z = z;
    r.gap = s.dot(z);
    r.primal_obj = p.c.dot(x);
    r.dual_obj = -p.h.dot(z);
    r.primal_residual = rz.norm() / hnorm;
    r.dual_residual = rx.norm() / cnorm;
    return std::pair{rx, rz};
  };
  auto relgap = [](const Result& r) {
    if (r.primal_obj < 0.0) return r.gap / -r.primal_obj;
    if (r.dual_obj > 0.0) return r.gap / r.dual_obj;
    return kInf;
  };

  // Last-resort answer when the iteration degrades near the optimum.
  auto merit = [&](const Result& r) {
    return std::max({r.primal_residual, r.dual_residual,
                     std::min(r.gap, relgap(r))});
  };
  Result best;
  double best_merit = kInf;

  for (int it = 0; it <= st.max_iters; ++it) {
    res.iterations = it;
    auto [rx, rz] = evaluate(res);
    if (!std::isfinite(res.gap) || !std::isfinite(res.primal_obj)) break;
    if (const double mval = merit(res); mval < best_merit) {
      best_merit = mval;
      best = res;
    }
    if (res.primal_residual <= st.feastol && res.dual_residual <= st.feastol &&
        (res.gap <= st.abstol || relgap(res) <= st.reltol)) {
      res.status = Status::optimal;
      return res;
    }
    if (it == st.max_iters) break;

    scalings.clear();
    for (std::size_t i = 0; i < blocks.count(); ++i)
      scalings.emplace_back(s.segment(blocks.offset[i], blocks.dim[i]),
                            z.segment(blocks.offset[i], blocks.dim[i]));
    if (!kkt.factor(&scalings)) break;
    const VectorXd lambda = kkt.scale(z);
    const double mu = res.gap / degree;

    // Affine-scaling direction.
    VectorXd dx_a, dz_a;
    kkt.solve(-rx, -rz + s, dx_a, dz_a);
    const VectorXd ds_a = -s - kkt.scale2(dz_a);
    const double alpha_a =
        std::min({1.0, max_step_all(s, ds_a, blocks), max_step_all(z, dz_a, blocks)});
    const double gap_a = (s + alpha_a * ds_a).dot(z + alpha_a * dz_a);
    const double sigma = std::clamp(std::pow(gap_a / res.gap, 3.0), 0.0, 1.0);

    // Combined centering-corrector direction.
    VectorXd rcs = -blockwise(lambda, lambda, blocks, false) -
                   blockwise(kkt.scale_inv(ds_a), kkt.scale(dz_a), blocks, false);
    for (std::size_t i = 0; i < blocks.count(); ++i)
      rcs(blocks.offset[i]) += sigma * mu;
    const VectorXd u = blockwise(lambda, rcs, blocks, true);
    const VectorXd wu = kkt.scale(u);
    kkt.solve(-rx, -rz - wu, dx, dz);
    const VectorXd ds = wu - kkt.scale2(dz);

    const double alpha =
        std::min(1.0, 0.99 * std::min(max_step_all(s, ds, blocks),
                                      max_step_all(z, dz, blocks)));
    if (!(alpha > 1e-12) || !dx.allFinite() || !dz.allFinite()) break;
    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
  }

  if (best_merit < kInf) {
    const int iterations = res.iterations;
    res = best;
    res.iterations = iterations;
  }
  if (std::isfinite(res.gap) && res.primal_residual <= 1e-6 &&
      res.dual_residual <= 1e-6 && (res.gap <= 1e-6 || relgap(res) <= 1e-6))
    res.status = Status::inaccurate;
  else
    res.status = Status::failed;
  return res;
}

}  // namespace cran::socp
