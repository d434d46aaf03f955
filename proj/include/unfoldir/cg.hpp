#pragma once

#include <cmath>
#include <string>

#include "unfoldir/errors.hpp"
#include "unfoldir/linear_operator.hpp"
#include "unfoldir/plane.hpp"

namespace unfoldir {

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Conjugate gradients on an SPD operator, warm-started at x0. Because CG
// decreases the quadratic (1/2)x'Ax - b'x monotonically from its start, a
// warm start at the previous iterate makes every half step a descent step
// regardless of where the iteration stops. The returned residual is
// recomputed from scratch so the report never trusts the recurrence.
inline std::pair<Plane, CgReport> cg_solve(const LinearOperator& a, const Plane& rhs,
                                           const Plane& x0, double tol, int max_iter) {
  require_same_shape(rhs, x0, "cg_solve");
  if (tol <= 0.0) throw ConfigError("cg_solve: tol must be > 0");
  if (max_iter < 1) throw ConfigError("cg_solve: max_iter must be >= 1");

  const double nb = std::sqrt(dot(rhs, rhs));
  if (nb == 0.0) return {Plane(rhs.height(), rhs.width()), CgReport{0, 0.0, true}};

  Plane x = x0;
  Plane r = sub(rhs, a.apply(x));
  Plane p = r;
  double rs = dot(r, r);
  if (!std::isfinite(rs))
    throw NumericalError("cg_solve: non-finite residual at iteration 0");

  int it = 0;
  while (it < max_iter && std::sqrt(rs) > tol * nb) {
    Plane ap = a.apply(p);
    const double pap = dot(p, ap);
    if (!std::isfinite(pap) || pap <= 0.0)
      throw NumericalError("cg_solve: curvature breakdown at iteration " +
                           std::to_string(it + 1));
    const double alpha = rs / pap;
    axpy(x, alpha, p);
    axpy(r, -alpha, ap);
    const double rs_next = dot(r, r);
    if (!std::isfinite(rs_next))
      throw NumericalError("cg_solve: non-finite residual at iteration " +
                           std::to_string(it + 1));
    const double beta = rs_next / rs;
    for (std::size_t k = 0; k < p.size(); ++k)
      p.data()[k] = r.data()[k] + beta * p.data()[k];
    rs = rs_next;
    ++it;
  }

  Plane true_r = sub(rhs, a.apply(x));
  CgReport rep;
  rep.iterations = it;
  rep.relative_residual = std::sqrt(dot(true_r, true_r)) / nb;
  rep.converged = rep.relative_residual <= tol;
  return {std::move(x), rep};
}

}  // namespace unfoldir
