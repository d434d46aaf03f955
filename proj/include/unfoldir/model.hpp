#pragma once

#include <cmath>

#include "unfoldir/config.hpp"
#include "unfoldir/diffusion.hpp"
#include "unfoldir/gradient.hpp"
#include "unfoldir/image.hpp"
#include "unfoldir/linear_operator.hpp"

namespace unfoldir {

// Smoothed l1: quadratic inside |v| <= delta, linear outside. Convex, C^1,
// gradient bounded by 1 and (1/delta)-Lipschitz.
inline double huber_value(const Plane& x, double delta) {
  if (delta <= 0.0) throw ConfigError("huber_value: delta must be > 0");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    const double a = std::abs(v);
    acc += (a <= delta) ? v * v / (2.0 * delta) : a - 0.5 * delta;
  }
  return acc;
}

inline Plane huber_grad(const Plane& x, double delta) {
  if (delta <= 0.0) throw ConfigError("huber_grad: delta must be > 0");
  Plane g(x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    g.data()[i] = (std::abs(v) <= delta) ? v / delta : (v > 0.0 ? 1.0 : -1.0);
  }
  return g;
}

// Gradient-aware smoothness weight: 1 on flat regions, decaying across edges
// so the illumination penalty does not fight real lighting boundaries.
inline Plane illum_weight(const Plane& l) {
  GradientPair g = sobel_grad(l);
  Plane w(l.height(), l.width());
  for (std::size_t i = 0; i < w.size(); ++i)
    w.data()[i] = std::exp(-std::hypot(g.gx.data()[i], g.gy.data()[i]));
  return w;
}

// Quadratic texture-consistency block of the reflectance system: the Gram of
// the diffusion aggregate with coefficients frozen at the previous reflectance,
// scaled by mu times the Lipschitz constant 1/delta of the smoothed l1.
inline LinearOperator texture_consistency_operator(const Plane& r_prev,
                                                   const SolverConfig& cfg) {
  if (cfg.mu == 0.0) return LinearOperator(r_prev.height(), r_prev.width());
  DiffusionField f = diffusion_field(r_prev, cfg.s);
  return diffusion_gram(f.coeffs).scaled(cfg.mu / cfg.huber_delta);
}

// Linear texture-consistency block of the reflectance right-hand side. Both
// terms ride through the adjoint of the aggregate frozen at r_prev; the inner
// field linearizes the smoothed l1 around the older iterate r_prev2.
inline Plane texture_consistency_rhs(const Plane& r_prev, const Plane& r_prev2,
                                     const Plane& i, const SolverConfig& cfg) {
  require_same_shape(r_prev, r_prev2, "texture_consistency_rhs");
  require_same_shape(r_prev, i, "texture_consistency_rhs");
  if (cfg.mu == 0.0) return Plane(r_prev.height(), r_prev.width());
  DiffusionField f1 = diffusion_field(r_prev, cfg.s);
  DiffusionField f2 = diffusion_field(r_prev2, cfg.s);
  DiffusionField fi = diffusion_field(i, cfg.s);
  // f2.aggregate is the frozen-coefficient aggregate applied to its own
  // source, exactly the A(r_prev2) this formula needs.
  Plane anchor = aggregate_adjoint(f2.aggregate, f1.coeffs);
  Plane slope =
      aggregate_adjoint(huber_grad(sub(fi.aggregate, f2.aggregate), cfg.huber_delta),
                        f1.coeffs);
  Plane out(r_prev.height(), r_prev.width());
  const double ls = 1.0 / cfg.huber_delta;
  for (std::size_t k = 0; k < out.size(); ++k)
    out.data()[k] = cfg.mu * (ls * anchor.data()[k] + slope.data()[k]);
  return out;
}

// Total variational energy of a decomposition against the observation:
// data fidelity plus smoothed-l1 texture consistency per channel, plus the
// weighted illumination smoothness once (the illumination is shared).
inline double objective_energy(const RetinexPair& pair, const Image& i,
                               const SolverConfig& cfg) {
  if (!pair.reflectance.same_shape(i))
    throw ShapeError("objective_energy: decomposition does not match observation");
  require_same_shape(pair.illumination, i.channel(0), "objective_energy");
  double acc = 0.0;
  for (int c = 0; c < i.channels(); ++c) {
    const Plane& ic = i.channel(c);
    const Plane& rc = pair.reflectance.channel(c);
    for (std::size_t k = 0; k < ic.size(); ++k) {
      const double d = ic.data()[k] - rc.data()[k] * pair.illumination.data()[k];
      acc += 0.5 * d * d;
    }
    if (cfg.mu > 0.0) {
      Plane ai = diffusion_field(ic, cfg.s).aggregate;
      Plane ar = diffusion_field(rc, cfg.s).aggregate;
      acc += cfg.mu * huber_value(sub(ai, ar), cfg.huber_delta);
    }
  }
  if (cfg.lambda > 0.0) {
    Plane w = illum_weight(pair.illumination);
    GradientPair g = sobel_grad(pair.illumination);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double ww = w.data()[k];
      const double vx = ww * g.gx.data()[k];
      const double vy = ww * g.gy.data()[k];
      acc += 0.5 * cfg.lambda * (vx * vx + vy * vy);
    }
  }
  return acc;
}

// Quadratic the illumination half step minimizes; weights are frozen at
// l_prev so this is strictly convex in x and its normal equations are the
// linear system the stage solver hands to CG.
inline double illum_step_objective(const Plane& x, const Image& r, const Plane& l_prev,
                                   const Image& i, const SolverConfig& cfg) {
  require_same_shape(x, l_prev, "illum_step_objective");
  double acc = 0.0;
  const int nc = i.channels();
  for (int c = 0; c < nc; ++c) {
    const Plane& ic = i.channel(c);
    const Plane& rc = r.channel(c);
    for (std::size_t k = 0; k < ic.size(); ++k) {
      const double d = ic.data()[k] - rc.data()[k] * x.data()[k];
      acc += d * d;
    }
  }
  acc /= 2.0 * nc;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x.data()[k] - l_prev.data()[k];
    acc += 0.5 * cfg.gamma * d * d;
  }
  if (cfg.lambda > 0.0) {
    Plane w = illum_weight(l_prev);
    GradientPair g = sobel_grad(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double ww = w.data()[k];
      const double vx = ww * g.gx.data()[k];
      const double vy = ww * g.gy.data()[k];
      acc += 0.5 * cfg.lambda * (vx * vx + vy * vy);
    }
  }
  return acc;
}

// Both texture-consistency blocks of one channel's reflectance step,
// assembled once and shared between the solver and the objective bookkeeping
// (the coefficient fields are the expensive part).
struct ReflectanceSystem {
  LinearOperator qa;
  Plane qb;
};

inline ReflectanceSystem reflectance_texture_system(const Plane& r_prev,
                                                    const Plane& r_prev2, const Plane& i,
                                                    const SolverConfig& cfg) {
  return ReflectanceSystem{texture_consistency_operator(r_prev, cfg),
                           texture_consistency_rhs(r_prev, r_prev2, i, cfg)};
}

// Frozen-coefficient quadratic majorant the reflectance half step minimizes
// for one channel; its gradient recovers the stage solver's linear system.
inline double refl_step_quadratic(const ReflectanceSystem& sys, const Plane& x,
                                  const Plane& l, const Plane& r_prev, const Plane& i,
                                  const SolverConfig& cfg) {
  require_same_shape(x, l, "refl_step_quadratic");
  require_same_shape(x, r_prev, "refl_step_quadratic");
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = i.data()[k] - l.data()[k] * x.data()[k];
    const double p = x.data()[k] - r_prev.data()[k];
    acc += 0.5 * d * d + 0.5 * cfg.beta * p * p;
  }
  if (cfg.mu > 0.0) acc += 0.5 * dot(x, sys.qa.apply(x)) - dot(sys.qb, x);
  return acc;
}

inline double refl_step_quadratic(const Plane& x, const Plane& l, const Plane& r_prev,
                                  const Plane& r_prev2, const Plane& i,
                                  const SolverConfig& cfg) {
  return refl_step_quadratic(reflectance_texture_system(r_prev, r_prev2, i, cfg), x, l,
                             r_prev, i, cfg);
}

}  // namespace unfoldir
