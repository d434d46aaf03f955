#pragma once

#include <cmath>
#include <utility>

#include "unfoldir/cg.hpp"
#include "unfoldir/config.hpp"
#include "unfoldir/image.hpp"
#include "unfoldir/model.hpp"
#include "unfoldir/smoothing.hpp"
#include "unfoldir/wavelet.hpp"

namespace unfoldir {

struct GateParams {
  double sigma_g = 1.0;
  double mu_g = 0.0;
};

// Illumination half step: exact minimizer (to CG tolerance) of the quadratic
// in illum_step_objective. The three-channel fidelity collapses onto the
// shared illumination plane by channel means; warm start at l_prev makes the
// step a guaranteed descent on that quadratic.
inline std::pair<Plane, CgReport> solve_illumination(const Image& r, const Plane& l_prev,
                                                     const Image& i,
                                                     const SolverConfig& cfg) {
  if (!r.same_shape(i)) throw ShapeError("solve_illumination: R and I differ");
  require_same_shape(l_prev, i.channel(0), "solve_illumination");
  const int h = l_prev.height(), w = l_prev.width();
  const int nc = i.channels();

  Plane diag(h, w), rhs(h, w);
  for (int c = 0; c < nc; ++c) {
    const Plane& rc = r.channel(c);
    const Plane& ic = i.channel(c);
    for (std::size_t k = 0; k < diag.size(); ++k) {
      diag.data()[k] += rc.data()[k] * rc.data()[k];
      rhs.data()[k] += rc.data()[k] * ic.data()[k];
    }
  }
  for (std::size_t k = 0; k < diag.size(); ++k) {
    diag.data()[k] = diag.data()[k] / nc + cfg.gamma;
    rhs.data()[k] = rhs.data()[k] / nc + cfg.gamma * l_prev.data()[k];
  }

  LinearOperator op(h, w);
  if (cfg.lambda > 0.0) {
    Plane wgt = illum_weight(l_prev);
    op = weighted_laplacian(mul(wgt, wgt)).scaled(cfg.lambda);
  }
  op.add_diagonal(diag);
  return cg_solve(op, rhs, l_prev, cfg.cg_tol, cfg.cg_max_iter);
}

// Non-local refinement standing in for the learned illumination prior:
// config-selected smoother, then the stage-invariant clamp to [epsilon, 1].
inline Plane refine_illumination(const Plane& l_hat, const Plane& l_prev,
                                 const SolverConfig& cfg) {
  Plane out;
  if (cfg.prox_illum == "identity") {
    out = l_hat;
  } else if (cfg.prox_illum == "gaussian") {
    out = gaussian_smooth(l_hat, cfg.prox_sigma);
  } else if (cfg.prox_illum == "guided") {
    out = guided_filter(l_hat, l_prev, cfg.guided_radius, cfg.guided_reg);
  } else {
    throw ConfigError("refine_illumination: unknown prox_illum mode " + cfg.prox_illum);
  }
  return clamped(out, cfg.epsilon, 1.0);
}

// Reflectance half step for one channel: minimizes refl_step_quadratic with
// texture-consistency coefficients frozen at the previous two iterates.
inline std::pair<Plane, CgReport> solve_reflectance(const ReflectanceSystem& sys,
                                                    const Plane& l, const Plane& r_prev,
                                                    const Plane& i,
                                                    const SolverConfig& cfg) {
  require_same_shape(l, r_prev, "solve_reflectance");
  require_same_shape(l, i, "solve_reflectance");
  LinearOperator op = sys.qa;
  Plane diag = mul(l, l);
  for (std::size_t k = 0; k < diag.size(); ++k) diag.data()[k] += cfg.beta;
  op.add_diagonal(diag);

  Plane rhs = sys.qb;
  for (std::size_t k = 0; k < rhs.size(); ++k)
    rhs.data()[k] += l.data()[k] * i.data()[k] + cfg.beta * r_prev.data()[k];
  return cg_solve(op, rhs, r_prev, cfg.cg_tol, cfg.cg_max_iter);
}

inline std::pair<Plane, CgReport> solve_reflectance(const Plane& l, const Plane& r_prev,
                                                    const Plane& r_prev2, const Plane& i,
                                                    const SolverConfig& cfg) {
  return solve_reflectance(reflectance_texture_system(r_prev, r_prev2, i, cfg), l, r_prev,
                           i, cfg);
}

// Texture refinement residual: detail-band shrinkage in an orthonormal
// wavelet frame, blended with an illumination-statistics modulation that
// reduces to the identity on flat illumination (up to rounding; the local
// deviation is not exactly zero there). Returns an update direction that
// vanishes, again up to rounding, when shrink_tau = 0 and the illumination
// is flat.
inline Plane reflectance_texture_residual(const Plane& r_hat, const Plane& l,
                                          const SolverConfig& cfg) {
  require_same_shape(r_hat, l, "reflectance_texture_residual");
  const int h = r_hat.height(), w = r_hat.width();
  Plane padded = mirror_pad_even(r_hat);
  Plane rp = idwt2(band_shrink(dwt2(padded), cfg.shrink_tau));
  if (rp.height() != h || rp.width() != w) rp = crop(rp, h, w);

  Plane sdev = local_dev3(l);
  Plane smean = local_mean3(l);
  const double lmean = mean(l);
  Plane out(h, w);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double sigma_l = 1.0 + sdev.data()[k];
    const double mu_l = smean.data()[k] - lmean;
    const double modulated = sigma_l * rp.data()[k] + mu_l;
    out.data()[k] = 0.5 * (rp.data()[k] + modulated) - r_hat.data()[k];
  }
  return out;
}

// Second-order explicit composition of the texture refinement: trial step,
// re-evaluation at the trial point, then a gated blend of the two increments.
// The gate is a logistic in the mean disagreement between the increments, so
// it lives strictly inside (0,1).
inline Plane rk2_compose(const Plane& r_hat, const Plane& l, const GateParams& gate,
                         const SolverConfig& cfg) {
  Plane inc1 = reflectance_texture_residual(r_hat, l, cfg);
  Plane inc2 = reflectance_texture_residual(add(r_hat, inc1), l, cfg);
  double m = 0.0;
  for (std::size_t k = 0; k < inc1.size(); ++k)
    m += std::abs(inc1.data()[k] - inc2.data()[k]);
  m /= static_cast<double>(inc1.size());
  const double z = gate.sigma_g * m + gate.mu_g;
  const double g_w = 1.0 / (1.0 + std::exp(-z));
  Plane out(r_hat.height(), r_hat.width());
  for (std::size_t k = 0; k < out.size(); ++k)
    out.data()[k] =
        r_hat.data()[k] + g_w * inc1.data()[k] + (1.0 - g_w) * inc2.data()[k];
  return out;
}

}  // namespace unfoldir
