#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unfoldir/parallel.hpp"
#include "unfoldir/stage.hpp"

namespace unfoldir {

// One unfolded stage, fully recorded: both half-step intermediates, the
// quadratic objective value on each side of each half step (descent evidence),
// the total energy, and the consistency score against the previous stage.
struct StageTrace {
  int stage_index = 0;
  Plane l_hat;
  Plane l;
  Image r_hat;
  Image r;
  double energy = 0.0;
  std::optional<double> isic;
  std::vector<CgReport> cg_reports;  // illumination solve first, then one per channel
  double l_quad_before = 0.0;
  double l_quad_after = 0.0;
  std::vector<double> r_quad_before;
  std::vector<double> r_quad_after;
};

enum class OutputMode { kReflectance, kRelit };

inline OutputMode output_mode_from_string(const std::string& s) {
  if (s == "reflectance") return OutputMode::kReflectance;
  if (s == "relit") return OutputMode::kRelit;
  throw ConfigError("output_mode must be \"reflectance\" or \"relit\"");
}

struct PipelineResult {
  Image output;
  std::vector<StageTrace> traces;
  double final_isic = 0.0;
};

// Stage-to-stage consistency: how much the restored product moves when the
// illumination advances (magnitude term) and when the reflectance advances
// (gradient term). Zero when consecutive stages agree.
inline double isic_metric(const Image& r_k, const Image& r_prev, const Plane& l_k,
                          const Plane& l_prev) {
  if (!r_k.same_shape(r_prev)) throw ShapeError("isic_metric: reflectance pair differs");
  require_same_shape(l_k, l_prev, "isic_metric");
  require_same_shape(l_k, r_k.channel(0), "isic_metric");
  double sq = 0.0, grad_l1 = 0.0;
  for (int c = 0; c < r_k.channels(); ++c) {
    const Plane& rc = r_k.channel(c);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      const double d = rc.data()[p] * (l_prev.data()[p] - l_k.data()[p]);
      sq += d * d;
    }
    GradientPair ga = sobel_grad(mul(r_prev.channel(c), l_k));
    GradientPair gb = sobel_grad(mul(rc, l_k));
    for (std::size_t p = 0; p < l_k.size(); ++p)
      grad_l1 += std::abs(ga.gx.data()[p] - gb.gx.data()[p]) +
                 std::abs(ga.gy.data()[p] - gb.gy.data()[p]);
  }
  return std::sqrt(sq) + grad_l1;
}

// K alternating half steps from the max-channel initialization. Traces are
// always recorded; CG non-convergence aborts with the stage index unless the
// caller opts into best-effort continuation.
inline PipelineResult run_pipeline(const Image& input, const SolverConfig& cfg,
                                   OutputMode mode = OutputMode::kReflectance,
                                   bool best_effort = false) {
  cfg.validate();
  RetinexPair cur = decompose_init(input, cfg.epsilon);
  Image r_prev2 = cur.reflectance;  // stage 1 reuses the initialization
  const GateParams gate{cfg.gw_sigma, cfg.gw_mu};
  const int nc = input.channels();

  PipelineResult res;
  res.traces.reserve(cfg.stages);
  for (int k = 1; k <= cfg.stages; ++k) {
    StageTrace t;
    t.stage_index = k;

    t.l_quad_before = illum_step_objective(cur.illumination, cur.reflectance,
                                           cur.illumination, input, cfg);
    auto [l_hat, l_rep] = solve_illumination(cur.reflectance, cur.illumination, input, cfg);
    t.l_quad_after =
        illum_step_objective(l_hat, cur.reflectance, cur.illumination, input, cfg);
    t.cg_reports.push_back(l_rep);
    if (!l_rep.converged && !best_effort)
      throw NumericalError("stage " + std::to_string(k) +
                           ": illumination solve missed tolerance (residual " +
                           std::to_string(l_rep.relative_residual) + ")");
    t.l_hat = l_hat;
    Plane l_k = refine_illumination(l_hat, cur.illumination, cfg);
    t.l = l_k;

    std::vector<Plane> r_hat_planes(nc), r_planes(nc);
    std::vector<CgReport> r_reps(nc);
    t.r_quad_before.resize(nc);
    t.r_quad_after.resize(nc);
    parallel_for(nc, [&](int c) {
      const Plane& rc_prev = cur.reflectance.channel(c);
      const Plane& rc_prev2 = r_prev2.channel(c);
      const Plane& ic = input.channel(c);
      ReflectanceSystem sys = reflectance_texture_system(rc_prev, rc_prev2, ic, cfg);
      t.r_quad_before[c] = refl_step_quadratic(sys, rc_prev, l_k, rc_prev, ic, cfg);
      auto [r_hat_c, r_rep] = solve_reflectance(sys, l_k, rc_prev, ic, cfg);
      t.r_quad_after[c] = refl_step_quadratic(sys, r_hat_c, l_k, rc_prev, ic, cfg);
      r_reps[c] = r_rep;
      if (r_rep.converged || best_effort)
        r_planes[c] = rk2_compose(r_hat_c, l_k, gate, cfg);
      r_hat_planes[c] = std::move(r_hat_c);
    });
    for (int c = 0; c < nc; ++c) {
      t.cg_reports.push_back(r_reps[c]);
      if (!r_reps[c].converged && !best_effort)
        throw NumericalError("stage " + std::to_string(k) + ": reflectance solve (channel " +
                             std::to_string(c) + ") missed tolerance (residual " +
                             std::to_string(r_reps[c].relative_residual) + ")");
    }
    t.r_hat = nc == 1 ? Image(std::move(r_hat_planes[0]))
                      : Image::from_planes(std::move(r_hat_planes));
    Image r_k = nc == 1 ? Image(std::move(r_planes[0]))
                        : Image::from_planes(std::move(r_planes));
    t.r = r_k;

    t.energy = objective_energy(RetinexPair{r_k, l_k}, input, cfg);
    if (k >= 2)
      t.isic = isic_metric(r_k, cur.reflectance, l_k, cur.illumination);

    r_prev2 = std::move(cur.reflectance);
    cur.reflectance = std::move(r_k);
    cur.illumination = std::move(l_k);
    res.traces.push_back(std::move(t));
  }

  int isic_count = 0;
  double isic_sum = 0.0;
  const int first = std::max(0, cfg.stages - cfg.isic_last_n);
  for (int k = first; k < cfg.stages; ++k)
    if (res.traces[k].isic) {
      isic_sum += *res.traces[k].isic;
      ++isic_count;
    }
  res.final_isic = isic_count > 0 ? isic_sum / isic_count : 0.0;

  if (mode == OutputMode::kRelit) {
    Plane l_adj(cur.illumination.height(), cur.illumination.width());
    for (std::size_t p = 0; p < l_adj.size(); ++p)
      l_adj.data()[p] = std::pow(cur.illumination.data()[p], 1.0 / cfg.relit_gamma);
    res.output = clamp_unit(hadamard(cur.reflectance, l_adj));
  } else {
    res.output = clamp_unit(cur.reflectance);
  }
  return res;
}

}  // namespace unfoldir
