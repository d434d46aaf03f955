#pragma once

#include <cmath>
#include <vector>

#include "unfoldir/plane.hpp"

namespace unfoldir {

// Separable Gaussian with mirror boundary; kernel normalized so constants
// pass through exactly.
inline Plane gaussian_smooth(const Plane& x, double sigma) {
  if (sigma <= 0.0) throw ConfigError("gaussian_smooth: sigma must be > 0");
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double ksum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    ksum += k[i + radius];
  }
  for (double& v : k) v /= ksum;

  const int h = x.height(), w = x.width();
  Plane tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * x.at(y, mirror_index(xx + i, w));
      tmp.at(y, xx) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * tmp.at(mirror_index(y + i, h), xx);
      out.at(y, xx) = acc;
    }
  return out;
}

// Mean over the (2r+1)^2 mirror-extended window, separable.
inline Plane box_mean(const Plane& x, int radius) {
  if (radius < 1) throw ConfigError("box_mean: radius must be >= 1");
  const int h = x.height(), w = x.width();
  const double inv = 1.0 / (2 * radius + 1);
  Plane tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += x.at(y, mirror_index(xx + i, w));
      tmp.at(y, xx) = acc * inv;
    }
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += tmp.at(mirror_index(y + i, h), xx);
      out.at(y, xx) = acc * inv;
    }
  return out;
}

inline Plane local_mean3(const Plane& x) { return box_mean(x, 1); }

// 3x3 standard deviation over the mirror-extended window. On constant planes
// the result is zero only up to rounding: the sqrt can lift ulp-level variance
// noise to ~1e-8, so nothing downstream may assume exact zeros here.
inline Plane local_dev3(const Plane& x) {
  Plane m = local_mean3(x);
  Plane m2 = local_mean3(mul(x, x));
  Plane out(x.height(), x.width());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = m2.data()[i] - m.data()[i] * m.data()[i];
    out.data()[i] = std::sqrt(std::max(0.0, v));
  }
  return out;
}

// Edge-preserving smoothing of p steered by a (grayscale) guide: fit a local
// affine model p ~ a*guide + b per window, then average the coefficients.
inline Plane guided_filter(const Plane& p, const Plane& guide, int radius, double reg) {
  require_same_shape(p, guide, "guided_filter");
  if (reg <= 0.0) throw ConfigError("guided_filter: regularization must be > 0");
  Plane mean_g = box_mean(guide, radius);
  Plane mean_p = box_mean(p, radius);
  Plane corr_g = box_mean(mul(guide, guide), radius);
  Plane corr_gp = box_mean(mul(guide, p), radius);
  Plane a(p.height(), p.width()), b(p.height(), p.width());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double var_g = corr_g.data()[i] - mean_g.data()[i] * mean_g.data()[i];
    const double cov_gp = corr_gp.data()[i] - mean_g.data()[i] * mean_p.data()[i];
    a.data()[i] = cov_gp / (var_g + reg);
    b.data()[i] = mean_p.data()[i] - a.data()[i] * mean_g.data()[i];
  }
  Plane mean_a = box_mean(a, radius);
  Plane mean_b = box_mean(b, radius);
  Plane out(p.height(), p.width());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = mean_a.data()[i] * guide.data()[i] + mean_b.data()[i];
  return out;
}

}  // namespace unfoldir
