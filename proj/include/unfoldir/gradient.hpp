#pragma once

#include <array>
#include <cmath>

#include "unfoldir/plane.hpp"

namespace unfoldir {

// Signed gradient planes in intensity-per-pixel units (Sobel, 1/8-normalized
// so a unit-slope ramp reads 1). Identically zero on constant planes.
struct GradientPair {
  Plane gx;
  Plane gy;
};

// 3x3 kernels stored row-major, tap index k = (dy+1)*3 + (dx+1).
using Kernel3 = std::array<double, 9>;

inline constexpr Kernel3 kSobelX = {-1.0 / 8, 0.0, 1.0 / 8,   //
                                    -2.0 / 8, 0.0, 2.0 / 8,   //
                                    -1.0 / 8, 0.0, 1.0 / 8};
inline constexpr Kernel3 kSobelY = {-1.0 / 8, -2.0 / 8, -1.0 / 8,  //
                                    0.0,      0.0,      0.0,       //
                                    1.0 / 8,  2.0 / 8,  1.0 / 8};

// out(p) = sum_taps K[t] * x(mirror(p + offset_t))
inline Plane conv3_mirror(const Plane& x, const Kernel3& k) {
  const int h = x.height(), w = x.width();
  Plane out(h, w);
  auto gather_mirror = [&](int y, int xx) {
    double acc = 0.0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        acc += k[(dy + 1) * 3 + (dx + 1)] * x.at_mirror(y + dy, xx + dx);
    return acc;
  };
  for (int y = 1; y + 1 < h; ++y) {
    const double* r0 = x.data() + static_cast<std::size_t>(y - 1) * w;
    const double* r1 = r0 + w;
    const double* r2 = r1 + w;
    double* o = out.data() + static_cast<std::size_t>(y) * w;
    for (int xx = 1; xx + 1 < w; ++xx) {
      o[xx] = k[0] * r0[xx - 1] + k[1] * r0[xx] + k[2] * r0[xx + 1] +
              k[3] * r1[xx - 1] + k[4] * r1[xx] + k[5] * r1[xx + 1] +
              k[6] * r2[xx - 1] + k[7] * r2[xx] + k[8] * r2[xx + 1];
    }
  }
  for (int xx = 0; xx < w; ++xx) {
    out.at(0, xx) = gather_mirror(0, xx);
    if (h > 1) out.at(h - 1, xx) = gather_mirror(h - 1, xx);
  }
  for (int y = 1; y + 1 < h; ++y) {
    out.at(y, 0) = gather_mirror(y, 0);
    if (w > 1) out.at(y, w - 1) = gather_mirror(y, w - 1);
  }
  return out;
}

// Exact adjoint of conv3_mirror under the same boundary policy:
// out accumulates K[t] * u(p) at mirror(p + offset_t).
inline void conv3_mirror_adjoint_accum(const Plane& u, const Kernel3& k, Plane& out) {
  const int h = u.height(), w = u.width();
  for (int y = 0; y < h; ++y) {
    const bool y_interior = (y > 0 && y + 1 < h);
    for (int xx = 0; xx < w; ++xx) {
      const double v = u.at(y, xx);
      if (v == 0.0) continue;
      if (y_interior && xx > 0 && xx + 1 < w) {
        double* r0 = out.data() + static_cast<std::size_t>(y - 1) * w + xx;
        double* r1 = r0 + w;
        double* r2 = r1 + w;
        r0[-1] += k[0] * v; r0[0] += k[1] * v; r0[1] += k[2] * v;
        r1[-1] += k[3] * v; r1[0] += k[4] * v; r1[1] += k[5] * v;
        r2[-1] += k[6] * v; r2[0] += k[7] * v; r2[1] += k[8] * v;
      } else {
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            out.at(mirror_index(y + dy, h), mirror_index(xx + dx, w)) +=
                k[(dy + 1) * 3 + (dx + 1)] * v;
      }
    }
  }
}

inline Plane conv3_mirror_adjoint(const Plane& u, const Kernel3& k) {
  Plane out(u.height(), u.width(), 0.0);
  conv3_mirror_adjoint_accum(u, k, out);
  return out;
}

inline GradientPair sobel_grad(const Plane& x) {
  return GradientPair{conv3_mirror(x, kSobelX), conv3_mirror(x, kSobelY)};
}

// Adjoint of sobel_grad: maps a gradient-pair field back to a plane.
inline Plane sobel_grad_adjoint(const Plane& ux, const Plane& uy) {
  Plane out(ux.height(), ux.width(), 0.0);
  conv3_mirror_adjoint_accum(ux, kSobelX, out);
  conv3_mirror_adjoint_accum(uy, kSobelY, out);
  return out;
}

inline Plane grad_magnitude(const GradientPair& g) {
  require_same_shape(g.gx, g.gy, "grad_magnitude");
  Plane out(g.gx.height(), g.gx.width());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = std::hypot(g.gx.data()[i], g.gy.data()[i]);
  return out;
}

}  // namespace unfoldir
