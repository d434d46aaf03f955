#pragma once

#include <array>
#include <cmath>

#include "unfoldir/plane.hpp"

namespace unfoldir {

// 3x3 neighborhood offsets in row-major order; index 4 is the pixel itself.
// The window size 9 includes the self offset, whose difference is zero.
inline constexpr std::array<std::array<int, 2>, 9> kNeighborOffsets = {{
    {-1, -1}, {-1, 0}, {-1, 1},
    {0, -1},  {0, 0},  {0, 1},
    {1, -1},  {1, 0},  {1, 1},
}};

inline constexpr double kNeighborCount = 9.0;

// Perona-Malik diffusion coefficient exp(-(m/s)^2): 1 on flat regions,
// decaying across strong gradients so texture survives the smoothing.
inline Plane pm_coeff(const Plane& mag, double s) {
  if (!(s > 0.0)) throw ConfigError("pm_coeff: sensitivity s must be > 0");
  Plane out(mag.height(), mag.width());
  const double inv_s2 = 1.0 / (s * s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = mag.data()[i];
    out.data()[i] = std::exp(-m * m * inv_s2);
  }
  return out;
}

// d(p) = x(mirror(p + (dy,dx))) - x(p)
inline Plane offset_diff(const Plane& x, int dy, int dx) {
  const int h = x.height(), w = x.width();
  Plane out(h, w);
  for (int y = 0; y < h; ++y) {
    const int ym = mirror_index(y + dy, h);
    const double* row_n = x.data() + static_cast<std::size_t>(ym) * w;
    const double* row = x.data() + static_cast<std::size_t>(y) * w;
    double* o = out.data() + static_cast<std::size_t>(y) * w;
    const int xlo = (dx < 0) ? 1 : 0;
    const int xhi = (dx > 0) ? w - 1 : w;
    for (int xx = xlo; xx < xhi; ++xx) o[xx] = row_n[xx + dx] - row[xx];
    if (dx < 0) o[0] = row_n[mirror_index(dx, w)] - row[0];
    if (dx > 0) o[w - 1] = row_n[mirror_index(w - 1 + dx, w)] - row[w - 1];
  }
  return out;
}

// Exact adjoint of offset_diff: scatters +u at the mirrored neighbor and -u
// at the pixel itself.
inline void offset_diff_adjoint_accum(const Plane& u, int dy, int dx, Plane& out) {
  const int h = u.height(), w = u.width();
  for (int y = 0; y < h; ++y) {
    const int ym = mirror_index(y + dy, h);
    double* row_n = out.data() + static_cast<std::size_t>(ym) * w;
    double* row = out.data() + static_cast<std::size_t>(y) * w;
    const double* uu = u.data() + static_cast<std::size_t>(y) * w;
    const int xlo = (dx < 0) ? 1 : 0;
    const int xhi = (dx > 0) ? w - 1 : w;
    for (int xx = xlo; xx < xhi; ++xx) {
      row_n[xx + dx] += uu[xx];
      row[xx] -= uu[xx];
    }
    if (dx < 0) {
      row_n[mirror_index(dx, w)] += uu[0];
      row[0] -= uu[0];
    }
    if (dx > 0) {
      row_n[mirror_index(w - 1 + dx, w)] += uu[w - 1];
      row[w - 1] -= uu[w - 1];
    }
  }
}

// Per-neighbor differences, their diffusion coefficients, and the aggregate
// (1/9) * sum_j coeffs_j .* diffs_j over the 3x3 window.
struct DiffusionField {
  Plane aggregate;
  std::array<Plane, 9> coeffs;
  std::array<Plane, 9> neighbor_diffs;
};

inline DiffusionField diffusion_field(const Plane& x, double s) {
  if (!(s > 0.0)) throw ConfigError("diffusion_field: sensitivity s must be > 0");
  DiffusionField f;
  f.aggregate = Plane(x.height(), x.width(), 0.0);
  const double inv_s2 = 1.0 / (s * s);
  for (int j = 0; j < 9; ++j) {
    Plane d = offset_diff(x, kNeighborOffsets[j][0], kNeighborOffsets[j][1]);
    Plane c(x.height(), x.width());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double dv = d.data()[i];
      const double cv = std::exp(-dv * dv * inv_s2);
      c.data()[i] = cv;
      f.aggregate.data()[i] += cv * dv;
    }
    f.coeffs[j] = std::move(c);
    f.neighbor_diffs[j] = std::move(d);
  }
  for (std::size_t i = 0; i < f.aggregate.size(); ++i)
    f.aggregate.data()[i] /= kNeighborCount;
  return f;
}

// Frozen-coefficient aggregate as a linear map of x:
//   (1/9) * sum_j coeffs_j .* (x_j - x_i)
inline Plane aggregate_apply(const Plane& x, const std::array<Plane, 9>& coeffs) {
  Plane out(x.height(), x.width(), 0.0);
  for (int j = 0; j < 9; ++j) {
    if (j == 4) continue;  // self difference is identically zero
    Plane d = offset_diff(x, kNeighborOffsets[j][0], kNeighborOffsets[j][1]);
    const double* c = coeffs[j].data();
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += c[i] * d.data()[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] /= kNeighborCount;
  return out;
}

// Exact adjoint of aggregate_apply.
inline Plane aggregate_adjoint(const Plane& u, const std::array<Plane, 9>& coeffs) {
  Plane out(u.height(), u.width(), 0.0);
  Plane cu(u.height(), u.width());
  for (int j = 0; j < 9; ++j) {
    if (j == 4) continue;
    const double* c = coeffs[j].data();
    for (std::size_t i = 0; i < u.size(); ++i) cu.data()[i] = c[i] * u.data()[i];
    offset_diff_adjoint_accum(cu, kNeighborOffsets[j][0], kNeighborOffsets[j][1], out);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] /= kNeighborCount;
  return out;
}

}  // namespace unfoldir
