#pragma once

#include <cmath>

#include "unfoldir/plane.hpp"

namespace unfoldir {

// Single-level orthonormal 2D Haar bands, half the (even) source dimensions.
// Energy is preserved: ||x||^2 = ||ll||^2 + ||lh||^2 + ||hl||^2 + ||hh||^2.
struct WaveletBands {
  Plane ll, lh, hl, hh;
};

// Analysis convention (normative for this repo), per 2x2 block [a b; c d]:
//   ll = (a+b+c+d)/2   hl = (a+b-c-d)/2
//   lh = (a-b+c-d)/2   hh = (a-b-c+d)/2
inline WaveletBands dwt2(const Plane& x) {
  const int h = x.height(), w = x.width();
  if (h < 2 || w < 2) throw ShapeError("dwt2: plane must be at least 2x2");
  if (h % 2 != 0 || w % 2 != 0)
    throw ShapeError("dwt2: dimensions must be even (mirror-pad odd planes first)");
  const int hh2 = h / 2, wh2 = w / 2;
  WaveletBands b{Plane(hh2, wh2), Plane(hh2, wh2), Plane(hh2, wh2), Plane(hh2, wh2)};
  for (int y = 0; y < hh2; ++y)
    for (int xx = 0; xx < wh2; ++xx) {
      const double a = x.at(2 * y, 2 * xx);
      const double bb = x.at(2 * y, 2 * xx + 1);
      const double c = x.at(2 * y + 1, 2 * xx);
      const double d = x.at(2 * y + 1, 2 * xx + 1);
      b.ll.at(y, xx) = 0.5 * (a + bb + c + d);
      b.hl.at(y, xx) = 0.5 * (a + bb - c - d);
      b.lh.at(y, xx) = 0.5 * (a - bb + c - d);
      b.hh.at(y, xx) = 0.5 * (a - bb - c + d);
    }
  return b;
}

inline Plane idwt2(const WaveletBands& b) {
  require_same_shape(b.ll, b.lh, "idwt2");
  require_same_shape(b.ll, b.hl, "idwt2");
  require_same_shape(b.ll, b.hh, "idwt2");
  const int hh2 = b.ll.height(), wh2 = b.ll.width();
  Plane x(hh2 * 2, wh2 * 2);
  for (int y = 0; y < hh2; ++y)
    for (int xx = 0; xx < wh2; ++xx) {
      const double ll = b.ll.at(y, xx), hl = b.hl.at(y, xx);
      const double lh = b.lh.at(y, xx), hh = b.hh.at(y, xx);
      x.at(2 * y, 2 * xx) = 0.5 * (ll + hl + lh + hh);
      x.at(2 * y, 2 * xx + 1) = 0.5 * (ll + hl - lh - hh);
      x.at(2 * y + 1, 2 * xx) = 0.5 * (ll - hl + lh - hh);
      x.at(2 * y + 1, 2 * xx + 1) = 0.5 * (ll - hl - lh + hh);
    }
  return x;
}

// Soft-threshold the detail bands; the LL band passes through untouched so
// illumination-scale content is never shrunk.
inline WaveletBands band_shrink(const WaveletBands& b, double tau) {
  if (tau < 0.0) throw ConfigError("band_shrink: threshold must be >= 0");
  auto soft = [tau](const Plane& p) {
    Plane out(p.height(), p.width());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double v = p.data()[i];
      const double m = std::abs(v) - tau;
      out.data()[i] = (m > 0.0) ? std::copysign(m, v) : 0.0;
    }
    return out;
  };
  return WaveletBands{b.ll, soft(b.lh), soft(b.hl), soft(b.hh)};
}

// Mirror-pad odd dimensions up by one so dwt2 applies; crop afterwards.
inline Plane mirror_pad_even(const Plane& x) {
  const int h = x.height(), w = x.width();
  const int hp = h + (h % 2), wp = w + (w % 2);
  if (hp == h && wp == w) return x;
  Plane out(hp, wp);
  for (int y = 0; y < hp; ++y)
    for (int xx = 0; xx < wp; ++xx) out.at(y, xx) = x.at_mirror(y, xx);
  return out;
}

inline Plane crop(const Plane& x, int height, int width) {
  if (height > x.height() || width > x.width())
    throw ShapeError("crop: target exceeds source");
  Plane out(height, width);
  for (int y = 0; y < height; ++y)
    for (int xx = 0; xx < width; ++xx) out.at(y, xx) = x.at(y, xx);
  return out;
}

}  // namespace unfoldir
