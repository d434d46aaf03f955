#pragma once

#include <cmath>
#include <vector>

#include "unfoldir/image.hpp"

namespace unfoldir {

struct MetricsReport {
  double psnr = 0.0;
  double ssim = 0.0;
  std::vector<double> energy_trace;
  std::vector<double> isic_trace;
  double runtime_ms = 0.0;
};

// Peak signal-to-noise ratio on unit-range data, capped at 99 dB so identical
// images report a finite number.
inline double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("psnr: dimension mismatch");
  double se = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < a.channels(); ++c) {
    const Plane& pa = a.channel(c);
    const Plane& pb = b.channel(c);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const double d = pa.data()[i] - pb.data()[i];
      se += d * d;
    }
    n += pa.size();
  }
  const double mse = se / n;
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, -10.0 * std::log10(mse));
}

// Single-scale structural similarity: 11x11 Gaussian window (sigma 1.5),
// fully interior windows only, averaged over channels and window centers.
inline double ssim(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("ssim: dimension mismatch");
  const int h = a.height(), w = a.width();
  constexpr int kRadius = 5;
  if (h < 2 * kRadius + 1 || w < 2 * kRadius + 1)
    throw ShapeError("ssim: image smaller than the 11x11 window");

  double kernel[11];
  double ksum = 0.0;
  for (int i = -kRadius; i <= kRadius; ++i) {
    kernel[i + kRadius] = std::exp(-0.5 * (i * i) / (1.5 * 1.5));
    ksum += kernel[i + kRadius];
  }
  for (double& v : kernel) v /= ksum;

  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double total = 0.0;
  std::size_t count = 0;
  for (int c = 0; c < a.channels(); ++c) {
    const Plane& pa = a.channel(c);
    const Plane& pb = b.channel(c);
    for (int y = kRadius; y < h - kRadius; ++y)
      for (int x = kRadius; x < w - kRadius; ++x) {
        double ma = 0.0, mb = 0.0, maa = 0.0, mbb = 0.0, mab = 0.0;
        for (int dy = -kRadius; dy <= kRadius; ++dy) {
          const double ky = kernel[dy + kRadius];
          for (int dx = -kRadius; dx <= kRadius; ++dx) {
            const double wgt = ky * kernel[dx + kRadius];
            const double va = pa.at(y + dy, x + dx);
            const double vb = pb.at(y + dy, x + dx);
            ma += wgt * va;
            mb += wgt * vb;
            maa += wgt * va * va;
            mbb += wgt * vb * vb;
            // grouped so the cross term is bitwise symmetric in (a, b)
            mab += wgt * (va * vb);
          }
        }
        const double var_a = maa - ma * ma;
        const double var_b = mbb - mb * mb;
        const double cov = mab - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        ++count;
      }
  }
  return total / count;
}

}  // namespace unfoldir
