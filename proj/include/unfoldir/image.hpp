#pragma once

#include <utility>
#include <vector>

#include "unfoldir/plane.hpp"

namespace unfoldir {

// Planar multi-channel image, 1 (gray/illumination) or 3 (RGB) channels.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0) {
    if (channels != 1 && channels != 3) throw ShapeError("channel count must be 1 or 3");
    planes_.reserve(channels);
    for (int c = 0; c < channels; ++c) planes_.emplace_back(height, width, fill);
  }
  explicit Image(Plane p) { planes_.push_back(std::move(p)); }

  static Image from_planes(std::vector<Plane> planes) {
    if (planes.size() != 1 && planes.size() != 3)
      throw ShapeError("channel count must be 1 or 3");
    for (const auto& p : planes) require_same_shape(p, planes[0], "from_planes");
    Image img;
    img.planes_ = std::move(planes);
    return img;
  }

  int height() const { return planes_.empty() ? 0 : planes_[0].height(); }
  int width() const { return planes_.empty() ? 0 : planes_[0].width(); }
  int channels() const { return static_cast<int>(planes_.size()); }

  Plane& channel(int c) { return planes_[c]; }
  const Plane& channel(int c) const { return planes_[c]; }

  bool same_shape(const Image& o) const {
    return height() == o.height() && width() == o.width() && channels() == o.channels();
  }

 private:
  std::vector<Plane> planes_;
};

// Coupled reflectance/illumination estimate. Illumination is single-channel
// and broadcasts over reflectance channels when multiplied; both share the
// spatial dimensions. Illumination stays in [eps,1]; reflectance keeps the
// division headroom [0, 1/eps] and is clamped to [0,1] only at final output.
struct RetinexPair {
  Image reflectance;
  Plane illumination;
};

inline bool all_finite(const Image& img) {
  for (int c = 0; c < img.channels(); ++c)
    if (!all_finite(img.channel(c))) return false;
  return true;
}

// Elementwise product; b may be single-channel and is then broadcast.
inline Image hadamard(const Image& a, const Image& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw ShapeError("hadamard: spatial dimensions differ");
  if (b.channels() != a.channels() && b.channels() != 1)
    throw ShapeError("hadamard: incompatible channel counts");
  std::vector<Plane> out;
  out.reserve(a.channels());
  for (int c = 0; c < a.channels(); ++c)
    out.push_back(mul(a.channel(c), b.channel(b.channels() == 1 ? 0 : c)));
  if (a.channels() == 3) return Image::from_planes(std::move(out));
  return Image(std::move(out[0]));
}

inline Image hadamard(const Image& a, const Plane& b) {
  return hadamard(a, Image(b));
}

inline Plane clamp_unit(const Plane& x) { return clamped(x, 0.0, 1.0); }

inline Image clamp_unit(const Image& x) {
  std::vector<Plane> out;
  out.reserve(x.channels());
  for (int c = 0; c < x.channels(); ++c) out.push_back(clamp_unit(x.channel(c)));
  return Image::from_planes(std::move(out));
}

// Retinex initialization: illumination is the per-pixel channel maximum
// floored at eps, reflectance the elementwise quotient. Their product
// reproduces the input wherever the channel max clears the floor.
inline RetinexPair decompose_init(const Image& input, double eps) {
  if (!(eps > 0.0 && eps < 0.1))
    throw ConfigError("decompose_init: eps must lie in (0, 0.1)");
  const int h = input.height(), w = input.width();
  Plane illum(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double m = input.channel(0).at(y, x);
      for (int c = 1; c < input.channels(); ++c)
        m = std::max(m, input.channel(c).at(y, x));
      illum.at(y, x) = std::clamp(m, eps, 1.0);
    }
  std::vector<Plane> refl;
  refl.reserve(input.channels());
  for (int c = 0; c < input.channels(); ++c) {
    Plane r(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) r.at(y, x) = input.channel(c).at(y, x) / illum.at(y, x);
    refl.push_back(std::move(r));
  }
  return RetinexPair{Image::from_planes(std::move(refl)), std::move(illum)};
}

}  // namespace unfoldir
