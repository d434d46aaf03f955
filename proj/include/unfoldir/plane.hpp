#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "unfoldir/errors.hpp"

namespace unfoldir {

// Boundary policy is mirror reflection everywhere: index -1 reads 1, index n
// reads n-2. Difference operators built on it annihilate constants.
inline int mirror_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// Single-channel field of doubles, row-major. Carries illumination maps,
// reflectance channels, gradients and every intermediate field; values are
// nominally [0,1] for imagery but signed/unbounded for derived fields.
class Plane {
 public:
  Plane() : height_(0), width_(0) {}
  Plane(int height, int width, double fill = 0.0)
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(height) * width, fill) {
    if (height < 1 || width < 1) throw ShapeError("plane dimensions must be >= 1");
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  // Read with mirror boundary handling.
  double at_mirror(int y, int x) const {
    return at(mirror_index(y, height_), mirror_index(x, width_));
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool same_shape(const Plane& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  int height_, width_;
  std::vector<double> data_;
};

inline void require_same_shape(const Plane& a, const Plane& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": plane shape mismatch");
}

// ---- elementwise helpers ----

inline Plane add(const Plane& a, const Plane& b) {
  require_same_shape(a, b, "add");
  Plane out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

inline Plane sub(const Plane& a, const Plane& b) {
  require_same_shape(a, b, "sub");
  Plane out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

inline Plane mul(const Plane& a, const Plane& b) {
  require_same_shape(a, b, "mul");
  Plane out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

inline Plane scaled(const Plane& a, double s) {
  Plane out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * s;
  return out;
}

inline Plane shifted(const Plane& a, double c) {
  Plane out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + c;
  return out;
}

// y += s * x
inline void axpy(Plane& y, double s, const Plane& x) {
  require_same_shape(y, x, "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] += s * x.data()[i];
}

inline double dot(const Plane& a, const Plane& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  return acc;
}

inline double norm2(const Plane& a) { return std::sqrt(dot(a, a)); }

inline double sum(const Plane& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i];
  return acc;
}

inline double sum_abs(const Plane& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a.data()[i]);
  return acc;
}

inline double mean(const Plane& a) { return sum(a) / static_cast<double>(a.size()); }

inline double max_abs(const Plane& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
  return m;
}

inline Plane clamped(const Plane& a, double lo, double hi) {
  Plane out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = std::clamp(a.data()[i], lo, hi);
  return out;
}

inline bool all_finite(const Plane& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

}  // namespace unfoldir
