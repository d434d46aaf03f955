#pragma once

#include <array>
#include <functional>
#include <utility>

#include "unfoldir/diffusion.hpp"
#include "unfoldir/gradient.hpp"
#include "unfoldir/plane.hpp"

namespace unfoldir {

// Symmetric positive semi-definite map on planes: a Gram-form smooth part
// (scaled by gram_scale) plus a pointwise diagonal shift. The stationarity
// systems of the illumination and reflectance quadratics both take this
// shape, which keeps them CG-solvable.
class LinearOperator {
 public:
  using GramFn = std::function<Plane(const Plane&)>;

  LinearOperator(int height, int width) : diag_(height, width, 0.0) {}

  void set_gram(GramFn g) { gram_ = std::move(g); }

  LinearOperator scaled(double s) const {
    LinearOperator out = *this;
    out.gram_scale_ *= s;
    return out;
  }

  void add_diagonal(const Plane& d) { axpy(diag_, 1.0, d); }
  void add_diagonal(double c) {
    for (std::size_t i = 0; i < diag_.size(); ++i) diag_.data()[i] += c;
  }

  int height() const { return diag_.height(); }
  int width() const { return diag_.width(); }
  const Plane& diagonal() const { return diag_; }

  Plane apply(const Plane& x) const {
    Plane out = (gram_ && gram_scale_ != 0.0) ? gram_(x)
                                              : Plane(x.height(), x.width(), 0.0);
    if (gram_scale_ != 1.0 && gram_ && gram_scale_ != 0.0)
      for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= gram_scale_;
    for (std::size_t i = 0; i < out.size(); ++i)
      out.data()[i] += diag_.data()[i] * x.data()[i];
    return out;
  }

 private:
  GramFn gram_;
  double gram_scale_ = 1.0;
  Plane diag_;
};

// Gram form of the weighted gradient: x -> D^T (w2 .* (D x)) with D the
// 1/8-normalized Sobel pair. This is exactly the gradient of
// (1/2) * || sqrt(w2) .* grad(x) ||^2, so "inverting" the smoothness block
// means solving with this operator.
inline LinearOperator weighted_laplacian(const Plane& w2) {
  for (std::size_t i = 0; i < w2.size(); ++i)
    if (w2.data()[i] < 0.0)
      throw ConfigError("weighted_laplacian: weights must be nonnegative");
  LinearOperator op(w2.height(), w2.width());
  op.set_gram([w2](const Plane& x) {
    GradientPair g = sobel_grad(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      g.gx.data()[i] *= w2.data()[i];
      g.gy.data()[i] *= w2.data()[i];
    }
    return sobel_grad_adjoint(g.gx, g.gy);
  });
  return op;
}

// Gram operator of the frozen-coefficient neighborhood differences:
//   x -> sum_j N_j^T (c_j^2 .* (N_j x)),  N_j x = (1/9)(x_j - x_i).
// Zero on constants; the self offset contributes nothing.
inline LinearOperator diffusion_gram(const std::array<Plane, 9>& coeffs) {
  const int h = coeffs[0].height(), w = coeffs[0].width();
  std::array<Plane, 9> c2;
  for (int j = 0; j < 9; ++j) {
    c2[j] = Plane(h, w);
    for (std::size_t i = 0; i < c2[j].size(); ++i) {
      const double c = coeffs[j].data()[i];
      c2[j].data()[i] = c * c;
    }
  }
  LinearOperator op(h, w);
  op.set_gram([c2](const Plane& x) {
    const double inv_n2 = 1.0 / (kNeighborCount * kNeighborCount);
    Plane out(x.height(), x.width(), 0.0);
    Plane t(x.height(), x.width());
    for (int j = 0; j < 9; ++j) {
      if (j == 4) continue;
      const int dy = kNeighborOffsets[j][0], dx = kNeighborOffsets[j][1];
      Plane d = offset_diff(x, dy, dx);
      for (std::size_t i = 0; i < t.size(); ++i)
        t.data()[i] = c2[j].data()[i] * d.data()[i];
      offset_diff_adjoint_accum(t, dy, dx, out);
    }
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= inv_n2;
    return out;
  });
  return op;
}

}  // namespace unfoldir
