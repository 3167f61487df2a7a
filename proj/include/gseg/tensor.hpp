#pragma once

#include "gseg/types.hpp"

#include <numeric>

namespace gseg::nn {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Dense N-dimensional array: a flat row-major buffer plus a shape. Rank-3
/// tensors are (channels, height, width); rank-4 weight tensors are
/// (out_channels, in_channels, kernel_h, kernel_w). Channel planes map
/// straight onto Eigen arrays, so per-plane math stays expression-based.
template <typename Scalar>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<Eigen::Index> shape) : shape_(std::move(shape)) {
    Eigen::Index n = 1;
    for (const Eigen::Index extent : shape_) {
      if (extent <= 0) throw ValidationError("tensor extents must be positive");
      n *= extent;
    }
    data_ = ArrayX<Scalar>::Zero(n);
  }

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<Eigen::Index>& shape() const { return shape_; }
  Eigen::Index rank() const { return static_cast<Eigen::Index>(shape_.size()); }
  Eigen::Index extent(Eigen::Index axis) const { return shape_[axis]; }
  Eigen::Index size() const { return data_.size(); }

  ArrayX<Scalar>& flat() { return data_; }
  const ArrayX<Scalar>& flat() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  /// Channel plane of a rank-3 tensor as a (height, width) view.
  Eigen::Map<Plane<Scalar>> plane(Eigen::Index c) {
    return {data_.data() + c * extent(1) * extent(2), extent(1), extent(2)};
  }
  Eigen::Map<const Plane<Scalar>> plane(Eigen::Index c) const {
    return {data_.data() + c * extent(1) * extent(2), extent(1), extent(2)};
  }

  /// One 3x3 (or kh x kw) kernel of a rank-4 weight tensor.
  Eigen::Map<Plane<Scalar>> kernel(Eigen::Index oc, Eigen::Index ic) {
    const Eigen::Index k = extent(2) * extent(3);
    return {data_.data() + (oc * extent(1) + ic) * k, extent(2), extent(3)};
  }
  Eigen::Map<const Plane<Scalar>> kernel(Eigen::Index oc, Eigen::Index ic) const {
    const Eigen::Index k = extent(2) * extent(3);
    return {data_.data() + (oc * extent(1) + ic) * k, extent(2), extent(3)};
  }

  template <typename S2>
  Tensor<S2> cast() const {
    Tensor<S2> out(shape_);
    out.flat() = data_.template cast<S2>();
    return out;
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::vector<Eigen::Index> shape_;
  ArrayX<Scalar> data_;
};

/// Stack (height, width) planes into a rank-3 (channels, height, width) tensor.
template <typename Scalar>
Tensor<Scalar> stack_planes(const std::vector<Plane<Scalar>>& planes) {
  if (planes.empty()) throw ValidationError("stack_planes: no planes");
  const Eigen::Index h = planes.front().rows(), w = planes.front().cols();
  Tensor<Scalar> out({static_cast<Eigen::Index>(planes.size()), h, w});
  for (std::size_t c = 0; c < planes.size(); ++c) {
    require_same_shape(planes[c], planes.front(), "stack_planes");
    out.plane(static_cast<Eigen::Index>(c)) = planes[c];
  }
  return out;
}

}  // namespace gseg::nn
