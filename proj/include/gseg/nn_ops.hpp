#pragma once

#include "gseg/tensor.hpp"

#include <cmath>
#include <span>

namespace gseg::nn {

namespace detail {

// im2col over whole image rows: one matrix row per (in_channel, tap), one
// column per pixel of the row chunk. Chunking keeps the buffer bounded on
// large images.
template <typename Scalar>
using MatrixR = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr Eigen::Index kChunkPixels = Eigen::Index(1) << 16;

template <typename Scalar>
void im2col_rows(const Tensor<Scalar>& input, Eigen::Index dilation, Eigen::Index r0,
                 Eigen::Index r1, MatrixR<Scalar>& cols) {
  const Eigen::Index c_in = input.extent(0), h = input.extent(1), w = input.extent(2);
  cols.setZero(c_in * 9, (r1 - r0) * w);
  for (Eigen::Index c = 0; c < c_in; ++c) {
    const auto plane = input.plane(c);
    for (Eigen::Index ky = 0; ky < 3; ++ky)
      for (Eigen::Index kx = 0; kx < 3; ++kx) {
        const Eigen::Index row = c * 9 + ky * 3 + kx;
        const Eigen::Index oy = (ky - 1) * dilation, ox = (kx - 1) * dilation;
        const Eigen::Index xa = std::max<Eigen::Index>(0, -ox);
        const Eigen::Index xb = std::min<Eigen::Index>(w, w - ox);
        if (xb <= xa) continue;
        for (Eigen::Index y = r0; y < r1; ++y) {
          const Eigen::Index sy = y + oy;
          if (sy < 0 || sy >= h) continue;
          cols.row(row).segment((y - r0) * w + xa, xb - xa) =
              plane.row(sy).segment(xa + ox, xb - xa).matrix();
        }
      }
  }
}

}  // namespace detail

/// Dilated 3x3 cross-correlation with zero padding of `dilation` on each
/// side, so the spatial extent is preserved. weights: (out, in, 3, 3),
/// bias: (out), input: (in, H, W) -> (out, H, W).
template <typename Scalar>
Tensor<Scalar> conv2d_dilated(const Tensor<Scalar>& input, const Tensor<Scalar>& weights,
                              const ArrayX<Scalar>& bias, Eigen::Index dilation) {
  if (input.rank() != 3 || weights.rank() != 4)
    throw ValidationError("conv2d_dilated: input must be rank 3 and weights rank 4");
  if (weights.extent(2) != 3 || weights.extent(3) != 3)
    throw ValidationError("conv2d_dilated: kernels must be 3x3");
  if (weights.extent(1) != input.extent(0))
    throw ValidationError("conv2d_dilated: weight in_channels do not match input");
  if (bias.size() != weights.extent(0))
    throw ValidationError("conv2d_dilated: bias length does not match out_channels");
  if (dilation < 1) throw ValidationError("conv2d_dilated: dilation must be >= 1");

  const Eigen::Index c_out = weights.extent(0), c_in = input.extent(0);
  const Eigen::Index h = input.extent(1), w = input.extent(2);
  Tensor<Scalar> out({c_out, h, w});

  const Eigen::Map<const detail::MatrixR<Scalar>> weight_mat(weights.data(), c_out, c_in * 9);
  Eigen::Map<detail::MatrixR<Scalar>> out_mat(out.data(), c_out, h * w);

  const Eigen::Index rows_per_chunk = std::max<Eigen::Index>(1, detail::kChunkPixels / w);
  detail::MatrixR<Scalar> cols;
  for (Eigen::Index r0 = 0; r0 < h; r0 += rows_per_chunk) {
    const Eigen::Index r1 = std::min(h, r0 + rows_per_chunk);
    detail::im2col_rows(input, dilation, r0, r1, cols);
    out_mat.middleCols(r0 * w, (r1 - r0) * w).noalias() = weight_mat * cols;
  }
  for (Eigen::Index o = 0; o < c_out; ++o) out.plane(o) += bias[o];
  return out;
}

/// Gradients of conv2d_dilated. Any of the outputs may be null; non-null
/// outputs are overwritten.
template <typename Scalar>
void conv2d_dilated_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& weights,
                             const Tensor<Scalar>& grad_out, Eigen::Index dilation,
                             Tensor<Scalar>* grad_input, Tensor<Scalar>* grad_weights,
                             ArrayX<Scalar>* grad_bias) {
  const Eigen::Index c_out = weights.extent(0), c_in = input.extent(0);
  const Eigen::Index h = input.extent(1), w = input.extent(2);
  if (grad_out.rank() != 3 || grad_out.extent(0) != c_out || grad_out.extent(1) != h ||
      grad_out.extent(2) != w)
    throw ValidationError("conv2d_dilated_backward: grad_out shape mismatch");

  if (grad_bias) {
    grad_bias->setZero(c_out);
    for (Eigen::Index o = 0; o < c_out; ++o) (*grad_bias)[o] = grad_out.plane(o).sum();
  }
  if (!grad_input && !grad_weights) return;

  if (grad_input) *grad_input = Tensor<Scalar>({c_in, h, w});
  if (grad_weights) *grad_weights = Tensor<Scalar>({c_out, c_in, 3, 3});

  const Eigen::Map<const detail::MatrixR<Scalar>> weight_mat(weights.data(), c_out, c_in * 9);
  const Eigen::Map<const detail::MatrixR<Scalar>> gout_mat(grad_out.data(), c_out, h * w);
  Eigen::Map<detail::MatrixR<Scalar>> gw_mat(
      grad_weights ? grad_weights->data() : nullptr, grad_weights ? c_out : 0,
      grad_weights ? c_in * 9 : 0);

  const Eigen::Index rows_per_chunk = std::max<Eigen::Index>(1, detail::kChunkPixels / w);
  detail::MatrixR<Scalar> cols, gcols;
  for (Eigen::Index r0 = 0; r0 < h; r0 += rows_per_chunk) {
    const Eigen::Index r1 = std::min(h, r0 + rows_per_chunk);
    const auto gout_chunk = gout_mat.middleCols(r0 * w, (r1 - r0) * w);
    if (grad_weights) {
      detail::im2col_rows(input, dilation, r0, r1, cols);
      gw_mat.noalias() += gout_chunk * cols.transpose();
    }
    if (grad_input) {
      gcols.noalias() = weight_mat.transpose() * gout_chunk;
      // col2im: scatter-add each tap row back into the padded positions.
      for (Eigen::Index c = 0; c < c_in; ++c) {
        auto gplane = grad_input->plane(c);
        for (Eigen::Index ky = 0; ky < 3; ++ky)
          for (Eigen::Index kx = 0; kx < 3; ++kx) {
            const Eigen::Index row = c * 9 + ky * 3 + kx;
            const Eigen::Index oy = (ky - 1) * dilation, ox = (kx - 1) * dilation;
            const Eigen::Index xa = std::max<Eigen::Index>(0, -ox);
            const Eigen::Index xb = std::min<Eigen::Index>(w, w - ox);
            if (xb <= xa) continue;
            for (Eigen::Index y = r0; y < r1; ++y) {
              const Eigen::Index sy = y + oy;
              if (sy < 0 || sy >= h) continue;
              gplane.row(sy).segment(xa + ox, xb - xa) +=
                  gcols.row(row).segment((y - r0) * w + xa, xb - xa).array();
            }
          }
      }
    }
  }
}

template <typename Scalar>
Plane<Scalar> sigmoid(const Plane<Scalar>& x) {
  return (Scalar(1) / (Scalar(1) + (-x).exp()));
}

/// Per-pixel softmax over the channel axis, stabilized by max subtraction.
template <typename Scalar>
Tensor<Scalar> softmax_channels(const Tensor<Scalar>& logits) {
  if (logits.rank() != 3) throw ValidationError("softmax_channels: rank-3 tensor expected");
  const Eigen::Index k = logits.extent(0);
  Tensor<Scalar> out = Tensor<Scalar>::zeros_like(logits);
  Plane<Scalar> peak = logits.plane(0);
  for (Eigen::Index c = 1; c < k; ++c) peak = peak.max(logits.plane(c));
  Plane<Scalar> norm = Plane<Scalar>::Zero(peak.rows(), peak.cols());
  for (Eigen::Index c = 0; c < k; ++c) {
    out.plane(c) = (logits.plane(c) - peak).exp();
    norm += out.plane(c);
  }
  for (Eigen::Index c = 0; c < k; ++c) out.plane(c) /= norm;
  return out;
}

/// Weighted side-output fusion: sigmoid of the alpha-weighted sum of the
/// side maps.
template <typename Scalar>
Plane<Scalar> side_fusion(std::span<const Plane<Scalar>> side_maps,
                          std::span<const Scalar> alpha) {
  if (side_maps.empty()) throw ValidationError("side_fusion: need at least one side map");
  if (side_maps.size() != alpha.size())
    throw ValidationError("side_fusion: coefficient count does not match side maps");
  Plane<Scalar> sum = Plane<Scalar>::Zero(side_maps[0].rows(), side_maps[0].cols());
  for (std::size_t m = 0; m < side_maps.size(); ++m) {
    require_same_shape(side_maps[m], side_maps[0], "side_fusion");
    sum += alpha[m] * side_maps[m];
  }
  return sigmoid(sum);
}

template <typename Scalar>
struct LossGrad {
  Scalar loss = 0;
  Tensor<Scalar> grad;
};

/// Mean per-pixel softmax cross entropy against integer class targets;
/// grad is (softmax - onehot) / pixel_count.
template <typename Scalar>
LossGrad<Scalar> softmax_xent(const Tensor<Scalar>& logits, const Mask& target) {
  if (logits.rank() != 3) throw ValidationError("softmax_xent: rank-3 logits expected");
  require_same_shape(logits.extent(1), logits.extent(2), target.rows(), target.cols(),
                     "softmax_xent");
  const Eigen::Index k = logits.extent(0);
  if ((target.template cast<Eigen::Index>() >= k).any())
    throw ValidationError("softmax_xent: target class out of range");

  LossGrad<Scalar> result;
  result.grad = softmax_channels(logits);
  const Scalar norm = Scalar(1) / Scalar(target.size());
  double loss = 0;
  for (Eigen::Index y = 0; y < target.rows(); ++y)
    for (Eigen::Index x = 0; x < target.cols(); ++x) {
      const Eigen::Index t = target(y, x);
      loss -= std::log(double(result.grad.plane(t)(y, x)));
      result.grad.plane(t)(y, x) -= Scalar(1);
    }
  result.grad.flat() *= norm;
  result.loss = Scalar(loss / double(target.size()));
  return result;
}

template <typename Scalar>
struct PlaneLossGrad {
  Scalar loss = 0;
  Plane<Scalar> grad;
};

/// Mean per-pixel sigmoid cross entropy against a binary target;
/// grad is (sigmoid - target) / pixel_count. Computed in the usual
/// overflow-safe form.
template <typename Scalar>
PlaneLossGrad<Scalar> sigmoid_xent(const Plane<Scalar>& logits, const Mask& target) {
  require_same_shape(logits, target, "sigmoid_xent");
  PlaneLossGrad<Scalar> result;
  const auto t = target.template cast<Scalar>();
  const Plane<Scalar> losses =
      logits.max(Scalar(0)) - logits * t + (Scalar(1) + (-logits.abs()).exp()).log();
  result.loss = losses.sum() / Scalar(logits.size());
  result.grad = (sigmoid(logits) - t) / Scalar(logits.size());
  return result;
}

}  // namespace gseg::nn
