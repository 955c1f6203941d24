//  Copyright 2026 The placevec Authors. All Rights Reserved.
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#pragma once

// Skip-gram negative-sampling kernels for a single (center, context, negatives)
// sample. The trainer calls sgns_step; sgns_loss and sgns_gradient exist so the
// update can be checked against finite differences.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <span>

namespace placevec {

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

/// log(sigmoid(x)) without overflow for large |x|.
template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  return x >= Scalar(0) ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

/// Negative log-likelihood of one sample. Row 0 of `outputs` is the observed
/// context vector, the remaining rows are the negative draws:
///   L = -log s(u_0 . v) - sum_k log s(-u_k . v)
template <typename CenterDerived, typename OutputsDerived>
typename CenterDerived::Scalar sgns_loss(const Eigen::MatrixBase<CenterDerived>& center,
                                         const Eigen::MatrixBase<OutputsDerived>& outputs) {
  using Scalar = typename CenterDerived::Scalar;
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> v = center;
  Scalar loss = -log_sigmoid<Scalar>(outputs.row(0).dot(v));
  for (Eigen::Index k = 1; k < outputs.rows(); ++k) {
    loss -= log_sigmoid<Scalar>(-outputs.row(k).dot(v));
  }
  return loss;
}

template <typename Scalar>
struct SgnsGradient {
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> center;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> outputs;
};

/// Analytic gradient of sgns_loss with respect to the center vector and every
/// output row.
template <typename CenterDerived, typename OutputsDerived>
SgnsGradient<typename CenterDerived::Scalar> sgns_gradient(const Eigen::MatrixBase<CenterDerived>& center,
                                                           const Eigen::MatrixBase<OutputsDerived>& outputs) {
  using Scalar = typename CenterDerived::Scalar;
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> v = center;
  SgnsGradient<Scalar> g;
  g.center.setZero(v.size());
  g.outputs.resize(outputs.rows(), outputs.cols());
  for (Eigen::Index k = 0; k < outputs.rows(); ++k) {
    const Scalar label = k == 0 ? Scalar(1) : Scalar(0);
    const Scalar coeff = sigmoid<Scalar>(outputs.row(k).dot(v)) - label;
    g.center += coeff * outputs.row(k);
    g.outputs.row(k) = coeff * v;
  }
  return g;
}

/// One SGD step on `input.row(center)` and the output rows of `context` and
/// `negatives`. Output rows are updated in order, each against the center
/// vector as it was before the step; the center vector is updated last.
/// `scratch` is a row vector with `input.cols()` entries. Returns the sample
/// loss evaluated before the update.
template <typename InputDerived, typename OutputDerived, typename ScratchDerived>
typename InputDerived::Scalar sgns_step(Eigen::MatrixBase<InputDerived>& input,
                                        Eigen::MatrixBase<OutputDerived>& output, std::uint32_t center,
                                        std::uint32_t context, std::span<const std::uint32_t> negatives,
                                        typename InputDerived::Scalar lr,
                                        Eigen::MatrixBase<ScratchDerived>& scratch) {
  using Scalar = typename InputDerived::Scalar;
  auto v = input.row(center);
  scratch.setZero();
  Scalar loss(0);
  const auto update = [&](std::uint32_t target, bool positive) {
    auto u = output.row(target);
    const Scalar x = u.dot(v);
    loss -= log_sigmoid<Scalar>(positive ? x : -x);
    const Scalar g = ((positive ? Scalar(1) : Scalar(0)) - sigmoid<Scalar>(x)) * lr;
    scratch += g * u;
    u += g * v;
  };
  update(context, true);
  for (const std::uint32_t neg : negatives) update(neg, false);
  v += scratch;
  return loss;
}

}  // namespace placevec
