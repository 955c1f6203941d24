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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace placevec {

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution P(T <= t) with df > 0 degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};

template <typename Scalar>
struct SampleMoments {
  std::size_t n = 0;
  Scalar mean = 0;
  /// Unbiased (n - 1) variance.
  Scalar variance = 0;
};

/// Two-pass mean and sample variance.
template <typename Scalar>
SampleMoments<Scalar> sample_moments(std::span<const Scalar> xs) {
  SampleMoments<Scalar> m;
  m.n = xs.size();
  if (xs.empty()) return m;
  Scalar sum = 0;
  for (const Scalar x : xs) sum += x;
  m.mean = sum / static_cast<Scalar>(xs.size());
  if (xs.size() < 2) return m;
  Scalar ss = 0;
  for (const Scalar x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / static_cast<Scalar>(xs.size() - 1);
  return m;
}

/// Welch's unequal-variance t-test from summary moments.
///
/// When both standard errors vanish: equal means give t = 0, p = 1; unequal
/// means give t = +/-infinity, p = 0. df then falls back to n_a + n_b - 2.
template <typename Scalar>
WelchResult welch_t(const SampleMoments<Scalar>& a, const SampleMoments<Scalar>& b) {
  if (a.n < 2 || b.n < 2) throw std::invalid_argument("welch_t: each sample needs at least 2 values");
  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);
  const double va = static_cast<double>(a.variance) / na;
  const double vb = static_cast<double>(b.variance) / nb;
  const double diff = static_cast<double>(a.mean) - static_cast<double>(b.mean);
  const double se2 = va + vb;
  WelchResult r;
  if (se2 == 0.0) {
    r.df = na + nb - 2.0;
    if (diff == 0.0) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
    }
    return r;
  }
  r.t = diff / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_two_sided = student_t_two_sided(r.t, r.df);
  return r;
}

template <typename Scalar>
WelchResult welch_t(std::span<const Scalar> a, std::span<const Scalar> b) {
  return welch_t(sample_moments(a), sample_moments(b));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::uint64_t n = 0;
};

/// Single-pass least-squares accumulator over (x, y) with running means and
/// centered co-moments. merge() combines shards (Chan et al. update), so
/// results from sharded enumeration agree with a serial pass up to rounding.
template <typename Scalar>
class OlsAccumulator {
 public:
  void add(Scalar x, Scalar y) {
    ++n_;
    const Scalar dx = x - mean_x_;
    mean_x_ += dx / static_cast<Scalar>(n_);
    const Scalar dy = y - mean_y_;
    mean_y_ += dy / static_cast<Scalar>(n_);
    sxx_ += dx * (x - mean_x_);
    syy_ += dy * (y - mean_y_);
    sxy_ += dx * (y - mean_y_);
  }

  void merge(const OlsAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const Scalar n1 = static_cast<Scalar>(n_);
    const Scalar n2 = static_cast<Scalar>(o.n_);
    const Scalar n = n1 + n2;
    const Scalar dx = o.mean_x_ - mean_x_;
    const Scalar dy = o.mean_y_ - mean_y_;
    sxx_ += o.sxx_ + dx * dx * n1 * n2 / n;
    syy_ += o.syy_ + dy * dy * n1 * n2 / n;
    sxy_ += o.sxy_ + dx * dy * n1 * n2 / n;
    mean_x_ += dx * n2 / n;
    mean_y_ += dy * n2 / n;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  Scalar mean_x() const { return mean_x_; }
  Scalar mean_y() const { return mean_y_; }

  /// Throws std::domain_error with fewer than 2 points or zero x variance.
  LinearFit fit() const {
    if (n_ < 2) throw std::domain_error("ols_fit: need at least 2 points");
    if (!(sxx_ > 0)) throw std::domain_error("ols_fit: zero variance in x");
    LinearFit f;
    f.n = n_;
    f.slope = static_cast<double>(sxy_ / sxx_);
    f.intercept = static_cast<double>(mean_y_) - f.slope * static_cast<double>(mean_x_);
    // a constant response is fitted exactly
    f.r_squared = syy_ > 0 ? static_cast<double>(sxy_ * sxy_ / (sxx_ * syy_)) : 1.0;
    f.r_squared = std::min(1.0, std::max(0.0, f.r_squared));
    return f;
  }

 private:
  std::uint64_t n_ = 0;
  Scalar mean_x_ = 0;
  Scalar mean_y_ = 0;
  Scalar sxx_ = 0;
  Scalar syy_ = 0;
  Scalar sxy_ = 0;
};

template <typename Scalar>
LinearFit ols_fit(std::span<const Scalar> xs, std::span<const Scalar> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("ols_fit: x/y size mismatch");
  OlsAccumulator<Scalar> acc;
  for (std::size_t i = 0; i < xs.size(); ++i) acc.add(xs[i], ys[i]);
  return acc.fit();
}

}  // namespace placevec
