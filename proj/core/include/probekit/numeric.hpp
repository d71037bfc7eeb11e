/* Copyright 2026 The Probekit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace probekit {

// Dense row-major matrix of doubles. Deliberately minimal: the toolkit's
// shapes are small enough that explicit loops beat a linear algebra
// dependency, and fixed evaluation order keeps results bit-reproducible.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Error-free transforms. two_prod relies on std::fma being a single rounding.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  e = (a - (s - bv)) + (b - bv);
}

inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// Scales v to unit l2 norm; returns false (and leaves v untouched, i.e. all
// zeros) when the norm is zero.
inline bool l2_normalize(std::span<double> v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return false;
  for (double& x : v) x /= norm;
  return true;
}

// Streaming per-dimension population moments, accumulated in double no matter
// the input element type.
class RunningMoments {
 public:
  explicit RunningMoments(std::size_t dim)
      : sum_(dim, 0.0), sum_sq_(dim, 0.0), dim_(dim) {}

  template <typename T>
  void add_row(std::span<const T> row) {
    for (std::size_t i = 0; i < dim_; ++i) {
      const double v = static_cast<double>(row[i]);
      sum_[i] += v;
      sum_sq_[i] += v * v;
    }
    ++count_;
  }

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }

  std::vector<double> mean() const {
    std::vector<double> m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) m[i] = sum_[i] / static_cast<double>(count_);
    return m;
  }

  // Population standard deviation (divide by N), clamped below at epsilon.
  std::vector<double> stddev(double epsilon) const {
    std::vector<double> s(dim_);
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < dim_; ++i) {
      const double m = sum_[i] / n;
      double var = sum_sq_[i] / n - m * m;
      if (var < 0.0) var = 0.0;  // rounding guard
      s[i] = std::max(std::sqrt(var), epsilon);
    }
    return s;
  }

 private:
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
  std::size_t dim_;
  std::size_t count_ = 0;
};

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace probekit
