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

#include "probekit/pooling.hpp"

#include <algorithm>

#include "probekit/errors.hpp"

namespace probekit::pooling {
namespace {

void require_nonempty_finite(const FrameSequence& fs, const char* what) {
  if (fs.values.rows == 0 || fs.values.cols == 0) {
    throw EmptyInput(std::string(what) + " must have at least one frame and channel");
  }
  if (!fs.values.all_finite()) {
    throw DomainError(std::string(what) + " contains a non-finite value");
  }
}

// Double-double value: hi + lo with |lo| <= ulp(hi)/2.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

DD to_dd(const CompensatedSum& s) {
  DD d;
  two_sum(s.sum, s.carry, d.hi, d.lo);
  return d;
}

// Quotient of double-double values, corrected with one refinement step so the
// result is the correctly rounded double quotient of the exact inputs.
double dd_divide(const DD& num, const DD& den) {
  const double q0 = num.hi / den.hi;
  double ph, pl;
  two_prod(q0, den.hi, ph, pl);
  const double r = (((num.hi - ph) - pl) + num.lo) - q0 * den.lo;
  return q0 + r / den.hi;
}

}  // namespace

std::vector<double> average_pool(const FrameSequence& fs) {
  require_nonempty_finite(fs, "frame sequence");
  const std::size_t t_count = fs.values.rows;
  const std::size_t k = fs.values.cols;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    CompensatedSum sum;
    for (std::size_t t = 0; t < t_count; ++t) {
      sum.add(fs.values.at(t, c));
    }
    out[c] = sum.value() / static_cast<double>(t_count);
  }
  return out;
}

std::vector<double> max_pool(const FrameSequence& fs) {
  require_nonempty_finite(fs, "frame sequence");
  const std::size_t k = fs.values.cols;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    double best = fs.values.at(0, c);
    for (std::size_t t = 1; t < fs.values.rows; ++t) {
      best = std::max(best, fs.values.at(t, c));
    }
    out[c] = best;
  }
  return out;
}

std::vector<double> linear_softmax_pool(const FrameSequence& probs) {
  require_nonempty_finite(probs, "probability sequence");
  const std::size_t k = probs.values.cols;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    CompensatedSum num;  // sum of p^2, including the exact product tails
    CompensatedSum den;  // sum of p
    for (std::size_t t = 0; t < probs.values.rows; ++t) {
      const double p = probs.values.at(t, c);
      if (p < 0.0 || p > 1.0) {
        throw DomainError("probability outside [0, 1] in linear_softmax_pool");
      }
      den.add(p);
      double hi, lo;
      two_prod(p, p, hi, lo);
      num.add(hi);
      num.add(lo);
    }
    const DD d = to_dd(den);
    if (d.hi == 0.0 && d.lo == 0.0) {
      out[c] = 0.0;
    } else {
      out[c] = dd_divide(to_dd(num), d);
    }
  }
  return out;
}

std::vector<double> attention_pool(const FrameSequence& probs,
                                   const FrameSequence& weights) {
  require_nonempty_finite(probs, "probability sequence");
  require_nonempty_finite(weights, "weight sequence");
  if (!probs.values.same_shape(weights.values)) {
    throw ShapeError("attention_pool requires probabilities and weights of one shape");
  }
  const std::size_t k = probs.values.cols;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    CompensatedSum num;
    CompensatedSum den;
    for (std::size_t t = 0; t < probs.values.rows; ++t) {
      const double w = weights.values.at(t, c);
      if (w < 0.0) {
        throw DomainError("attention weights must be non-negative");
      }
      den.add(w);
      double hi, lo;
      two_prod(w, probs.values.at(t, c), hi, lo);
      num.add(hi);
      num.add(lo);
    }
    const DD d = to_dd(den);
    if (d.hi == 0.0 && d.lo == 0.0) {
      throw ZeroWeight("attention weight column " + std::to_string(c) +
                       " sums to zero");
    }
    out[c] = dd_divide(to_dd(num), d);
  }
  return out;
}

}  // namespace probekit::pooling
