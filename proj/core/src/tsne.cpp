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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "probekit/analysis.hpp"
#include "probekit/errors.hpp"
#include "probekit/rng.hpp"

namespace probekit::analysis {

namespace {

constexpr int kBetaSearchIters = 200;
constexpr double kEntropyTolerance = 1e-7;
constexpr double kMinGain = 0.01;
constexpr double kInitScale = 1e-4;
constexpr double kMomentumInitial = 0.5;
constexpr double kMomentumFinal = 0.8;
constexpr int kMomentumSwitchIter = 250;

// Squared Euclidean distances between rows.
Matrix squared_distances(const Matrix& x) {
  Matrix d2(x.rows, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    d2.at(i, i) = 0.0;
    for (std::size_t j = i + 1; j < x.rows; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < x.cols; ++k) {
        const double diff = x.at(i, k) - x.at(j, k);
        acc += diff * diff;
      }
      d2.at(i, j) = acc;
      d2.at(j, i) = acc;
    }
  }
  return d2;
}

void validate_perplexity(double perplexity, std::size_t c) {
  const double limit = static_cast<double>(c - 1) / 3.0;
  if (!std::isfinite(perplexity) || !(perplexity > 0.0) || perplexity >= limit) {
    throw InvalidPerplexity("perplexity must be in (0, " + std::to_string(limit) +
                            ") for " + std::to_string(c) + " rows, got " +
                            std::to_string(perplexity));
  }
}

}  // namespace

double clamp_perplexity(double wanted, std::size_t c) {
  if (c < 2) return wanted;
  const double limit =
      std::nextafter(static_cast<double>(c - 1) / 3.0, 0.0);
  return std::min(wanted, limit);
}

Matrix conditional_affinities(const Matrix& x, double perplexity) {
  const std::size_t c = x.rows;
  if (c < 4) {
    throw TooFewRows("t-SNE needs at least 4 rows, got " + std::to_string(c));
  }
  if (x.cols == 0) throw ShapeError("t-SNE input must have at least one column");
  if (!x.all_finite()) throw DomainError("t-SNE input contains a non-finite value");
  validate_perplexity(perplexity, c);

  const Matrix d2 = squared_distances(x);
  const double target_entropy = std::log(perplexity);

  Matrix p(c, c);  // zero-initialized; diagonal stays zero
  std::vector<double> row(c);
  for (std::size_t i = 0; i < c; ++i) {
    // Shift distances so the smallest is zero; the conditional distribution
    // is invariant to the shift and exp() stays in range.
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) {
      if (j != i) d_min = std::min(d_min, d2.at(i, j));
    }

    // Evaluate the row's entropy (nats) at a given precision and stash the
    // unnormalized probabilities in `row`.
    double sum_p = 0.0;
    auto entropy_at = [&](double beta) {
      sum_p = 0.0;
      double sum_dp = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double d = d2.at(i, j) - d_min;
        const double w = std::exp(-beta * d);
        row[j] = w;
        sum_p += w;
        sum_dp += d * w;
      }
      return std::log(sum_p) + beta * sum_dp / sum_p;
    };

    double beta = 1.0;
    double beta_min = 0.0;
    double beta_max = std::numeric_limits<double>::infinity();
    double entropy = entropy_at(beta);
    for (int iter = 0; iter < kBetaSearchIters; ++iter) {
      if (std::fabs(entropy - target_entropy) <= kEntropyTolerance) break;
      if (entropy > target_entropy) {
        beta_min = beta;
        beta = std::isinf(beta_max) ? beta * 2.0 : 0.5 * (beta + beta_max);
      } else {
        beta_max = beta;
        beta = 0.5 * (beta + beta_min);
      }
      entropy = entropy_at(beta);
    }

    for (std::size_t j = 0; j < c; ++j) {
      if (j != i) p.at(i, j) = row[j] / sum_p;
    }
  }
  return p;
}

Matrix joint_affinities(const Matrix& conditional) {
  if (conditional.rows != conditional.cols || conditional.rows == 0) {
    throw ShapeError("joint_affinities expects a square conditional matrix");
  }
  const std::size_t c = conditional.rows;
  Matrix joint(c, c);
  const double scale = 1.0 / (2.0 * static_cast<double>(c));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      joint.at(i, j) = (conditional.at(i, j) + conditional.at(j, i)) * scale;
    }
  }
  return joint;
}

Matrix tsne(const LabelVectorSet& set, const TsneConfig& cfg) {
  set.validate();
  if (cfg.iterations < 1) throw InvalidConfig("t-SNE iterations must be >= 1");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InvalidConfig("t-SNE learning rate must be positive and finite");
  }
  if (!(cfg.early_exaggeration >= 1.0) || !std::isfinite(cfg.early_exaggeration)) {
    throw InvalidConfig("t-SNE early exaggeration must be >= 1");
  }
  if (cfg.exaggeration_iters < 0) {
    throw InvalidConfig("t-SNE exaggeration iteration count must be >= 0");
  }

  const Matrix joint = joint_affinities(conditional_affinities(set.matrix, cfg.perplexity));
  const std::size_t c = set.matrix.rows;

  Rng rng(cfg.seed);
  Matrix y(c, 2);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t k = 0; k < 2; ++k) y.at(i, k) = next_normal(rng) * kInitScale;
  }
  Matrix velocity(c, 2);
  Matrix gains(c, 2);
  std::fill(gains.data.begin(), gains.data.end(), 1.0);

  Matrix weight(c, c);  // Student-t kernel values
  Matrix grad(c, 2);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const double exaggeration =
        iter < cfg.exaggeration_iters ? cfg.early_exaggeration : 1.0;
    const double momentum =
        iter < kMomentumSwitchIter ? kMomentumInitial : kMomentumFinal;

    double weight_total = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      weight.at(i, i) = 0.0;
      for (std::size_t j = i + 1; j < c; ++j) {
        const double dy0 = y.at(i, 0) - y.at(j, 0);
        const double dy1 = y.at(i, 1) - y.at(j, 1);
        const double w = 1.0 / (1.0 + dy0 * dy0 + dy1 * dy1);
        weight.at(i, j) = w;
        weight.at(j, i) = w;
        weight_total += 2.0 * w;
      }
    }

    for (std::size_t i = 0; i < c; ++i) {
      double g0 = 0.0, g1 = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        if (j == i) continue;
        const double w = weight.at(i, j);
        const double q = w / weight_total;
        const double coeff = 4.0 * (exaggeration * joint.at(i, j) - q) * w;
        g0 += coeff * (y.at(i, 0) - y.at(j, 0));
        g1 += coeff * (y.at(i, 1) - y.at(j, 1));
      }
      grad.at(i, 0) = g0;
      grad.at(i, 1) = g1;
    }

    double mean0 = 0.0, mean1 = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        const bool same_direction =
            (grad.at(i, k) > 0.0) == (velocity.at(i, k) > 0.0);
        double gain = same_direction ? gains.at(i, k) * 0.8 : gains.at(i, k) + 0.2;
        gain = std::max(gain, kMinGain);
        gains.at(i, k) = gain;
        velocity.at(i, k) =
            momentum * velocity.at(i, k) - cfg.learning_rate * gain * grad.at(i, k);
        y.at(i, k) += velocity.at(i, k);
      }
      mean0 += y.at(i, 0);
      mean1 += y.at(i, 1);
    }
    mean0 /= static_cast<double>(c);
    mean1 /= static_cast<double>(c);
    for (std::size_t i = 0; i < c; ++i) {
      y.at(i, 0) -= mean0;
      y.at(i, 1) -= mean1;
    }
  }

  if (!y.all_finite()) {
    throw DomainError("t-SNE diverged to a non-finite embedding");
  }
  return y;
}

}  // namespace probekit::analysis
