// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/core/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sala/autodiff/tape.hpp"

namespace sala::core {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

}  // namespace

double euclidean_distance(std::span<const double> x, std::span<const double> c) {
  require_same_length(x.size(), c.size(), "euclidean_distance");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - c[j];
    acc += diff * diff;
  }
  return acc;
}

double adaptive_distance(std::span<const double> x, std::span<const double> c, std::span<const double> alpha) {
  require_same_length(x.size(), c.size(), "adaptive_distance");
  require_same_length(x.size(), alpha.size(), "adaptive_distance");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(alpha[j] >= 0.0)) {
      throw std::invalid_argument("adaptive_distance: weight " + std::to_string(j) + " is negative or NaN");
    }
    const double diff = x[j] - c[j];
    acc += alpha[j] * (diff * diff);
  }
  return acc;
}

std::vector<double> class_probabilities(std::span<const double> distances) {
  if (distances.empty()) throw std::invalid_argument("class_probabilities: no classes");
  const double shift = -*std::min_element(distances.begin(), distances.end());
  std::vector<double> p(distances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-distances[i] - shift);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

ad::Tensor distance_table(const ad::Tensor& x, const ad::Tensor& centers, const ad::Tensor& alpha) {
  if (x.rank() != 2 || centers.rank() != 2 || x.dim(1) != centers.dim(1)) {
    throw std::invalid_argument("distance_table: incompatible shapes " + ad::shape_str(x.shape()) + " and " +
                                ad::shape_str(centers.shape()));
  }
  const bool weighted = alpha.defined();
  if (weighted && alpha.shape() != centers.shape()) {
    throw std::invalid_argument("distance_table: weights " + ad::shape_str(alpha.shape()) + " do not match centers " +
                                ad::shape_str(centers.shape()));
  }
  const std::size_t m = x.dim(0);
  const std::size_t n = centers.dim(0);
  const std::size_t d = x.dim(1);
  auto xv = x.data();
  auto cv = centers.data();
  std::span<const double> av = weighted ? alpha.data() : std::span<const double>{};
  if (weighted) {
    for (std::size_t k = 0; k < av.size(); ++k) {
      if (!(av[k] >= 0.0)) throw std::invalid_argument("distance_table: metric weights must be nonnegative");
    }
  }

  std::vector<double> out(m * n);
  for (std::size_t u = 0; u < m; ++u) {
    auto xu = xv.subspan(u * d, d);
    for (std::size_t i = 0; i < n; ++i) {
      auto ci = cv.subspan(i * d, d);
      out[u * n + i] = weighted ? adaptive_distance(xu, ci, av.subspan(i * d, d)) : euclidean_distance(xu, ci);
    }
  }

  const bool record = weighted ? ad::should_record({&x, &centers, &alpha}) : ad::should_record({&x, &centers});
  ad::Tensor result = ad::Tensor::from({m, n}, std::move(out), record);
  if (!record) return result;

  std::vector<ad::Tensor> inputs{x, centers};
  if (weighted) inputs.push_back(alpha);
  ad::Tape::active()->record(result, std::move(inputs), [x, centers, alpha, weighted, m, n, d](std::span<const double> g) {
    auto xv = x.data();
    auto cv = centers.data();
    std::span<const double> av = weighted ? alpha.data() : std::span<const double>{};
    std::span<double> gx = x.requires_grad() ? x.mutable_grad() : std::span<double>{};
    std::span<double> gc = centers.requires_grad() ? centers.mutable_grad() : std::span<double>{};
    std::span<double> ga = (weighted && alpha.requires_grad()) ? alpha.mutable_grad() : std::span<double>{};
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t i = 0; i < n; ++i) {
        const double gui = g[u * n + i];
        if (gui == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = xv[u * d + j] - cv[i * d + j];
          const double a = weighted ? av[i * d + j] : 1.0;
          const double lin = 2.0 * a * diff * gui;
          if (!gx.empty()) gx[u * d + j] += lin;
          if (!gc.empty()) gc[i * d + j] -= lin;
          if (!ga.empty()) ga[i * d + j] += diff * diff * gui;
        }
      }
    }
  });
  return result;
}

}  // namespace sala::core
