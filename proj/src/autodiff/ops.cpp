// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sala/autodiff/tape.hpp"

namespace sala::ad {

namespace {

Tensor output(Shape shape, std::vector<double> values, bool record) {
  return Tensor::from(std::move(shape), std::move(values), record);
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw std::invalid_argument(std::string(op) + ": expected rank " + std::to_string(rank) +
                                " tensor, got " + shape_str(t.shape()));
  }
}

enum class Arith { add, sub, mul };

Tensor elementwise(Arith kind, const Tensor& a, const Tensor& b) {
  const std::size_t na = a.numel();
  const std::size_t nb = b.numel();
  if (a.shape() != b.shape() && na != 1 && nb != 1) {
    throw std::invalid_argument("elementwise shape mismatch: " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  }
  const Shape& shape = (na >= nb) ? a.shape() : b.shape();
  const std::size_t n = std::max(na, nb);
  auto da = a.data();
  auto db = b.data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = da[na == 1 ? 0 : i];
    double y = db[nb == 1 ? 0 : i];
    switch (kind) {
      case Arith::add: out[i] = x + y; break;
      case Arith::sub: out[i] = x - y; break;
      case Arith::mul: out[i] = x * y; break;
    }
  }
  bool record = should_record({&a, &b});
  Tensor result = output(shape, std::move(out), record);
  if (record) {
    Tape::active()->record(result, {a, b}, [a, b, kind, n, na, nb](std::span<const double> g) {
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        auto db = b.data();
        for (std::size_t i = 0; i < n; ++i) {
          double d = (kind == Arith::mul) ? g[i] * db[nb == 1 ? 0 : i] : g[i];
          ga[na == 1 ? 0 : i] += d;
        }
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        auto da = a.data();
        for (std::size_t i = 0; i < n; ++i) {
          double d = g[i];
          if (kind == Arith::sub) d = -d;
          if (kind == Arith::mul) d = g[i] * da[na == 1 ? 0 : i];
          gb[nb == 1 ? 0 : i] += d;
        }
      }
    });
  }
  return result;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(Arith::add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(Arith::sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(Arith::mul, a, b); }

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= factor;
  bool record = should_record({&a});
  Tensor result = output(a.shape(), std::move(out), record);
  if (record) {
    Tape::active()->record(result, {a}, [a, factor](std::span<const double> g) {
      auto ga = a.mutable_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
    });
  }
  return result;
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.data().begin(), x.data().end());
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  bool record = should_record({&x});
  Tensor result = output(x.shape(), std::move(out), record);
  if (record) {
    Tape::active()->record(result, {x}, [x](std::span<const double> g) {
      auto gx = x.mutable_grad();
      auto dx = x.data();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (dx[i] > 0.0) gx[i] += g[i];
      }
    });
  }
  return result;
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.numel());
  auto dx = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = dx[i];
    out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  bool record = should_record({&x});
  Tensor result = output(x.shape(), out, record);
  if (record) {
    Tape::active()->record(result, {x}, [x, s = std::move(out)](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * s[i] * (1.0 - s[i]);
    });
  }
  return result;
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  bool record = should_record({&x});
  Tensor result = output({1}, {total}, record);
  if (record) {
    Tape::active()->record(result, {x}, [x](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (double& v : gx) v += g[0];
    });
  }
  return result;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw std::invalid_argument("matmul inner dimension mismatch: " + shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  }
  auto da = a.data();
  auto db = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = da[i * k + p];
      const double* brow = &db[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  bool record = should_record({&a, &b});
  Tensor result = output({m, n}, std::move(out), record);
  if (record) {
    Tape::active()->record(result, {a, b}, [a, b, m, k, n](std::span<const double> g) {
      auto da = a.data();
      auto db = b.data();
      if (a.requires_grad()) {
        // dA = dC * B^T
        auto ga = a.mutable_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * db[p * n + j];
            ga[i * k + p] += acc;
          }
        }
      }
      if (b.requires_grad()) {
        // dB = A^T * dC
        auto gb = b.mutable_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = da[i * k + p];
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
          }
        }
      }
    });
  }
  return result;
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, "transpose");
  const std::size_t m = a.dim(0), n = a.dim(1);
  auto da = a.data();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = da[i * n + j];
  bool record = should_record({&a});
  Tensor result = output({n, m}, std::move(out), record);
  if (record) {
    Tape::active()->record(result, {a}, [a, m, n](std::span<const double> g) {
      auto ga = a.mutable_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
    });
  }
  return result;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  require_rank(x, 2, "add_row_bias");
  const std::size_t rows_n = x.dim(0), cols = x.dim(1);
  if (bias.numel() != cols) {
    throw std::invalid_argument("add_row_bias: bias " + shape_str(bias.shape()) + " does not match " +
                                shape_str(x.shape()));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  auto db = bias.data();
  for (std::size_t r = 0; r < rows_n; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += db[c];
  bool record = should_record({&x, &bias});
  Tensor result = output(x.shape(), std::move(out), record);
  if (record) {
    Tape::active()->record(result, {x, bias}, [x, bias, rows_n, cols](std::span<const double> g) {
      if (x.requires_grad()) {
        auto gx = x.mutable_grad();
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
      }
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (std::size_t r = 0; r < rows_n; ++r)
          for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
      }
    });
  }
  return result;
}

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& bias) {
  return add_row_bias(matmul(x, w), bias);
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw std::invalid_argument("reshape " + shape_str(x.shape()) + " -> " + shape_str(shape));
  }
  bool record = should_record({&x});
  Tensor result = output(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()), record);
  if (record) {
    Tape::active()->record(result, {x}, [x](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
  }
  return result;
}

Tensor flatten(const Tensor& x) {
  const std::size_t batch = x.dim(0);
  return reshape(x, {batch, x.numel() / batch});
}

Tensor rows(const Tensor& x, std::span<const std::size_t> indices) {
  require_rank(x, 2, "rows");
  if (indices.empty()) throw std::invalid_argument("rows: empty index list");
  const std::size_t n = x.dim(0), cols = x.dim(1);
  auto dx = x.data();
  std::vector<double> out(indices.size() * cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= n) {
      throw std::out_of_range("rows: index " + std::to_string(indices[r]) + " out of range for " +
                              shape_str(x.shape()));
    }
    std::copy_n(dx.begin() + static_cast<std::ptrdiff_t>(indices[r] * cols), cols,
                out.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  bool record = should_record({&x});
  Tensor result = output({indices.size(), cols}, std::move(out), record);
  if (record) {
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    Tape::active()->record(result, {x}, [x, idx = std::move(idx), cols](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) gx[idx[r] * cols + c] += g[r * cols + c];
    });
  }
  return result;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const std::size_t cols = parts.front().dim(1);
  std::size_t total = 0;
  bool any_grad = false;
  for (const Tensor& p : parts) {
    require_rank(p, 2, "concat_rows");
    if (p.dim(1) != cols) {
      throw std::invalid_argument("concat_rows: column mismatch " + shape_str(parts.front().shape()) +
                                  " vs " + shape_str(p.shape()));
    }
    total += p.dim(0);
    any_grad = any_grad || p.requires_grad();
  }
  std::vector<double> out;
  out.reserve(total * cols);
  for (const Tensor& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  bool record = Tape::active() != nullptr && any_grad;
  Tensor result = output({total, cols}, std::move(out), record);
  if (record) {
    Tape::active()->record(result, parts, [parts](std::span<const double> g) {
      std::size_t offset = 0;
      for (const Tensor& p : parts) {
        const std::size_t n = p.numel();
        if (p.requires_grad()) {
          auto gp = p.mutable_grad();
          for (std::size_t i = 0; i < n; ++i) gp[i] += g[offset + i];
        }
        offset += n;
      }
    });
  }
  return result;
}

namespace {

// Row-wise log-softmax values; used by both softmax variants.
std::vector<double> log_softmax_values(const Tensor& x) {
  const std::size_t n = x.dim(0), c = x.dim(1);
  auto dx = x.data();
  std::vector<double> out(n * c);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = &dx[r * c];
    double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    double lz = mx + std::log(z);
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = row[j] - lz;
  }
  return out;
}

}  // namespace

Tensor softmax_rows(const Tensor& x) {
  require_rank(x, 2, "softmax_rows");
  std::vector<double> p = log_softmax_values(x);
  for (double& v : p) v = std::exp(v);
  const std::size_t n = x.dim(0), c = x.dim(1);
  bool record = should_record({&x});
  Tensor result = output(x.shape(), p, record);
  if (record) {
    Tape::active()->record(result, {x}, [x, p = std::move(p), n, c](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < n; ++r) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += g[r * c + j] * p[r * c + j];
        for (std::size_t j = 0; j < c; ++j) gx[r * c + j] += p[r * c + j] * (g[r * c + j] - dot);
      }
    });
  }
  return result;
}

Tensor log_softmax_rows(const Tensor& x) {
  require_rank(x, 2, "log_softmax_rows");
  std::vector<double> lp = log_softmax_values(x);
  const std::size_t n = x.dim(0), c = x.dim(1);
  bool record = should_record({&x});
  Tensor result = output(x.shape(), lp, record);
  if (record) {
    Tape::active()->record(result, {x}, [x, lp = std::move(lp), n, c](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < n; ++r) {
        double gsum = 0.0;
        for (std::size_t j = 0; j < c; ++j) gsum += g[r * c + j];
        for (std::size_t j = 0; j < c; ++j) gx[r * c + j] += g[r * c + j] - std::exp(lp[r * c + j]) * gsum;
      }
    });
  }
  return result;
}

Tensor pick(const Tensor& x, std::span<const std::size_t> cols) {
  require_rank(x, 2, "pick");
  const std::size_t n = x.dim(0), c = x.dim(1);
  if (cols.size() != n) {
    throw std::invalid_argument("pick: " + std::to_string(cols.size()) + " indices for " + shape_str(x.shape()));
  }
  auto dx = x.data();
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (cols[r] >= c) throw std::out_of_range("pick: column " + std::to_string(cols[r]) + " out of range");
    out[r] = dx[r * c + cols[r]];
  }
  bool record = should_record({&x});
  Tensor result = output({n}, std::move(out), record);
  if (record) {
    std::vector<std::size_t> idx(cols.begin(), cols.end());
    Tape::active()->record(result, {x}, [x, idx = std::move(idx), c](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < idx.size(); ++r) gx[r * c + idx[r]] += g[r];
    });
  }
  return result;
}

Tensor weighted_mean_rows(const Tensor& weights, const Tensor& x) {
  require_rank(weights, 2, "weighted_mean_rows");
  require_rank(x, 2, "weighted_mean_rows");
  const std::size_t r_n = weights.dim(0), k = weights.dim(1), d = x.dim(1);
  if (x.dim(0) != r_n) {
    throw std::invalid_argument("weighted_mean_rows: weights " + shape_str(weights.shape()) + " vs points " +
                                shape_str(x.shape()));
  }
  auto dw = weights.data();
  auto dx = x.data();
  std::vector<double> mass(k, 0.0);
  std::vector<double> num(k * d, 0.0);
  for (std::size_t r = 0; r < r_n; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      const double w = dw[r * k + i];
      mass[i] += w;
      for (std::size_t j = 0; j < d; ++j) num[i * d + j] += w * dx[r * d + j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(mass[i] > 0.0)) {
      throw std::invalid_argument("weighted_mean_rows: column " + std::to_string(i) + " has no mass");
    }
  }
  std::vector<double> out(k * d);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = num[i * d + j] / mass[i];

  bool record = should_record({&weights, &x});
  Tensor result = output({k, d}, out, record);
  if (record) {
    Tape::active()->record(
        result, {weights, x},
        [weights, x, mass = std::move(mass), mean = std::move(out), r_n, k, d](std::span<const double> g) {
          auto dw = weights.data();
          auto dx = x.data();
          if (x.requires_grad()) {
            auto gx = x.mutable_grad();
            for (std::size_t r = 0; r < r_n; ++r)
              for (std::size_t i = 0; i < k; ++i) {
                const double s = dw[r * k + i] / mass[i];
                if (s == 0.0) continue;
                for (std::size_t j = 0; j < d; ++j) gx[r * d + j] += s * g[i * d + j];
              }
          }
          if (weights.requires_grad()) {
            // d out_ij / d w_ri = (x_rj - out_ij) / mass_i
            auto gw = weights.mutable_grad();
            for (std::size_t r = 0; r < r_n; ++r)
              for (std::size_t i = 0; i < k; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += g[i * d + j] * (dx[r * d + j] - mean[i * d + j]);
                gw[r * k + i] += acc / mass[i];
              }
          }
        });
  }
  return result;
}

}  // namespace sala::ad
