// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>
#include <string>

#include "sala/autodiff/ops.hpp"
#include "sala/autodiff/tape.hpp"

namespace sala::ad {

namespace {

struct Nchw {
  std::size_t b, c, h, w;
};

Nchw nchw(const Tensor& x, const char* op) {
  if (x.rank() != 4) {
    throw std::invalid_argument(std::string(op) + ": expected NCHW input, got " + shape_str(x.shape()));
  }
  return {x.dim(0), x.dim(1), x.dim(2), x.dim(3)};
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  const Nchw s = nchw(x, "conv2d");
  if (weight.rank() != 4 || weight.dim(2) != 3 || weight.dim(3) != 3) {
    throw std::invalid_argument("conv2d: weight must be [Cout x Cin x 3 x 3], got " + shape_str(weight.shape()));
  }
  if (weight.dim(1) != s.c) {
    throw std::invalid_argument("conv2d: channel mismatch, input " + shape_str(x.shape()) + " vs weight " +
                                shape_str(weight.shape()));
  }
  const std::size_t cout = weight.dim(0);
  if (bias.numel() != cout) {
    throw std::invalid_argument("conv2d: bias " + shape_str(bias.shape()) + " for " + std::to_string(cout) +
                                " filters");
  }
  const std::size_t H = s.h, W = s.w, cin = s.c;
  auto dx = x.data();
  auto dw = weight.data();
  auto db = bias.data();
  std::vector<double> out(s.b * cout * H * W);

  for (std::size_t b = 0; b < s.b; ++b) {
    for (std::size_t o = 0; o < cout; ++o) {
      double* plane = &out[(b * cout + o) * H * W];
      std::fill(plane, plane + H * W, db[o]);
      for (std::size_t c = 0; c < cin; ++c) {
        const double* in = &dx[(b * cin + c) * H * W];
        const double* k = &dw[(o * cin + c) * 9];
        for (std::size_t ky = 0; ky < 3; ++ky) {
          for (std::size_t kx = 0; kx < 3; ++kx) {
            const double kv = k[ky * 3 + kx];
            // output (y, x) reads input (y + ky - 1, x + kx - 1)
            const std::size_t y0 = ky == 0 ? 1 : 0, y1 = ky == 2 ? H - 1 : H;
            const std::size_t x0 = kx == 0 ? 1 : 0, x1 = kx == 2 ? W - 1 : W;
            for (std::size_t y = y0; y < y1; ++y) {
              const std::size_t irow = (y + ky - 1) * W + kx - 1;  // wraps for kx == 0; xx >= 1 then
              double* orow = plane + y * W;
              for (std::size_t xx = x0; xx < x1; ++xx) orow[xx] += kv * in[irow + xx];
            }
          }
        }
      }
    }
  }

  bool record = should_record({&x, &weight, &bias});
  Tensor result = Tensor::from({s.b, cout, H, W}, std::move(out), record);
  if (record) {
    Tape::active()->record(result, {x, weight, bias}, [x, weight, bias, s, cout](std::span<const double> g) {
      const std::size_t H = s.h, W = s.w, cin = s.c;
      auto dx = x.data();
      auto dw = weight.data();
      const bool need_x = x.requires_grad(), need_w = weight.requires_grad();
      std::span<double> gx = need_x ? x.mutable_grad() : std::span<double>{};
      std::span<double> gw = need_w ? weight.mutable_grad() : std::span<double>{};
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (std::size_t b = 0; b < s.b; ++b)
          for (std::size_t o = 0; o < cout; ++o) {
            const double* gp = &g[(b * cout + o) * H * W];
            double acc = 0.0;
            for (std::size_t i = 0; i < H * W; ++i) acc += gp[i];
            gb[o] += acc;
          }
      }
      if (!need_x && !need_w) return;
      for (std::size_t b = 0; b < s.b; ++b) {
        for (std::size_t o = 0; o < cout; ++o) {
          const double* gp = &g[(b * cout + o) * H * W];
          for (std::size_t c = 0; c < cin; ++c) {
            const double* in = &dx[(b * cin + c) * H * W];
            const double* k = &dw[(o * cin + c) * 9];
            for (std::size_t ky = 0; ky < 3; ++ky) {
              for (std::size_t kx = 0; kx < 3; ++kx) {
                const std::size_t y0 = ky == 0 ? 1 : 0, y1 = ky == 2 ? H - 1 : H;
                const std::size_t x0 = kx == 0 ? 1 : 0, x1 = kx == 2 ? W - 1 : W;
                const double kv = k[ky * 3 + kx];
                double wacc = 0.0;
                for (std::size_t y = y0; y < y1; ++y) {
                  const std::size_t irow = (y + ky - 1) * W + kx - 1;
                  const double* grow = gp + y * W;
                  for (std::size_t xx = x0; xx < x1; ++xx) {
                    if (need_w) wacc += grow[xx] * in[irow + xx];
                    if (need_x) gx[(b * cin + c) * H * W + irow + xx] += kv * grow[xx];
                  }
                }
                if (need_w) gw[(o * cin + c) * 9 + ky * 3 + kx] += wacc;
              }
            }
          }
        }
      }
    });
  }
  return result;
}

Tensor batchnorm2d(const Tensor& x, const Tensor& gamma, const Tensor& beta, NormMode mode,
                   BatchNormState& state) {
  const Nchw s = nchw(x, "batchnorm2d");
  if (gamma.numel() != s.c || beta.numel() != s.c || state.running_mean.size() != s.c ||
      state.running_var.size() != s.c) {
    throw std::invalid_argument("batchnorm2d: parameter/state channel count does not match input " +
                                shape_str(x.shape()));
  }
  const std::size_t plane = s.h * s.w;
  const std::size_t m = s.b * plane;
  if (mode == NormMode::train && m < 2) {
    throw std::invalid_argument("batchnorm2d: train mode needs B*H*W >= 2, got " + std::to_string(m));
  }
  auto dx = x.data();
  auto dg = gamma.data();
  auto dbeta = beta.data();

  std::vector<double> mean(s.c), inv_std(s.c);
  for (std::size_t c = 0; c < s.c; ++c) {
    if (mode == NormMode::train) {
      double mu = 0.0;
      for (std::size_t b = 0; b < s.b; ++b) {
        const double* p = &dx[(b * s.c + c) * plane];
        for (std::size_t i = 0; i < plane; ++i) mu += p[i];
      }
      mu /= static_cast<double>(m);
      double var = 0.0;
      for (std::size_t b = 0; b < s.b; ++b) {
        const double* p = &dx[(b * s.c + c) * plane];
        for (std::size_t i = 0; i < plane; ++i) var += (p[i] - mu) * (p[i] - mu);
      }
      var /= static_cast<double>(m);
      mean[c] = mu;
      inv_std[c] = 1.0 / std::sqrt(var + state.eps);
      const double unbiased = var * static_cast<double>(m) / static_cast<double>(m - 1);
      state.running_mean[c] = state.momentum * state.running_mean[c] + (1.0 - state.momentum) * mu;
      state.running_var[c] = state.momentum * state.running_var[c] + (1.0 - state.momentum) * unbiased;
    } else {
      mean[c] = state.running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(state.running_var[c] + state.eps);
    }
  }

  std::vector<double> xhat(x.numel()), out(x.numel());
  for (std::size_t b = 0; b < s.b; ++b)
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t base = (b * s.c + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        xhat[base + i] = (dx[base + i] - mean[c]) * inv_std[c];
        out[base + i] = dg[c] * xhat[base + i] + dbeta[c];
      }
    }

  bool record = should_record({&x, &gamma, &beta});
  Tensor result = Tensor::from(x.shape(), std::move(out), record);
  if (record) {
    Tape::active()->record(
        result, {x, gamma, beta},
        [x, gamma, beta, s, m, mode, xhat = std::move(xhat), inv_std = std::move(inv_std)](
            std::span<const double> g) {
          const std::size_t plane = s.h * s.w;
          auto dg = gamma.data();
          std::vector<double> sum_g(s.c, 0.0), sum_gx(s.c, 0.0);
          for (std::size_t b = 0; b < s.b; ++b)
            for (std::size_t c = 0; c < s.c; ++c) {
              const std::size_t base = (b * s.c + c) * plane;
              for (std::size_t i = 0; i < plane; ++i) {
                sum_g[c] += g[base + i];
                sum_gx[c] += g[base + i] * xhat[base + i];
              }
            }
          if (gamma.requires_grad()) {
            auto gg = gamma.mutable_grad();
            for (std::size_t c = 0; c < s.c; ++c) gg[c] += sum_gx[c];
          }
          if (beta.requires_grad()) {
            auto gb = beta.mutable_grad();
            for (std::size_t c = 0; c < s.c; ++c) gb[c] += sum_g[c];
          }
          if (!x.requires_grad()) return;
          auto gx = x.mutable_grad();
          const double inv_m = 1.0 / static_cast<double>(m);
          for (std::size_t b = 0; b < s.b; ++b)
            for (std::size_t c = 0; c < s.c; ++c) {
              const std::size_t base = (b * s.c + c) * plane;
              const double k = dg[c] * inv_std[c];
              for (std::size_t i = 0; i < plane; ++i) {
                if (mode == NormMode::train) {
                  // full batch-statistics gradient
                  gx[base + i] += k * (g[base + i] - inv_m * sum_g[c] - inv_m * xhat[base + i] * sum_gx[c]);
                } else {
                  gx[base + i] += k * g[base + i];
                }
              }
            }
        });
  }
  return result;
}

Tensor maxpool2x2(const Tensor& x, PoolEdge edge) {
  const Nchw s = nchw(x, "maxpool2x2");
  if (edge == PoolEdge::strict && (s.h % 2 != 0 || s.w % 2 != 0)) {
    throw std::invalid_argument("maxpool2x2: odd spatial dims in " + shape_str(x.shape()));
  }
  const std::size_t oh = s.h / 2, ow = s.w / 2;
  if (oh == 0 || ow == 0) {
    throw std::invalid_argument("maxpool2x2: spatial dims too small in " + shape_str(x.shape()));
  }
  auto dx = x.data();
  std::vector<double> out(s.b * s.c * oh * ow);
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t bc = 0; bc < s.b * s.c; ++bc) {
    const std::size_t in_base = bc * s.h * s.w;
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t xx = 0; xx < ow; ++xx) {
        std::size_t best = in_base + (2 * y) * s.w + 2 * xx;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dxx = 0; dxx < 2; ++dxx) {
            const std::size_t idx = in_base + (2 * y + dy) * s.w + 2 * xx + dxx;
            if (dx[idx] > dx[best]) best = idx;
          }
        const std::size_t o = (bc * oh + y) * ow + xx;
        out[o] = dx[best];
        argmax[o] = best;
      }
  }
  bool record = should_record({&x});
  Tensor result = Tensor::from({s.b, s.c, oh, ow}, std::move(out), record);
  if (record) {
    Tape::active()->record(result, {x}, [x, argmax = std::move(argmax)](std::span<const double> g) {
      auto gx = x.mutable_grad();
      for (std::size_t o = 0; o < argmax.size(); ++o) gx[argmax[o]] += g[o];
    });
  }
  return result;
}

}  // namespace sala::ad
