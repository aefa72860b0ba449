#ifndef ACCENTNET_TENSOR_NN_HPP
#define ACCENTNET_TENSOR_NN_HPP

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "accentnet/gemm.hpp"
#include "accentnet/tensor.hpp"

namespace accentnet {

// ---------------------------------------------------------------------------
// matmul: (m,k) x (k,n) -> (m,n). dA = dC B^T, dB = A^T dC.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  check_internal(sa.size() == 2 && sb.size() == 2, "matmul: operands must be rank 2");
  if (sa[1] != sb[0])
    internal_error("matmul: inner dimensions differ, " + shape_str(sa) + " x " + shape_str(sb));
  const std::size_t m = sa[0], k = sa[1], n = sb[1];
  std::vector<T> out(m * n);
  gemm(a.values().data(), b.values().data(), out.data(), m, k, n);
  return detail::make_op<T>(Shape{m, n}, std::move(out), {a, b}, [m, k, n](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      gemm_nt(self.grad.data(), pb.value.data(), pa.grad.data(), m, n, k, true);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      gemm_tn(pa.value.data(), self.grad.data(), pb.grad.data(), k, m, n, true);
    }
  });
}

// Multiply each (h,w) plane of x (N,C,H,W) by the matching scalar of w (N,C,1,1).
template <typename T>
Tensor<T> scale_channels(const Tensor<T>& x, const Tensor<T>& w) {
  const Shape& sx = x.shape();
  const Shape& sw = w.shape();
  check_internal(sx.size() == 4, "scale_channels: x must be (N,C,H,W)");
  check_internal(sw.size() == 4 && sw[2] == 1 && sw[3] == 1, "scale_channels: w must be (N,C,1,1)");
  if (sx[0] != sw[0] || sx[1] != sw[1])
    internal_error("scale_channels: batch/channel mismatch " + shape_str(sx) + " vs " +
                   shape_str(sw));
  const std::size_t nc = sx[0] * sx[1];
  const std::size_t hw = sx[2] * sx[3];
  std::vector<T> out(x.size());
  const auto& xv = x.values();
  const auto& wv = w.values();
  for (std::size_t p = 0; p < nc; ++p) {
    const T s = wv[p];
    const T* src = xv.data() + p * hw;
    T* dst = out.data() + p * hw;
    for (std::size_t i = 0; i < hw; ++i) dst[i] = src[i] * s;
  }
  return detail::make_op<T>(sx, std::move(out), {x, w}, [nc, hw](detail::Node<T>& self) {
    auto& px = *self.parents[0];
    auto& pw = *self.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      for (std::size_t p = 0; p < nc; ++p) {
        const T s = pw.value[p];
        for (std::size_t i = 0; i < hw; ++i) px.grad[p * hw + i] += self.grad[p * hw + i] * s;
      }
    }
    if (pw.requires_grad) {
      pw.ensure_grad();
      for (std::size_t p = 0; p < nc; ++p) {
        T acc = T(0);
        for (std::size_t i = 0; i < hw; ++i) acc += self.grad[p * hw + i] * px.value[p * hw + i];
        pw.grad[p] += acc;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// conv2d: grouped cross-correlation via im2col + gemm.
// Output dims use floor arithmetic: H' = floor((H + 2p - kh) / stride) + 1,
// matching the stem/pool transitions of the architecture tables.
// ---------------------------------------------------------------------------

namespace detail {

struct ConvDims {
  std::size_t n, c, h, w;        // input
  std::size_t f, kh, kw;         // filters
  std::size_t oh, ow;            // output
  std::size_t groups, cg, fg;    // channels / filters per group
  int stride, pad;
};

template <typename T>
inline ConvDims conv_dims(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad,
                          int groups) {
  const Shape& sx = x.shape();
  const Shape& sw = w.shape();
  check_internal(sx.size() == 4, "conv2d: input must be (N,C,H,W)");
  check_internal(sw.size() == 4, "conv2d: weight must be (F,C/groups,kh,kw)");
  check_internal(stride >= 1 && pad >= 0 && groups >= 1, "conv2d: bad stride/pad/groups");
  ConvDims d;
  d.n = sx[0]; d.c = sx[1]; d.h = sx[2]; d.w = sx[3];
  d.f = sw[0]; d.kh = sw[2]; d.kw = sw[3];
  d.groups = static_cast<std::size_t>(groups);
  if (d.c % d.groups != 0 || d.f % d.groups != 0)
    internal_error("conv2d: channels " + std::to_string(d.c) + " / filters " + std::to_string(d.f) +
                   " not divisible by groups " + std::to_string(d.groups));
  d.cg = d.c / d.groups;
  d.fg = d.f / d.groups;
  if (sw[1] != d.cg)
    internal_error("conv2d: weight expects " + std::to_string(sw[1]) +
                   " channels per group, input provides " + std::to_string(d.cg));
  const std::size_t ph = d.h + 2 * static_cast<std::size_t>(pad);
  const std::size_t pw = d.w + 2 * static_cast<std::size_t>(pad);
  if (ph < d.kh || pw < d.kw)
    internal_error("conv2d: kernel " + std::to_string(d.kh) + "x" + std::to_string(d.kw) +
                   " larger than padded input " + std::to_string(ph) + "x" + std::to_string(pw));
  d.oh = (ph - d.kh) / static_cast<std::size_t>(stride) + 1;
  d.ow = (pw - d.kw) / static_cast<std::size_t>(stride) + 1;
  d.stride = stride;
  d.pad = pad;
  return d;
}

// Gathers one group's receptive fields: out is (cg*kh*kw) x (oh*ow).
template <typename T>
void im2col(const T* x, const ConvDims& d, std::size_t group, T* cols) {
  const std::size_t ohw = d.oh * d.ow;
  for (std::size_t c = 0; c < d.cg; ++c) {
    const T* plane = x + (group * d.cg + c) * d.h * d.w;
    for (std::size_t ki = 0; ki < d.kh; ++ki) {
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        T* row = cols + ((c * d.kh + ki) * d.kw + kj) * ohw;
        for (std::size_t oi = 0; oi < d.oh; ++oi) {
          const long ii = static_cast<long>(oi) * d.stride + static_cast<long>(ki) - d.pad;
          if (ii < 0 || ii >= static_cast<long>(d.h)) {
            for (std::size_t oj = 0; oj < d.ow; ++oj) row[oi * d.ow + oj] = T(0);
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(ii) * d.w;
          for (std::size_t oj = 0; oj < d.ow; ++oj) {
            const long jj = static_cast<long>(oj) * d.stride + static_cast<long>(kj) - d.pad;
            row[oi * d.ow + oj] =
                (jj < 0 || jj >= static_cast<long>(d.w)) ? T(0) : src[static_cast<std::size_t>(jj)];
          }
        }
      }
    }
  }
}

// Scatter-adds columns back into the input gradient (transpose of im2col).
template <typename T>
void col2im_accum(const T* cols, const ConvDims& d, std::size_t group, T* gx) {
  const std::size_t ohw = d.oh * d.ow;
  for (std::size_t c = 0; c < d.cg; ++c) {
    T* plane = gx + (group * d.cg + c) * d.h * d.w;
    for (std::size_t ki = 0; ki < d.kh; ++ki) {
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        const T* row = cols + ((c * d.kh + ki) * d.kw + kj) * ohw;
        for (std::size_t oi = 0; oi < d.oh; ++oi) {
          const long ii = static_cast<long>(oi) * d.stride + static_cast<long>(ki) - d.pad;
          if (ii < 0 || ii >= static_cast<long>(d.h)) continue;
          T* dst = plane + static_cast<std::size_t>(ii) * d.w;
          for (std::size_t oj = 0; oj < d.ow; ++oj) {
            const long jj = static_cast<long>(oj) * d.stride + static_cast<long>(kj) - d.pad;
            if (jj < 0 || jj >= static_cast<long>(d.w)) continue;
            dst[static_cast<std::size_t>(jj)] += row[oi * d.ow + oj];
          }
        }
      }
    }
  }
}

}  // namespace detail

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias, int stride,
                 int padding, int groups) {
  const detail::ConvDims d = detail::conv_dims(x, w, stride, padding, groups);
  if (bias) {
    check_internal(bias->shape() == Shape{d.f}, "conv2d: bias must have shape (F)");
  }
  const std::size_t ohw = d.oh * d.ow;
  const std::size_t ckk = d.cg * d.kh * d.kw;
  std::vector<T> out(d.n * d.f * ohw);
  std::vector<T> cols(ckk * ohw);
  const auto& xv = x.values();
  const auto& wv = w.values();
  for (std::size_t n = 0; n < d.n; ++n) {
    const T* xs = xv.data() + n * d.c * d.h * d.w;
    for (std::size_t g = 0; g < d.groups; ++g) {
      detail::im2col(xs, d, g, cols.data());
      gemm(wv.data() + g * d.fg * ckk, cols.data(), out.data() + (n * d.f + g * d.fg) * ohw, d.fg,
           ckk, ohw);
    }
  }
  if (bias) {
    const auto& bv = bias->values();
    for (std::size_t n = 0; n < d.n; ++n)
      for (std::size_t f = 0; f < d.f; ++f) {
        T* row = out.data() + (n * d.f + f) * ohw;
        for (std::size_t i = 0; i < ohw; ++i) row[i] += bv[f];
      }
  }

  std::vector<Tensor<T>> parents = {x, w};
  if (bias) parents.push_back(*bias);
  const bool has_bias = bias != nullptr;
  return detail::make_op<T>(
      Shape{d.n, d.f, d.oh, d.ow}, std::move(out), std::move(parents),
      [d, ohw, ckk, has_bias](detail::Node<T>& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        std::vector<T> cols(ckk * ohw);
        std::vector<T> dcols(ckk * ohw);
        if (px.requires_grad) px.ensure_grad();
        if (pw.requires_grad) pw.ensure_grad();
        for (std::size_t n = 0; n < d.n; ++n) {
          const T* xs = px.value.data() + n * d.c * d.h * d.w;
          for (std::size_t g = 0; g < d.groups; ++g) {
            const T* gout = self.grad.data() + (n * d.f + g * d.fg) * ohw;
            if (pw.requires_grad) {
              detail::im2col(xs, d, g, cols.data());
              gemm_nt(gout, cols.data(), pw.grad.data() + g * d.fg * ckk, d.fg, ohw, ckk, true);
            }
            if (px.requires_grad) {
              gemm_tn(pw.value.data() + g * d.fg * ckk, gout, dcols.data(), ckk, d.fg, ohw);
              detail::col2im_accum(dcols.data(), d, g, px.grad.data() + n * d.c * d.h * d.w);
            }
          }
        }
        if (has_bias) {
          auto& pb = *self.parents[2];
          if (pb.requires_grad) {
            pb.ensure_grad();
            for (std::size_t n = 0; n < d.n; ++n)
              for (std::size_t f = 0; f < d.f; ++f) {
                const T* row = self.grad.data() + (n * d.f + f) * ohw;
                T acc = T(0);
                for (std::size_t i = 0; i < ohw; ++i) acc += row[i];
                pb.grad[f] += acc;
              }
          }
        }
      });
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding, int groups) {
  return conv2d(x, w, static_cast<const Tensor<T>*>(nullptr), stride, padding, groups);
}

// ---------------------------------------------------------------------------
// Batch normalization over (N,H,W) per channel.
// Train mode normalizes by batch statistics (biased variance) and advances the
// running stats with the unbiased estimate; eval mode normalizes by the
// running stats.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> batch_norm2d(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                       std::vector<T>& running_mean, std::vector<T>& running_var, bool training,
                       T momentum = T(0.1), T eps = T(1e-5)) {
  const Shape& s = x.shape();
  check_internal(s.size() == 4, "batch_norm2d: input must be (N,C,H,W)");
  const std::size_t n = s[0], c = s[1], h = s[2], w = s[3];
  if (gamma.size() != c || beta.size() != c || running_mean.size() != c || running_var.size() != c)
    internal_error("batch_norm2d: parameter length does not match " + std::to_string(c) +
                   " channels");
  const std::size_t m = n * h * w;
  if (training && m < 2) internal_error("batch_norm2d: train mode needs N*H*W >= 2");

  const auto& xv = x.values();
  const auto& gv = gamma.values();
  const auto& bv = beta.values();
  const std::size_t hw = h * w;

  auto mean_v = std::make_shared<std::vector<T>>(c);
  auto inv_std_v = std::make_shared<std::vector<T>>(c);
  if (training) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      T mu = T(0);
      for (std::size_t b = 0; b < n; ++b) {
        const T* plane = xv.data() + (b * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) mu += plane[i];
      }
      mu /= static_cast<T>(m);
      T var = T(0);
      for (std::size_t b = 0; b < n; ++b) {
        const T* plane = xv.data() + (b * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          const T dd = plane[i] - mu;
          var += dd * dd;
        }
      }
      var /= static_cast<T>(m);
      (*mean_v)[ch] = mu;
      (*inv_std_v)[ch] = T(1) / std::sqrt(var + eps);
      const T unbiased = var * static_cast<T>(m) / static_cast<T>(m - 1);
      running_mean[ch] = (T(1) - momentum) * running_mean[ch] + momentum * mu;
      running_var[ch] = (T(1) - momentum) * running_var[ch] + momentum * unbiased;
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      (*mean_v)[ch] = running_mean[ch];
      (*inv_std_v)[ch] = T(1) / std::sqrt(running_var[ch] + eps);
    }
  }

  std::vector<T> out(x.size());
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* src = xv.data() + (b * c + ch) * hw;
      T* dst = out.data() + (b * c + ch) * hw;
      const T mu = (*mean_v)[ch], is = (*inv_std_v)[ch], g = gv[ch], bb = bv[ch];
      for (std::size_t i = 0; i < hw; ++i) dst[i] = g * (src[i] - mu) * is + bb;
    }
  }

  return detail::make_op<T>(
      s, std::move(out), {x, gamma, beta},
      [n, c, hw, m, training, mean_v, inv_std_v](detail::Node<T>& self) {
        auto& px = *self.parents[0];
        auto& pg = *self.parents[1];
        auto& pb = *self.parents[2];
        if (px.requires_grad) px.ensure_grad();
        if (pg.requires_grad) pg.ensure_grad();
        if (pb.requires_grad) pb.ensure_grad();
        for (std::size_t ch = 0; ch < c; ++ch) {
          const T mu = (*mean_v)[ch], is = (*inv_std_v)[ch];
          const T g = pg.value[ch];
          T sum_dy = T(0), sum_dy_xhat = T(0);
          for (std::size_t b = 0; b < n; ++b) {
            const std::size_t base = (b * c + ch) * hw;
            for (std::size_t i = 0; i < hw; ++i) {
              const T dy = self.grad[base + i];
              const T xhat = (px.value[base + i] - mu) * is;
              sum_dy += dy;
              sum_dy_xhat += dy * xhat;
            }
          }
          if (pg.requires_grad) pg.grad[ch] += sum_dy_xhat;
          if (pb.requires_grad) pb.grad[ch] += sum_dy;
          if (px.requires_grad) {
            if (training) {
              const T inv_m = T(1) / static_cast<T>(m);
              for (std::size_t b = 0; b < n; ++b) {
                const std::size_t base = (b * c + ch) * hw;
                for (std::size_t i = 0; i < hw; ++i) {
                  const T dy = self.grad[base + i];
                  const T xhat = (px.value[base + i] - mu) * is;
                  px.grad[base + i] +=
                      g * is * (dy - inv_m * sum_dy - xhat * inv_m * sum_dy_xhat);
                }
              }
            } else {
              for (std::size_t b = 0; b < n; ++b) {
                const std::size_t base = (b * c + ch) * hw;
                for (std::size_t i = 0; i < hw; ++i)
                  px.grad[base + i] += self.grad[base + i] * g * is;
              }
            }
          }
        }
      });
}

// ---------------------------------------------------------------------------
// Pooling. Output dims use the same floor arithmetic as conv2d; avg-pool
// windows never include padding, max-pool may (padded cells never win).
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> avg_pool2d(const Tensor<T>& x, int size, int stride) {
  const Shape& s = x.shape();
  check_internal(s.size() == 4, "avg_pool2d: input must be (N,C,H,W)");
  check_internal(size >= 1 && stride >= 1, "avg_pool2d: bad window");
  const std::size_t n = s[0], c = s[1], h = s[2], w = s[3];
  const std::size_t k = static_cast<std::size_t>(size);
  if (k > h || k > w)
    internal_error("avg_pool2d: window " + std::to_string(k) + " larger than input " +
                   std::to_string(h) + "x" + std::to_string(w));
  const std::size_t oh = (h - k) / static_cast<std::size_t>(stride) + 1;
  const std::size_t ow = (w - k) / static_cast<std::size_t>(stride) + 1;
  std::vector<T> out(n * c * oh * ow);
  const auto& xv = x.values();
  const T inv = T(1) / static_cast<T>(k * k);
  for (std::size_t p = 0; p < n * c; ++p) {
    const T* plane = xv.data() + p * h * w;
    T* dst = out.data() + p * oh * ow;
    for (std::size_t oi = 0; oi < oh; ++oi)
      for (std::size_t oj = 0; oj < ow; ++oj) {
        T acc = T(0);
        for (std::size_t ki = 0; ki < k; ++ki)
          for (std::size_t kj = 0; kj < k; ++kj)
            acc += plane[(oi * stride + ki) * w + oj * stride + kj];
        dst[oi * ow + oj] = acc * inv;
      }
  }
  const std::size_t st = static_cast<std::size_t>(stride);
  return detail::make_op<T>(Shape{n, c, oh, ow}, std::move(out), {x},
                            [n, c, h, w, oh, ow, k, st, inv](detail::Node<T>& self) {
                              auto& p = *self.parents[0];
                              if (!p.requires_grad) return;
                              p.ensure_grad();
                              for (std::size_t pl = 0; pl < n * c; ++pl) {
                                T* gplane = p.grad.data() + pl * h * w;
                                const T* gout = self.grad.data() + pl * oh * ow;
                                for (std::size_t oi = 0; oi < oh; ++oi)
                                  for (std::size_t oj = 0; oj < ow; ++oj) {
                                    const T g = gout[oi * ow + oj] * inv;
                                    for (std::size_t ki = 0; ki < k; ++ki)
                                      for (std::size_t kj = 0; kj < k; ++kj)
                                        gplane[(oi * st + ki) * w + oj * st + kj] += g;
                                  }
                              }
                            });
}

template <typename T>
Tensor<T> max_pool2d(const Tensor<T>& x, int size, int stride, int padding = 0) {
  const Shape& s = x.shape();
  check_internal(s.size() == 4, "max_pool2d: input must be (N,C,H,W)");
  check_internal(size >= 1 && stride >= 1 && padding >= 0, "max_pool2d: bad window");
  const std::size_t n = s[0], c = s[1], h = s[2], w = s[3];
  const std::size_t k = static_cast<std::size_t>(size);
  const std::size_t ph = h + 2 * static_cast<std::size_t>(padding);
  const std::size_t pw = w + 2 * static_cast<std::size_t>(padding);
  if (k > ph || k > pw)
    internal_error("max_pool2d: window " + std::to_string(k) + " larger than padded input " +
                   std::to_string(ph) + "x" + std::to_string(pw));
  const std::size_t oh = (ph - k) / static_cast<std::size_t>(stride) + 1;
  const std::size_t ow = (pw - k) / static_cast<std::size_t>(stride) + 1;
  std::vector<T> out(n * c * oh * ow);
  // Saved argmax positions (row-major first-wins) route the backward pass.
  auto argmax = std::make_shared<std::vector<std::size_t>>(n * c * oh * ow);
  const auto& xv = x.values();
  for (std::size_t p = 0; p < n * c; ++p) {
    const T* plane = xv.data() + p * h * w;
    for (std::size_t oi = 0; oi < oh; ++oi)
      for (std::size_t oj = 0; oj < ow; ++oj) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t best_ix = 0;
        for (std::size_t ki = 0; ki < k; ++ki) {
          const long ii = static_cast<long>(oi * stride + ki) - padding;
          if (ii < 0 || ii >= static_cast<long>(h)) continue;
          for (std::size_t kj = 0; kj < k; ++kj) {
            const long jj = static_cast<long>(oj * stride + kj) - padding;
            if (jj < 0 || jj >= static_cast<long>(w)) continue;
            const T v = plane[static_cast<std::size_t>(ii) * w + static_cast<std::size_t>(jj)];
            if (v > best) {
              best = v;
              best_ix = static_cast<std::size_t>(ii) * w + static_cast<std::size_t>(jj);
            }
          }
        }
        out[p * oh * ow + oi * ow + oj] = best;
        (*argmax)[p * oh * ow + oi * ow + oj] = best_ix;
      }
  }
  return detail::make_op<T>(Shape{n, c, oh, ow}, std::move(out), {x},
                            [n, c, h, w, oh, ow, argmax](detail::Node<T>& self) {
                              auto& p = *self.parents[0];
                              if (!p.requires_grad) return;
                              p.ensure_grad();
                              for (std::size_t pl = 0; pl < n * c; ++pl) {
                                const T* gout = self.grad.data() + pl * oh * ow;
                                T* gplane = p.grad.data() + pl * h * w;
                                for (std::size_t i = 0; i < oh * ow; ++i)
                                  gplane[(*argmax)[pl * oh * ow + i]] += gout[i];
                              }
                            });
}

template <typename T>
Tensor<T> global_avg_pool2d(const Tensor<T>& x) {
  const Shape& s = x.shape();
  check_internal(s.size() == 4, "global_avg_pool2d: input must be (N,C,H,W)");
  const std::size_t nc = s[0] * s[1];
  const std::size_t hw = s[2] * s[3];
  std::vector<T> out(nc);
  const auto& xv = x.values();
  const T inv = T(1) / static_cast<T>(hw);
  for (std::size_t p = 0; p < nc; ++p) {
    T acc = T(0);
    const T* plane = xv.data() + p * hw;
    for (std::size_t i = 0; i < hw; ++i) acc += plane[i];
    out[p] = acc * inv;
  }
  return detail::make_op<T>(Shape{s[0], s[1], 1, 1}, std::move(out), {x},
                            [nc, hw, inv](detail::Node<T>& self) {
                              auto& p = *self.parents[0];
                              if (!p.requires_grad) return;
                              p.ensure_grad();
                              for (std::size_t pl = 0; pl < nc; ++pl) {
                                const T g = self.grad[pl] * inv;
                                T* gplane = p.grad.data() + pl * hw;
                                for (std::size_t i = 0; i < hw; ++i) gplane[i] += g;
                              }
                            });
}

}  // namespace accentnet

#endif
