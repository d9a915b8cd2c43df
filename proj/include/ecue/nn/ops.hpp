#pragma once

// Differentiable operations on Tensor. Each op computes its forward value
// eagerly and records a closure that accumulates input gradients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "ecue/nn/random.hpp"
#include "ecue/nn/tensor.hpp"

namespace ecue::nn {

namespace detail {

inline void check_same_size(const Tensor& a, const Tensor& b, const char* op) {
  require(a.size() == b.size(), std::string(op) + ": size mismatch " +
                                    shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
}

}  // namespace detail

// a: n x k, b: k x m
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  require(b.rows() == k, "matmul: inner dimensions differ " +
                             shape_str(a.shape()) + " x " +
                             shape_str(b.shape()));
  std::vector<double> out(n * m, 0.0);
  const double* A = a.data().data();
  const double* B = b.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = B + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return Tensor::make_result(
      {n, m}, std::move(out), {a, b}, [a, b, n, k, m](const detail::Node& o) {
        const double* G = o.grad.data();
        const double* A = a.data().data();
        const double* B = b.data().data();
        if (double* dA = a.grad_sink()) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              const double* g = G + i * m;
              const double* brow = B + p * m;
              double s = 0.0;
              for (std::size_t j = 0; j < m; ++j) s += g[j] * brow[j];
              dA[i * k + p] += s;
            }
        }
        if (double* dB = b.grad_sink()) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = A[i * k + p];
              if (aip == 0.0) continue;
              const double* g = G + i * m;
              double* drow = dB + p * m;
              for (std::size_t j = 0; j < m; ++j) drow[j] += aip * g[j];
            }
        }
      });
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::check_same_size(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b},
                             [a, b](const detail::Node& o) {
                               for (const Tensor* t : {&a, &b})
                                 if (double* d = t->grad_sink())
                                   for (std::size_t i = 0; i < o.grad.size(); ++i)
                                     d[i] += o.grad[i];
                             });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  detail::check_same_size(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b},
                             [a, b](const detail::Node& o) {
                               if (double* d = a.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[i] += o.grad[i];
                               if (double* d = b.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[i] -= o.grad[i];
                             });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  detail::check_same_size(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b},
                             [a, b](const detail::Node& o) {
                               if (double* d = a.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[i] += o.grad[i] * b.data()[i];
                               if (double* d = b.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[i] += o.grad[i] * a.data()[i];
                             });
}

inline Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * s;
  return Tensor::make_result(a.shape(), std::move(out), {a},
                             [a, s](const detail::Node& o) {
                               if (double* d = a.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[i] += o.grad[i] * s;
                             });
}

// x: n x m, bias: m values; adds bias to every row.
inline Tensor add_row_broadcast(const Tensor& x, const Tensor& bias) {
  const std::size_t n = x.rows(), m = x.cols();
  require(bias.size() == m, "add_row_broadcast: bias size " +
                                std::to_string(bias.size()) + " != " +
                                std::to_string(m));
  std::vector<double> out(x.data().begin(), x.data().end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] += bias.data()[j];
  return Tensor::make_result(x.shape(), std::move(out), {x, bias},
                             [x, bias, n, m](const detail::Node& o) {
                               if (double* d = x.grad_sink())
                                 for (std::size_t i = 0; i < n * m; ++i)
                                   d[i] += o.grad[i];
                               if (double* d = bias.grad_sink())
                                 for (std::size_t i = 0; i < n; ++i)
                                   for (std::size_t j = 0; j < m; ++j)
                                     d[j] += o.grad[i * m + j];
                             });
}

// Exact (erf) GELU.
inline Tensor gelu(const Tensor& x) {
  std::vector<double> out(x.size());
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = x.data()[i];
    out[i] = 0.5 * v * (1.0 + std::erf(v * inv_sqrt2));
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {x}, [x, inv_sqrt2](const detail::Node& o) {
        double* d = x.grad_sink();
        const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < o.grad.size(); ++i) {
          const double v = x.data()[i];
          const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
          const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
          d[i] += o.grad[i] * (cdf + v * pdf);
        }
      });
}

// Per-row normalization over the feature axis with affine gain and bias.
inline Tensor layer_norm(const Tensor& x, const Tensor& gamma,
                         const Tensor& beta, double eps = 1e-5) {
  const std::size_t n = x.rows(), m = x.cols();
  require(gamma.size() == m && beta.size() == m,
          "layer_norm: gain/bias size must equal the feature dimension");
  std::vector<double> xhat(n * m), inv_std(n), out(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.data().data() + i * m;
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += row[j];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t j = 0; j < m; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(m);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < m; ++j) {
      xhat[i * m + j] = (row[j] - mean) * inv_std[i];
      out[i * m + j] = xhat[i * m + j] * gamma.data()[j] + beta.data()[j];
    }
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {x, gamma, beta},
      [x, gamma, beta, n, m, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](const detail::Node& o) {
        const double* G = o.grad.data();
        if (double* dg = gamma.grad_sink())
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) dg[j] += G[i * m + j] * xhat[i * m + j];
        if (double* db = beta.grad_sink())
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) db[j] += G[i * m + j];
        if (double* dx = x.grad_sink()) {
          std::vector<double> dxhat(m);
          for (std::size_t i = 0; i < n; ++i) {
            double mean_d = 0.0, mean_dx = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
              dxhat[j] = G[i * m + j] * gamma.data()[j];
              mean_d += dxhat[j];
              mean_dx += dxhat[j] * xhat[i * m + j];
            }
            mean_d /= static_cast<double>(m);
            mean_dx /= static_cast<double>(m);
            for (std::size_t j = 0; j < m; ++j)
              dx[i * m + j] +=
                  inv_std[i] * (dxhat[j] - mean_d - xhat[i * m + j] * mean_dx);
          }
        }
      });
}

inline Tensor softmax_rows(const Tensor& x) {
  const std::size_t n = x.rows(), m = x.cols();
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.data().data() + i * m;
    const double mx = *std::max_element(row, row + m);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += out[i * m + j] = std::exp(row[j] - mx);
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] /= s;
  }
  auto probs = out;
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [x, n, m, probs = std::move(probs)](const detail::Node& o) {
        double* d = x.grad_sink();
        for (std::size_t i = 0; i < n; ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < m; ++j) dot += o.grad[i * m + j] * probs[i * m + j];
          for (std::size_t j = 0; j < m; ++j)
            d[i * m + j] += probs[i * m + j] * (o.grad[i * m + j] - dot);
        }
      });
}

// Stacks matrices with equal column counts along the row axis.
inline Tensor concat_rows(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::size_t m = parts.front().cols();
  std::size_t n = 0;
  for (const auto& p : parts) {
    require(p.cols() == m, "concat_rows: column counts differ");
    n += p.rows();
  }
  std::vector<double> out;
  out.reserve(n * m);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return Tensor::make_result({n, m}, std::move(out), parts,
                             [parts](const detail::Node& o) {
                               std::size_t off = 0;
                               for (const auto& p : parts) {
                                 if (double* d = p.grad_sink())
                                   for (std::size_t i = 0; i < p.size(); ++i)
                                     d[i] += o.grad[off + i];
                                 off += p.size();
                               }
                             });
}

// Joins two matrices with equal row counts along the column axis.
inline Tensor concat_cols(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.rows(), ma = a.cols(), mb = b.cols();
  require(b.rows() == n, "concat_cols: row counts differ");
  const std::size_t m = ma + mb;
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(a.data().data() + i * ma, ma, out.data() + i * m);
    std::copy_n(b.data().data() + i * mb, mb, out.data() + i * m + ma);
  }
  return Tensor::make_result({n, m}, std::move(out), {a, b},
                             [a, b, n, ma, mb, m](const detail::Node& o) {
                               if (double* d = a.grad_sink())
                                 for (std::size_t i = 0; i < n; ++i)
                                   for (std::size_t j = 0; j < ma; ++j)
                                     d[i * ma + j] += o.grad[i * m + j];
                               if (double* d = b.grad_sink())
                                 for (std::size_t i = 0; i < n; ++i)
                                   for (std::size_t j = 0; j < mb; ++j)
                                     d[i * mb + j] += o.grad[i * m + ma + j];
                             });
}

// Rows [begin, end).
inline Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require(begin < end && end <= x.rows(), "slice_rows: range out of bounds");
  const std::size_t m = x.cols();
  std::vector<double> out(x.data().begin() + static_cast<std::ptrdiff_t>(begin * m),
                          x.data().begin() + static_cast<std::ptrdiff_t>(end * m));
  return Tensor::make_result({end - begin, m}, std::move(out), {x},
                             [x, begin, m](const detail::Node& o) {
                               double* d = x.grad_sink() + begin * m;
                               for (std::size_t i = 0; i < o.grad.size(); ++i)
                                 d[i] += o.grad[i];
                             });
}

// One output row per group: the mean of the listed input rows. Groups must
// be non-empty. Also serves as an embedding lookup (singleton groups).
inline Tensor pool_rows(const Tensor& x,
                        const std::vector<std::vector<std::size_t>>& groups) {
  require(!groups.empty(), "pool_rows: no groups");
  const std::size_t m = x.cols();
  std::vector<double> out(groups.size() * m, 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    require(!groups[g].empty(), "pool_rows: empty group");
    const double w = 1.0 / static_cast<double>(groups[g].size());
    for (auto r : groups[g]) {
      require(r < x.rows(), "pool_rows: row index out of range");
      const double* row = x.data().data() + r * m;
      for (std::size_t j = 0; j < m; ++j) out[g * m + j] += w * row[j];
    }
  }
  return Tensor::make_result({groups.size(), m}, std::move(out), {x},
                             [x, groups, m](const detail::Node& o) {
                               double* d = x.grad_sink();
                               for (std::size_t g = 0; g < groups.size(); ++g) {
                                 const double w = 1.0 / static_cast<double>(groups[g].size());
                                 for (auto r : groups[g])
                                   for (std::size_t j = 0; j < m; ++j)
                                     d[r * m + j] += w * o.grad[g * m + j];
                               }
                             });
}

inline Tensor gather_rows(const Tensor& table, const std::vector<std::size_t>& ids) {
  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(ids.size());
  for (auto id : ids) groups.push_back({id});
  return pool_rows(table, groups);
}

// Mean over rows [0, count) -> 1 x m.
inline Tensor mean_rows(const Tensor& x, std::size_t count) {
  require(count >= 1 && count <= x.rows(), "mean_rows: bad row count");
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return pool_rows(x, {idx});
}

inline Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return Tensor::make_result({1}, {s}, {x}, [x](const detail::Node& o) {
    double* d = x.grad_sink();
    for (std::size_t i = 0; i < x.size(); ++i) d[i] += o.grad[0];
  });
}

// x * w + b elementwise, with w and b single-value tensors.
inline Tensor axpb(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(w.size() == 1 && b.size() == 1, "axpb: w and b must be scalars");
  const double wv = w.item(), bv = b.item();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * wv + bv;
  return Tensor::make_result(x.shape(), std::move(out), {x, w, b},
                             [x, w, b, wv](const detail::Node& o) {
                               if (double* d = x.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[i] += o.grad[i] * wv;
                               if (double* d = w.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[0] += o.grad[i] * x.data()[i];
                               if (double* d = b.grad_sink())
                                 for (std::size_t i = 0; i < o.grad.size(); ++i)
                                   d[0] += o.grad[i];
                             });
}

// Row i of x multiplied by coeff[i].
inline Tensor scale_rows(const Tensor& x, const Tensor& coeff) {
  const std::size_t n = x.rows(), m = x.cols();
  require(coeff.size() == n, "scale_rows: one coefficient per row required");
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out[i * m + j] = x.data()[i * m + j] * coeff.data()[i];
  return Tensor::make_result(x.shape(), std::move(out), {x, coeff},
                             [x, coeff, n, m](const detail::Node& o) {
                               if (double* d = x.grad_sink())
                                 for (std::size_t i = 0; i < n; ++i)
                                   for (std::size_t j = 0; j < m; ++j)
                                     d[i * m + j] += o.grad[i * m + j] * coeff.data()[i];
                               if (double* d = coeff.grad_sink())
                                 for (std::size_t i = 0; i < n; ++i) {
                                   double s = 0.0;
                                   for (std::size_t j = 0; j < m; ++j)
                                     s += o.grad[i * m + j] * x.data()[i * m + j];
                                   d[i] += s;
                                 }
                             });
}

// Negative log-likelihood of `target` under softmax(logits).
inline Tensor cross_entropy(const Tensor& logits, std::size_t target) {
  const std::size_t c = logits.size();
  require(target < c, "cross_entropy: target class out of range");
  const double* z = logits.data().data();
  const double mx = *std::max_element(z, z + c);
  double s = 0.0;
  for (std::size_t j = 0; j < c; ++j) s += std::exp(z[j] - mx);
  const double lse = mx + std::log(s);
  std::vector<double> probs(c);
  for (std::size_t j = 0; j < c; ++j) probs[j] = std::exp(z[j] - lse);
  return Tensor::make_result({1}, {lse - z[target]}, {logits},
                             [logits, target, probs = std::move(probs)](const detail::Node& o) {
                               double* d = logits.grad_sink();
                               for (std::size_t j = 0; j < probs.size(); ++j)
                                 d[j] += o.grad[0] * (probs[j] - (j == target ? 1.0 : 0.0));
                             });
}

// Inverted dropout; identity when rate == 0.
inline Tensor dropout(const Tensor& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  require(rate < 1.0, "dropout: rate must be < 1");
  const double keep = 1.0 - rate;
  std::vector<double> mask(x.size()), out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
    out[i] = x.data()[i] * mask[i];
  }
  return Tensor::make_result(x.shape(), std::move(out), {x},
                             [x, mask = std::move(mask)](const detail::Node& o) {
                               double* d = x.grad_sink();
                               for (std::size_t i = 0; i < o.grad.size(); ++i)
                                 d[i] += o.grad[i] * mask[i];
                             });
}

namespace detail {

// probs[h][i][j] for queries i and keys j.
inline std::vector<double> attention_probs(const double* Q, const double* K,
                                           std::size_t nq, std::size_t nk,
                                           std::size_t d, std::size_t heads) {
  const std::size_t dh = d / heads;
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> probs(heads * nq * nk);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t c0 = h * dh;
    for (std::size_t i = 0; i < nq; ++i) {
      double* p = probs.data() + (h * nq + i) * nk;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nk; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dh; ++c) s += Q[i * d + c0 + c] * K[j * d + c0 + c];
        p[j] = s * inv;
        mx = std::max(mx, p[j]);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < nk; ++j) z += p[j] = std::exp(p[j] - mx);
      for (std::size_t j = 0; j < nk; ++j) p[j] /= z;
    }
  }
  return probs;
}

}  // namespace detail

// Attention weights per head, heads x n_q x n_k, flattened. No gradient.
inline std::vector<double> attention_weights(const Tensor& q, const Tensor& k,
                                             std::size_t heads) {
  require(q.cols() == k.cols() && heads > 0 && q.cols() % heads == 0,
          "attention_weights: bad shapes");
  return detail::attention_probs(q.data().data(), k.data().data(), q.rows(),
                                 k.rows(), q.cols(), heads);
}

// Scaled dot-product attention over `heads` column blocks of width d/heads.
// q: n_q x d, k and v: n_k x d. Output n_q x d with heads concatenated.
inline Tensor multi_head_attention_core(const Tensor& q, const Tensor& k,
                                        const Tensor& v, std::size_t heads) {
  const std::size_t nq = q.rows(), nk = k.rows(), d = q.cols();
  require(heads > 0 && d % heads == 0,
          "attention: model dim must be divisible by head count");
  require(k.cols() == d && v.cols() == d && v.rows() == nk,
          "attention: query/key/value shapes disagree");
  const std::size_t dh = d / heads;
  auto probs = detail::attention_probs(q.data().data(), k.data().data(), nq, nk, d, heads);
  std::vector<double> out(nq * d, 0.0);
  const double* V = v.data().data();
  for (std::size_t h = 0; h < heads; ++h)
    for (std::size_t i = 0; i < nq; ++i) {
      const double* p = probs.data() + (h * nq + i) * nk;
      double* orow = out.data() + i * d + h * dh;
      for (std::size_t j = 0; j < nk; ++j) {
        const double* vrow = V + j * d + h * dh;
        for (std::size_t c = 0; c < dh; ++c) orow[c] += p[j] * vrow[c];
      }
    }
  return Tensor::make_result(
      {nq, d}, std::move(out), {q, k, v},
      [q, k, v, nq, nk, d, dh, heads, probs = std::move(probs)](const detail::Node& o) {
        const double* G = o.grad.data();
        const double* Q = q.data().data();
        const double* K = k.data().data();
        const double* V = v.data().data();
        double* dQ = q.grad_sink();
        double* dK = k.grad_sink();
        double* dV = v.grad_sink();
        const double inv = 1.0 / std::sqrt(static_cast<double>(dh));
        std::vector<double> ds(nk);
        for (std::size_t h = 0; h < heads; ++h) {
          const std::size_t c0 = h * dh;
          for (std::size_t i = 0; i < nq; ++i) {
            const double* p = probs.data() + (h * nq + i) * nk;
            const double* g = G + i * d + c0;
            if (dV)
              for (std::size_t j = 0; j < nk; ++j)
                for (std::size_t c = 0; c < dh; ++c) dV[j * d + c0 + c] += p[j] * g[c];
            if (!dQ && !dK) continue;
            double dot = 0.0;
            for (std::size_t j = 0; j < nk; ++j) {
              double dp = 0.0;
              for (std::size_t c = 0; c < dh; ++c) dp += g[c] * V[j * d + c0 + c];
              ds[j] = dp;
              dot += dp * p[j];
            }
            for (std::size_t j = 0; j < nk; ++j) {
              const double s = p[j] * (ds[j] - dot) * inv;
              if (s == 0.0) continue;
              if (dQ)
                for (std::size_t c = 0; c < dh; ++c) dQ[i * d + c0 + c] += s * K[j * d + c0 + c];
              if (dK)
                for (std::size_t c = 0; c < dh; ++c) dK[j * d + c0 + c] += s * Q[i * d + c0 + c];
            }
          }
        }
      });
}

// Constant sinusoidal position table, n x d.
inline Tensor sinusoidal_positions(std::size_t n, std::size_t d) {
  std::vector<double> pe(n * d);
  for (std::size_t pos = 0; pos < n; ++pos)
    for (std::size_t i = 0; i < d; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      pe[pos * d + i] = (i % 2 == 0) ? std::sin(pos * rate) : std::cos(pos * rate);
    }
  return Tensor::matrix(n, d, std::move(pe));
}

inline Tensor add_positions(const Tensor& x) {
  return add(x, sinusoidal_positions(x.rows(), x.cols()));
}

}  // namespace ecue::nn
