#pragma once

// Parameterized building blocks: linear maps, layer norm, multi-head
// attention and pre-norm transformer layers.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ecue/nn/ops.hpp"
#include "ecue/nn/random.hpp"
#include "ecue/nn/tensor.hpp"

namespace ecue::nn {

// Per-forward settings. `rng` may be null when dropout is off.
struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;

  Tensor maybe_dropout(const Tensor& x) const {
    if (!training || dropout <= 0.0 || !rng) return x;
    return nn::dropout(x, dropout, *rng);
  }
};

inline Tensor uniform_param(Shape shape, double bound, Rng& rng) {
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return Tensor::from(std::move(shape), std::move(v), true);
}

inline Tensor constant_param(Shape shape, double value) {
  const auto n = shape_size(shape);
  return Tensor::from(std::move(shape), std::vector<double>(n, value), true);
}

struct Linear {
  Tensor weight;  // d_in x d_out
  Tensor bias;    // d_out, undefined when the map has no bias

  static Linear init(std::size_t d_in, std::size_t d_out, Rng& rng,
                     bool with_bias = true) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
    Linear l;
    l.weight = uniform_param({d_in, d_out}, bound, rng);
    if (with_bias) l.bias = uniform_param({d_out}, bound, rng);
    return l;
  }

  std::size_t in_dim() const { return weight.rows(); }
  std::size_t out_dim() const { return weight.cols(); }

  Tensor operator()(const Tensor& x) const {
    require(x.cols() == in_dim(), "linear: input width " +
                                      std::to_string(x.cols()) + " != " +
                                      std::to_string(in_dim()));
    auto y = matmul(x, weight);
    return bias.defined() ? add_row_broadcast(y, bias) : y;
  }

  void collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".weight", weight});
    if (bias.defined()) out.push_back({prefix + ".bias", bias});
  }
};

// xW + b, free-function form.
inline Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return add_row_broadcast(matmul(x, w), b);
}

struct LayerNorm {
  Tensor gamma;
  Tensor beta;
  double eps = 1e-5;

  static LayerNorm init(std::size_t d) {
    return {constant_param({d}, 1.0), constant_param({d}, 0.0), 1e-5};
  }
  Tensor operator()(const Tensor& x) const { return layer_norm(x, gamma, beta, eps); }
  void collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".gamma", gamma});
    out.push_back({prefix + ".beta", beta});
  }
};

// Head h owns columns [h*d/heads, (h+1)*d/heads) of each projection. The key
// projection has no bias: a key bias shifts every score of a query by the
// same amount and so never reaches the output.
struct MultiHeadAttention {
  Linear query, key, value, output;
  std::size_t heads = 1;

  static MultiHeadAttention init(std::size_t d, std::size_t heads, Rng& rng) {
    require(heads > 0 && d % heads == 0,
            "attention: model dim must be divisible by head count");
    MultiHeadAttention m;
    m.query = Linear::init(d, d, rng);
    m.key = Linear::init(d, d, rng, /*with_bias=*/false);
    m.value = Linear::init(d, d, rng);
    m.output = Linear::init(d, d, rng);
    m.heads = heads;
    return m;
  }

  std::size_t model_dim() const { return query.in_dim(); }

  Tensor operator()(const Tensor& q_in, const Tensor& kv_in) const {
    require(q_in.cols() == model_dim() && kv_in.cols() == model_dim(),
            "attention: input width does not match model dim");
    auto ctx = multi_head_attention_core(query(q_in), key(kv_in), value(kv_in), heads);
    return output(ctx);
  }

  void collect(const std::string& prefix, ParamList& out) const {
    query.collect(prefix + ".query", out);
    key.collect(prefix + ".key", out);
    value.collect(prefix + ".value", out);
    output.collect(prefix + ".output", out);
  }
};

// Free-function form over an explicit parameter set.
inline Tensor multi_head_attention(const Tensor& q, const Tensor& k,
                                   const Tensor& v, const MultiHeadAttention& p) {
  return p.output(multi_head_attention_core(p.query(q), p.key(k), p.value(v), p.heads));
}

// Pre-norm layer: x + Attn(LN(x)), then + FFN(LN(.)) with a GELU FFN of
// width 4 * d.
struct TransformerLayer {
  LayerNorm norm1;
  MultiHeadAttention attention;
  LayerNorm norm2;
  Linear ff_in, ff_out;

  static TransformerLayer init(std::size_t d, std::size_t heads, Rng& rng) {
    TransformerLayer t;
    t.norm1 = LayerNorm::init(d);
    t.attention = MultiHeadAttention::init(d, heads, rng);
    t.norm2 = LayerNorm::init(d);
    t.ff_in = Linear::init(d, 4 * d, rng);
    t.ff_out = Linear::init(4 * d, d, rng);
    return t;
  }

  std::size_t model_dim() const { return attention.model_dim(); }

  Tensor operator()(const Tensor& x, const ForwardContext& ctx = {}) const {
    auto h = norm1(x);
    auto y = add(x, ctx.maybe_dropout(attention(h, h)));
    auto f = ff_out(gelu(ff_in(norm2(y))));
    return add(y, ctx.maybe_dropout(f));
  }

  void collect(const std::string& prefix, ParamList& out) const {
    norm1.collect(prefix + ".norm1", out);
    attention.collect(prefix + ".attn", out);
    norm2.collect(prefix + ".norm2", out);
    ff_in.collect(prefix + ".ff_in", out);
    ff_out.collect(prefix + ".ff_out", out);
  }
};

inline Tensor transformer_layer(const Tensor& x, const TransformerLayer& p,
                                const ForwardContext& ctx = {}) {
  return p(x, ctx);
}

// Linear maps with GELU between consecutive layers (none after the last).
struct Mlp {
  std::vector<Linear> layers;

  static Mlp init(std::size_t d_in, std::size_t d_out, std::size_t depth, Rng& rng) {
    require(depth >= 1, "mlp: depth must be >= 1");
    Mlp m;
    for (std::size_t i = 0; i < depth; ++i)
      m.layers.push_back(Linear::init(i == 0 ? d_in : d_out, d_out, rng));
    return m;
  }

  Tensor operator()(const Tensor& x) const {
    Tensor h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      h = layers[i](h);
      if (i + 1 < layers.size()) h = gelu(h);
    }
    return h;
  }

  void collect(const std::string& prefix, ParamList& out) const {
    for (std::size_t i = 0; i < layers.size(); ++i)
      layers[i].collect(prefix + "." + std::to_string(i), out);
  }
};

// Sets every value of every listed parameter.
inline void fill(ParamList& params, double value) {
  for (auto& p : params)
    for (auto& v : p.tensor.data()) v = value;
}

}  // namespace ecue::nn
