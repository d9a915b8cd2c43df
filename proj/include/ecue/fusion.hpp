#pragma once

// Two-step multi-modal fusion.
//
// Step one: audio features attend to text features (audio = query, text =
// key/value) with a residual and layer norm, giving the fused text-audio
// stream F_ta.
//
// Step two: a stack of bridge blocks exchanges information between F_ta and
// the mel-spectrogram stream F_m. Inside a block, a learned bridge sequence
// is appended to one stream, run through that stream's transformer, and the
// resulting bridge positions are projected and appended to the other stream
// before its transformer:
//
//   (F^_m  + v^_br)  = Trans_v(F_m  ++ v_br)
//   F_{m->ta}        = Trans_l(F_ta ++ MLP_vl(v^_br))
//   (F^_ta + v^'_br) = Trans_l(F_ta ++ v'_br)
//   F_{ta->m}        = Trans_v(F_m  ++ MLP_lv(v^'_br))
//
// Non-bridge positions of both outputs feed the next block. The last block's
// outputs are mean-pooled (bridge positions excluded) into two linear heads
// whose logits are averaged.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ecue/nn/layers.hpp"

namespace ecue::fusion {

using nn::Tensor;

inline constexpr std::size_t kDefaultBridgeLength = 4;

struct InitialFusionParams {
  nn::MultiHeadAttention cross;
  nn::LayerNorm norm;

  static InitialFusionParams init(std::size_t d, std::size_t heads, nn::Rng& rng) {
    return {nn::MultiHeadAttention::init(d, heads, rng), nn::LayerNorm::init(d)};
  }
  void collect(const std::string& prefix, nn::ParamList& out) const {
    cross.collect(prefix + ".cross", out);
    norm.collect(prefix + ".norm", out);
  }
};

// LN(f_a + CrossAttn(Q = f_a, K = V = f_t)); output length = f_a.rows().
inline Tensor initial_fusion(const Tensor& f_t, const Tensor& f_a,
                             const InitialFusionParams& p) {
  require(f_t.rows() >= 1, "initial_fusion: empty text sequence");
  require(f_t.cols() == f_a.cols(), "initial_fusion: text and audio widths differ");
  return p.norm(nn::add(f_a, p.cross(f_a, f_t)));
}

struct MfmBlock {
  nn::TransformerLayer trans_l;  // fused text-audio side
  nn::TransformerLayer trans_v;  // spectral side
  nn::Mlp mlp_v_to_l;
  nn::Mlp mlp_l_to_v;
  Tensor bridge_v;  // v_br: appended to F_m, L_br x d_v
  Tensor bridge_l;  // v'_br: appended to F_ta, L_br x d_l

  static MfmBlock init(std::size_t d_l, std::size_t d_v, std::size_t heads,
                       std::size_t bridge_len, std::size_t mlp_depth, nn::Rng& rng) {
    require(bridge_len >= 1, "bridge length must be >= 1");
    MfmBlock b;
    b.trans_l = nn::TransformerLayer::init(d_l, heads, rng);
    b.trans_v = nn::TransformerLayer::init(d_v, heads, rng);
    b.mlp_v_to_l = nn::Mlp::init(d_v, d_l, mlp_depth, rng);
    b.mlp_l_to_v = nn::Mlp::init(d_l, d_v, mlp_depth, rng);
    b.bridge_v = nn::uniform_param({bridge_len, d_v}, 1.0 / std::sqrt(static_cast<double>(d_v)), rng);
    b.bridge_l = nn::uniform_param({bridge_len, d_l}, 1.0 / std::sqrt(static_cast<double>(d_l)), rng);
    return b;
  }

  std::size_t bridge_length() const { return bridge_v.rows(); }

  void collect(const std::string& prefix, nn::ParamList& out) const {
    trans_l.collect(prefix + ".trans_l", out);
    trans_v.collect(prefix + ".trans_v", out);
    mlp_v_to_l.collect(prefix + ".mlp_v_to_l", out);
    mlp_l_to_v.collect(prefix + ".mlp_l_to_v", out);
    out.push_back({prefix + ".bridge_v", bridge_v});
    out.push_back({prefix + ".bridge_l", bridge_l});
  }
};

// Full output sequences of one block; each holds its non-bridge positions
// first and L_br bridge positions last.
struct MfmBlockOutput {
  Tensor f_m_to_ta;  // Trans_l(F_ta ++ MLP(v^_br))
  Tensor f_ta_to_m;  // Trans_v(F_m ++ MLP(v^'_br))
  Tensor f_hat_m;    // Trans_v(F_m ++ v_br)
  Tensor f_hat_ta;   // Trans_l(F_ta ++ v'_br)
};

inline MfmBlockOutput mfm_block_forward(const Tensor& f_ta, const Tensor& f_m,
                                        const MfmBlock& block,
                                        const nn::ForwardContext& ctx = {}) {
  const std::size_t n_ta = f_ta.rows(), n_m = f_m.rows();
  const std::size_t lb = block.bridge_length();
  MfmBlockOutput out;
  out.f_hat_m = block.trans_v(nn::concat_rows({f_m, block.bridge_v}), ctx);
  const auto v_hat = nn::slice_rows(out.f_hat_m, n_m, n_m + lb);
  out.f_m_to_ta = block.trans_l(nn::concat_rows({f_ta, block.mlp_v_to_l(v_hat)}), ctx);

  out.f_hat_ta = block.trans_l(nn::concat_rows({f_ta, block.bridge_l}), ctx);
  const auto v_hat_prime = nn::slice_rows(out.f_hat_ta, n_ta, n_ta + lb);
  out.f_ta_to_m = block.trans_v(nn::concat_rows({f_m, block.mlp_l_to_v(v_hat_prime)}), ctx);
  return out;
}

struct FusedFeatures {
  Tensor f_ta;
  Tensor f_m_to_ta;  // last block, full sequence
  Tensor f_ta_to_m;
  Tensor f_hat_m;
  Tensor f_hat_ta;
  std::size_t ta_length = 0;  // non-bridge length of f_m_to_ta
  std::size_t m_length = 0;   // non-bridge length of f_ta_to_m
  std::vector<std::size_t> block_lengths_ta;  // concatenated lengths seen inside blocks
  std::vector<std::size_t> block_lengths_m;
};

inline FusedFeatures mfm_forward(const Tensor& f_ta, const Tensor& f_m,
                                 const std::vector<MfmBlock>& blocks,
                                 const nn::ForwardContext& ctx = {}) {
  require(!blocks.empty(), "mfm_forward: no blocks");
  FusedFeatures out;
  out.f_ta = f_ta;
  Tensor cur_ta = f_ta, cur_m = f_m;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto o = mfm_block_forward(cur_ta, cur_m, blocks[b], ctx);
    out.block_lengths_ta.push_back(o.f_m_to_ta.rows());
    out.block_lengths_m.push_back(o.f_ta_to_m.rows());
    const std::size_t n_ta = cur_ta.rows(), n_m = cur_m.rows();
    if (b + 1 == blocks.size()) {
      out.f_m_to_ta = o.f_m_to_ta;
      out.f_ta_to_m = o.f_ta_to_m;
      out.f_hat_m = o.f_hat_m;
      out.f_hat_ta = o.f_hat_ta;
      out.ta_length = n_ta;
      out.m_length = n_m;
    } else {
      cur_ta = nn::slice_rows(o.f_m_to_ta, 0, n_ta);
      cur_m = nn::slice_rows(o.f_ta_to_m, 0, n_m);
    }
  }
  return out;
}

struct Logits {
  Tensor head_a;
  Tensor head_b;
  Tensor averaged;
  bool dual = true;
};

struct ClassifierHeads {
  nn::Linear head_a;  // consumes F_{m->ta}
  nn::Linear head_b;  // consumes F_{ta->m}

  static ClassifierHeads init(std::size_t d_l, std::size_t d_v, std::size_t classes,
                              nn::Rng& rng) {
    return {nn::Linear::init(d_l, classes, rng), nn::Linear::init(d_v, classes, rng)};
  }
  void collect(const std::string& prefix, nn::ParamList& out) const {
    head_a.collect(prefix + ".head_a", out);
    head_b.collect(prefix + ".head_b", out);
  }
};

// Mean-pools the first `len_a` rows of `seq_a` and first `len_b` rows of
// `seq_b`, applies one head to each and averages the logits.
inline Logits classify(const Tensor& seq_a, std::size_t len_a, const Tensor& seq_b,
                       std::size_t len_b, const ClassifierHeads& heads) {
  Logits l;
  l.head_a = heads.head_a(nn::mean_rows(seq_a, len_a));
  l.head_b = heads.head_b(nn::mean_rows(seq_b, len_b));
  l.averaged = nn::scale(nn::add(l.head_a, l.head_b), 0.5);
  return l;
}

inline Logits classify(const FusedFeatures& f, const ClassifierHeads& heads) {
  return classify(f.f_m_to_ta, f.ta_length, f.f_ta_to_m, f.m_length, heads);
}

// Single-head path used when the bridge stage is disabled.
inline Logits classify_single(const Tensor& seq, std::size_t len, const nn::Linear& head) {
  Logits l;
  l.head_a = head(nn::mean_rows(seq, len));
  l.head_b = l.head_a;
  l.averaged = l.head_a;
  l.dual = false;
  return l;
}

}  // namespace ecue::fusion
