#pragma once

// End-to-end emotion model: text encoder with importance scaling, audio
// encoder with prosody enhancement, two-step fusion and averaged heads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/audio/enhance.hpp"
#include "ecue/fusion.hpp"
#include "ecue/kwrt.hpp"
#include "ecue/nn/layers.hpp"
#include "ecue/tasks/config.hpp"
#include "ecue/tasks/features.hpp"

namespace ecue::tasks {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t n_classes = 0;
  std::size_t n_mels = 80;
  std::size_t model_dim = 64;
  std::size_t n_heads = 4;
  std::size_t text_layers = 2;
  std::size_t audio_layers = 2;
  std::size_t prosody_layers = 1;
  std::size_t mfm_blocks = 2;
  std::size_t bridge_len = 4;
  std::size_t mlp_depth = 1;
  Modality modality = Modality::TextSpeech;
  bool use_kwrt = true;
  bool use_pe = true;
  bool use_tmf = true;
  MelTokens mel_tokens = MelTokens::Frame;
  std::size_t patch_frames = 4;
  std::size_t patch_mels = 16;
  double dropout = 0.0;

  static ModelConfig from(const TrainConfig& c, std::size_t vocab_size, std::size_t n_classes) {
    ModelConfig m;
    m.vocab_size = vocab_size;
    m.n_classes = n_classes;
    m.model_dim = c.model_dim;
    m.n_heads = c.n_heads;
    m.text_layers = c.text_layers;
    m.audio_layers = c.audio_layers;
    m.prosody_layers = c.prosody_layers;
    m.mfm_blocks = c.mfm_blocks;
    m.bridge_len = c.bridge_len;
    m.mlp_depth = c.mlp_depth;
    m.modality = c.modality;
    m.use_kwrt = !c.no_kwrt;
    m.use_pe = !c.no_pe;
    m.use_tmf = !c.no_tmf;
    m.mel_tokens = c.mel_tokens;
    m.patch_frames = c.patch_frames;
    m.patch_mels = c.patch_mels;
    m.dropout = c.dropout;
    return m;
  }

  bool uses_text() const { return modality != Modality::Speech; }
  bool uses_audio() const { return modality != Modality::Text; }
  bool uses_fusion() const { return modality == Modality::TextSpeech; }
  bool uses_bridge() const { return uses_fusion() && use_tmf; }
};

inline nlohmann::json to_json(const ModelConfig& m) {
  return {{"vocab_size", m.vocab_size},   {"n_classes", m.n_classes},
          {"n_mels", m.n_mels},           {"model_dim", m.model_dim},
          {"n_heads", m.n_heads},         {"text_layers", m.text_layers},
          {"audio_layers", m.audio_layers}, {"prosody_layers", m.prosody_layers},
          {"mfm_blocks", m.mfm_blocks},   {"bridge_len", m.bridge_len},
          {"mlp_depth", m.mlp_depth},     {"modality", to_string(m.modality)},
          {"use_kwrt", m.use_kwrt},       {"use_pe", m.use_pe},
          {"use_tmf", m.use_tmf},         {"mel_tokens", to_string(m.mel_tokens)},
          {"patch_frames", m.patch_frames}, {"patch_mels", m.patch_mels},
          {"dropout", m.dropout}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig m;
  try {
    m.vocab_size = j.at("vocab_size");
    m.n_classes = j.at("n_classes");
    m.n_mels = j.at("n_mels");
    m.model_dim = j.at("model_dim");
    m.n_heads = j.at("n_heads");
    m.text_layers = j.at("text_layers");
    m.audio_layers = j.at("audio_layers");
    m.prosody_layers = j.at("prosody_layers");
    m.mfm_blocks = j.at("mfm_blocks");
    m.bridge_len = j.at("bridge_len");
    m.mlp_depth = j.at("mlp_depth");
    m.modality = parse_modality(j.at("modality").get<std::string>());
    m.use_kwrt = j.at("use_kwrt");
    m.use_pe = j.at("use_pe");
    m.use_tmf = j.at("use_tmf");
    m.mel_tokens = parse_mel_tokens(j.at("mel_tokens").get<std::string>());
    m.patch_frames = j.at("patch_frames");
    m.patch_mels = j.at("patch_mels");
    m.dropout = j.at("dropout");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad model config in checkpoint: ") + e.what());
  }
  return m;
}

// Intermediate tensors of one forward pass.
struct ForwardTrace {
  nn::Tensor h_t;   // token encodings
  nn::Tensor f_t;   // scaled unit features
  nn::Tensor h_a;   // audio encodings
  nn::Tensor f_a;   // prosody-enhanced audio
  nn::Tensor f_ta;  // initial fusion
  nn::Tensor f_m;   // mel-branch tokens
  std::optional<fusion::FusedFeatures> fused;
};

class EmotionModel {
 public:
  static EmotionModel init(const ModelConfig& cfg, std::uint64_t seed) {
    require(cfg.n_classes >= 1, "model: at least one class required");
    require(cfg.model_dim % cfg.n_heads == 0, "model: model_dim must be divisible by n_heads");
    nn::Rng rng(seed);
    EmotionModel m;
    m.cfg_ = cfg;
    const std::size_t d = cfg.model_dim;
    if (cfg.uses_text()) {
      require(cfg.vocab_size >= 1, "model: empty vocabulary");
      std::vector<double> emb(cfg.vocab_size * d);
      for (auto& v : emb) v = rng.normal();
      m.embedding_ = nn::Tensor::matrix(cfg.vocab_size, d, std::move(emb), true);
      for (std::size_t i = 0; i < cfg.text_layers; ++i)
        m.text_layers_.push_back(nn::TransformerLayer::init(d, cfg.n_heads, rng));
      if (cfg.use_kwrt) {
        m.kwrt_w_ = nn::uniform_param({1}, 1.0, rng);
        m.kwrt_b_ = nn::uniform_param({1}, 1.0, rng);
      }
    }
    if (cfg.uses_audio()) {
      m.audio_in_ = nn::Linear::init(cfg.n_mels, d, rng);
      for (std::size_t i = 0; i < cfg.audio_layers; ++i)
        m.audio_layers_.push_back(nn::TransformerLayer::init(d, cfg.n_heads, rng));
      if (cfg.use_pe)
        m.prosody_ = audio::ProsodyEncoderParams::init(d, cfg.n_heads, cfg.prosody_layers, rng);
    }
    if (cfg.uses_fusion()) m.fuse_ = fusion::InitialFusionParams::init(d, cfg.n_heads, rng);
    if (cfg.uses_bridge()) {
      const std::size_t mel_in = cfg.mel_tokens == MelTokens::Frame
                                     ? cfg.n_mels
                                     : cfg.patch_frames * cfg.patch_mels;
      if (cfg.mel_tokens == MelTokens::Patch)
        require(cfg.n_mels % cfg.patch_mels == 0, "model: patch_mels must divide n_mels");
      m.mel_in_ = nn::Linear::init(mel_in, d, rng);
      for (std::size_t b = 0; b < cfg.mfm_blocks; ++b)
        m.blocks_.push_back(
            fusion::MfmBlock::init(d, d, cfg.n_heads, cfg.bridge_len, cfg.mlp_depth, rng));
      m.heads_ = fusion::ClassifierHeads::init(d, d, cfg.n_classes, rng);
    } else {
      m.single_head_ = nn::Linear::init(d, cfg.n_classes, rng);
    }
    return m;
  }

  const ModelConfig& config() const { return cfg_; }

  nn::ParamList parameters() const {
    nn::ParamList out;
    if (embedding_.defined()) out.push_back({"text.embedding", embedding_});
    for (std::size_t i = 0; i < text_layers_.size(); ++i)
      text_layers_[i].collect("text.layer" + std::to_string(i), out);
    if (kwrt_w_.defined()) {
      out.push_back({"kwrt.weight", kwrt_w_});
      out.push_back({"kwrt.bias", kwrt_b_});
    }
    if (audio_in_.weight.defined()) audio_in_.collect("audio.input", out);
    for (std::size_t i = 0; i < audio_layers_.size(); ++i)
      audio_layers_[i].collect("audio.layer" + std::to_string(i), out);
    if (prosody_) prosody_->collect("prosody", out);
    if (fuse_) fuse_->collect("fusion.initial", out);
    if (mel_in_.weight.defined()) mel_in_.collect("mel.input", out);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      blocks_[b].collect("fusion.block" + std::to_string(b), out);
    if (heads_.head_a.weight.defined()) heads_.collect("classifier", out);
    if (single_head_.weight.defined()) single_head_.collect("classifier.single", out);
    return out;
  }

  std::size_t parameter_count() const { return nn::parameter_count(parameters()); }

  // Text side: token encodings pooled to units and scaled by importance.
  nn::Tensor encode_text(const TextInput& t, const nn::ForwardContext& ctx,
                         ForwardTrace* trace = nullptr) const {
    require(!t.token_ids.empty(), "model: empty token sequence");
    auto h = nn::add_positions(nn::gather_rows(embedding_, t.token_ids));
    for (const auto& layer : text_layers_) h = layer(h, ctx);
    auto units = nn::pool_rows(h, t.unit_tokens);
    auto f_t = kwrt_w_.defined() ? scale_text_features(units, t.unit_scores, kwrt_w_, kwrt_b_)
                                 : units;
    if (trace) {
      trace->h_t = h;
      trace->f_t = f_t;
    }
    return f_t;
  }

  // Audio side: mel frames -> encoder -> optional prosody enhancement.
  nn::Tensor encode_audio(const AudioInput& a, const nn::ForwardContext& ctx,
                          ForwardTrace* trace = nullptr) const {
    require(a.frames >= 1, "model: empty audio input");
    require(a.n_mels == cfg_.n_mels, "model: mel band count differs from the model's");
    auto mel = nn::Tensor::matrix(a.frames, a.n_mels, a.mel);
    auto h_a = nn::add_positions(audio_in_(mel));
    for (const auto& layer : audio_layers_) h_a = layer(h_a, ctx);
    auto f_a = prosody_ ? audio::prosody_enhance(h_a, *prosody_, audio::prosody_matrix(a.f0, a.energy), ctx)
                        : h_a;
    if (trace) {
      trace->h_a = h_a;
      trace->f_a = f_a;
    }
    return f_a;
  }

  nn::Tensor mel_tokens(const AudioInput& a) const {
    if (cfg_.mel_tokens == MelTokens::Frame)
      return nn::add_positions(mel_in_(nn::Tensor::matrix(a.frames, a.n_mels, a.mel)));
    const std::size_t pf = cfg_.patch_frames, pm = cfg_.patch_mels;
    const std::size_t nt = (a.frames + pf - 1) / pf, nf = a.n_mels / pm;
    std::vector<double> patches(nt * nf * pf * pm, 0.0);
    for (std::size_t ti = 0; ti < nt; ++ti)
      for (std::size_t fi = 0; fi < nf; ++fi) {
        double* dst = patches.data() + (ti * nf + fi) * pf * pm;
        for (std::size_t dt = 0; dt < pf; ++dt) {
          const std::size_t t = ti * pf + dt;
          if (t >= a.frames) break;
          for (std::size_t df = 0; df < pm; ++df) dst[dt * pm + df] = a.mel[t * a.n_mels + fi * pm + df];
        }
      }
    return nn::add_positions(mel_in_(nn::Tensor::matrix(nt * nf, pf * pm, std::move(patches))));
  }

  fusion::Logits forward(const ModelInput& in, const nn::ForwardContext& ctx = {},
                         ForwardTrace* trace = nullptr) const {
    nn::ForwardContext c = ctx;
    c.dropout = cfg_.dropout;
    if (cfg_.modality == Modality::Text) {
      auto f_t = encode_text(in.text, c, trace);
      return fusion::classify_single(f_t, f_t.rows(), single_head_);
    }
    if (cfg_.modality == Modality::Speech) {
      auto f_a = encode_audio(in.audio, c, trace);
      return fusion::classify_single(f_a, f_a.rows(), single_head_);
    }
    auto f_t = encode_text(in.text, c, trace);
    auto f_a = encode_audio(in.audio, c, trace);
    auto f_ta = fusion::initial_fusion(f_t, f_a, *fuse_);
    if (trace) trace->f_ta = f_ta;
    if (!cfg_.use_tmf) return fusion::classify_single(f_ta, f_ta.rows(), single_head_);
    auto f_m = mel_tokens(in.audio);
    auto fused = fusion::mfm_forward(f_ta, f_m, blocks_, c);
    auto logits = fusion::classify(fused, heads_);
    if (trace) {
      trace->f_m = f_m;
      trace->fused = std::move(fused);
    }
    return logits;
  }

  std::vector<fusion::MfmBlock>& blocks() { return blocks_; }

 private:
  ModelConfig cfg_;
  nn::Tensor embedding_;
  std::vector<nn::TransformerLayer> text_layers_;
  nn::Tensor kwrt_w_, kwrt_b_;
  nn::Linear audio_in_;
  std::vector<nn::TransformerLayer> audio_layers_;
  std::optional<audio::ProsodyEncoderParams> prosody_;
  std::optional<fusion::InitialFusionParams> fuse_;
  nn::Linear mel_in_;
  std::vector<fusion::MfmBlock> blocks_;
  fusion::ClassifierHeads heads_;
  nn::Linear single_head_;
};

}  // namespace ecue::tasks
