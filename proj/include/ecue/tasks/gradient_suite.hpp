#pragma once

// Finite-difference checks for the model's differentiable building blocks,
// each on a small randomly initialized instance.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ecue/audio/enhance.hpp"
#include "ecue/audio/featurize.hpp"
#include "ecue/fusion.hpp"
#include "ecue/kwrt.hpp"
#include "ecue/nn/grad_check.hpp"
#include "ecue/tasks/features.hpp"
#include "ecue/tasks/model.hpp"
#include "ecue/tasks/synthetic.hpp"

namespace ecue::tasks {

inline constexpr double kGradCheckTolerance = 1e-3;

struct GradSuiteEntry {
  std::string module;
  nn::GradCheckResult result;
  bool passed() const { return result.max_rel_error <= kGradCheckTolerance; }
};

namespace detail {

inline nn::Tensor random_input(std::size_t rows, std::size_t cols, nn::Rng& rng,
                               bool requires_grad = true) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = rng.normal();
  return nn::Tensor::matrix(rows, cols, std::move(v), requires_grad);
}

// Scalar loss sum(x * r) for a fixed random r of x's shape.
inline nn::Tensor probe(const nn::Tensor& x, const nn::Tensor& r) { return nn::sum(nn::mul(x, r)); }

}  // namespace detail

inline GradSuiteEntry check_importance_scaling(std::uint64_t seed) {
  nn::Rng rng(seed);
  const std::size_t k = 6, d = 5;
  auto h = detail::random_input(k, d, rng);
  auto w = nn::Tensor::from({1}, {rng.uniform(-1.0, 1.0)}, true);
  auto b = nn::Tensor::from({1}, {rng.uniform(-1.0, 1.0)}, true);
  std::vector<double> scores(k);
  for (auto& s : scores) s = static_cast<double>(rng.below(5)) / 2.0;
  const auto r = detail::random_input(k, d, rng, false);
  nn::ParamList params = {{"h_words", h}, {"w", w}, {"b", b}};
  return {"importance_scaling",
          nn::grad_check([&] { return detail::probe(scale_text_features(h, scores, w, b), r); },
                         params, {.seed = seed})};
}

inline GradSuiteEntry check_prosody_enhancement(std::uint64_t seed) {
  nn::Rng rng(seed);
  const std::size_t t = 5, d = 8;
  auto h_a = detail::random_input(t, d, rng);
  auto enc = audio::ProsodyEncoderParams::init(d, 2, 1, rng);
  std::vector<double> f0(t), energy(t);
  for (std::size_t i = 0; i < t; ++i) {
    f0[i] = i % 2 ? 0.0 : rng.uniform(80.0, 300.0);
    energy[i] = rng.uniform(0.0, 0.5);
  }
  const auto prosody = audio::prosody_matrix(f0, energy);
  const auto r = detail::random_input(t, d, rng, false);
  nn::ParamList params = {{"h_a", h_a}};
  enc.collect("prosody", params);
  return {"prosody_enhancement",
          nn::grad_check([&] { return detail::probe(audio::prosody_enhance(h_a, enc, prosody), r); },
                         params, {.seed = seed})};
}

inline GradSuiteEntry check_initial_fusion(std::uint64_t seed) {
  nn::Rng rng(seed);
  const std::size_t d = 8;
  auto f_t = detail::random_input(4, d, rng);
  auto f_a = detail::random_input(6, d, rng);
  auto p = fusion::InitialFusionParams::init(d, 2, rng);
  const auto r = detail::random_input(6, d, rng, false);
  nn::ParamList params = {{"f_t", f_t}, {"f_a", f_a}};
  p.collect("fusion", params);
  return {"initial_fusion",
          nn::grad_check([&] { return detail::probe(fusion::initial_fusion(f_t, f_a, p), r); },
                         params, {.seed = seed})};
}

inline GradSuiteEntry check_mfm_stack(std::uint64_t seed) {
  nn::Rng rng(seed);
  const std::size_t d = 8, n_ta = 4, n_m = 5, lb = fusion::kDefaultBridgeLength;
  auto f_ta = detail::random_input(n_ta, d, rng);
  auto f_m = detail::random_input(n_m, d, rng);
  std::vector<fusion::MfmBlock> blocks;
  for (int i = 0; i < 2; ++i) blocks.push_back(fusion::MfmBlock::init(d, d, 2, lb, 1, rng));
  const auto r1 = detail::random_input(n_ta + lb, d, rng, false);
  const auto r2 = detail::random_input(n_m + lb, d, rng, false);
  nn::ParamList params = {{"f_ta", f_ta}, {"f_m", f_m}};
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].collect("block" + std::to_string(i), params);
  return {"mfm_stack", nn::grad_check(
                           [&] {
                             const auto out = fusion::mfm_forward(f_ta, f_m, blocks);
                             return nn::add(detail::probe(out.f_m_to_ta, r1),
                                            detail::probe(out.f_ta_to_m, r2));
                           },
                           params, {.seed = seed})};
}

// A two-utterance conversation whose first utterance is the history and whose
// second supplies the label; audio is synthesized in memory.
inline PreparedInstance tiny_epc_instance(const Vocabulary& vocab, const KnowledgeBase& kb,
                                          const FunctionLexicon& lex, std::size_t pool,
                                          nn::Rng& rng) {
  Conversation conv;
  conv.id = "check";
  conv.label_set = {"hap", "sad"};
  conv.utterances = {{0, "The sunny party was fun", 0, std::nullopt},
                     {1, "I cry in the rain", 1, std::nullopt}};
  const auto inst = build_epc_instances(conv, 3).front();
  FeatureContext ctx;
  ctx.kb = &kb;
  ctx.lexicon = &lex;
  ctx.vocab = &vocab;
  const auto features = audio::extract_features(synthetic_tone(150.0, 0.3, 0.12, rng));
  PreparedInstance p;
  p.id = "check#1";
  p.label = inst.target_label;
  p.input.text = prepare_text(epc_tokens(inst), ctx);
  p.input.audio = pool_audio({&features}, features.mel.n_mels, pool);
  return p;
}

inline GradSuiteEntry check_epc_forward(std::uint64_t seed) {
  nn::Rng rng(seed);
  std::vector<Conversation> corpus(1);
  corpus[0].utterances = {{0, "The sunny party was fun", 0, std::nullopt},
                          {1, "I cry in the rain", 1, std::nullopt}};
  const auto vocab = Vocabulary::build(corpus);
  KnowledgeBase kb;
  kb.add({"sunny", RelationKind::HasContext, "party"});
  const auto lex = default_function_lexicon();
  const auto inst = tiny_epc_instance(vocab, kb, lex, 4, rng);

  ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.n_classes = 2;
  mc.model_dim = 8;
  mc.n_heads = 2;
  mc.text_layers = 1;
  mc.audio_layers = 1;
  mc.prosody_layers = 1;
  mc.mfm_blocks = 2;
  const auto model = EmotionModel::init(mc, seed);
  return {"epc_forward", nn::grad_check(
                             [&] {
                               return nn::cross_entropy(model.forward(inst.input).averaged,
                                                        inst.label);
                             },
                             model.parameters(),
                             {.max_coords_per_tensor = 4, .seed = seed})};
}

inline std::vector<GradSuiteEntry> run_gradient_suite(std::uint64_t seed) {
  return {check_importance_scaling(seed), check_prosody_enhancement(seed),
          check_initial_fusion(seed), check_mfm_stack(seed), check_epc_forward(seed)};
}

}  // namespace ecue::tasks
