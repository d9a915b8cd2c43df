#pragma once

// Training, evaluation and model checkpoints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/nn/adam.hpp"
#include "ecue/nn/checkpoint.hpp"
#include "ecue/tasks/dataset.hpp"
#include "ecue/tasks/metrics.hpp"
#include "ecue/tasks/model.hpp"

namespace ecue::tasks {

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;  // predictions made during the epoch, before each update
};

struct TrainResult {
  EmotionModel model;
  std::vector<EpochRecord> trace;
  bool stopped_early = false;
};

inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

struct Prediction {
  std::string id;
  std::size_t truth = 0;
  std::size_t pred = 0;
  std::vector<double> logits;
};

struct EvalResult {
  Metrics metrics;
  ConfusionMatrix confusion;
  std::vector<Prediction> predictions;
};

inline EvalResult evaluate_model(const EmotionModel& model,
                                 const std::vector<PreparedInstance>& data) {
  const std::size_t classes = model.config().n_classes;
  EvalResult r{Metrics{}, ConfusionMatrix(classes), {}};
  for (const auto& inst : data) {
    const auto logits = model.forward(inst.input).averaged;
    Prediction p{inst.id, inst.label, argmax(logits.data()), logits.values()};
    r.confusion.add(p.truth, p.pred);
    r.predictions.push_back(std::move(p));
  }
  r.metrics = compute_metrics(r.confusion);
  return r;
}

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on the cross-entropy of the averaged logits. Instances are
// reshuffled every epoch from a generator seeded with cfg.seed. Parameters are
// rounded to f32 at the end so the returned model equals its checkpoint.
inline TrainResult train_model(const Dataset& data, const Vocabulary& vocab,
                               const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  validate(cfg);
  require(!data.instances.empty(), "train_model: no instances");
  auto mcfg = ModelConfig::from(cfg, vocab.size(), data.labels.size());
  TrainResult result{EmotionModel::init(mcfg, cfg.seed), {}, false};
  auto& model = result.model;
  auto params = model.parameters();
  nn::AdamState adam;
  adam.config.lr = cfg.lr;
  nn::Rng order_rng(cfg.seed ^ 0x5eedULL);
  nn::Rng dropout_rng(cfg.seed ^ 0xd50ULL);
  nn::ForwardContext ctx{true, cfg.dropout, &dropout_rng};

  std::vector<std::size_t> order(data.instances.size());
  std::size_t batch_id = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    order_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size, ++batch_id) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      nn::zero_grads(params);
      std::vector<nn::Tensor> losses;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& inst = data.instances[order[i]];
        const auto logits = model.forward(inst.input, ctx).averaged;
        if (argmax(logits.data()) == inst.label) ++correct;
        losses.push_back(nn::cross_entropy(logits, inst.label));
      }
      auto total = losses.front();
      for (std::size_t i = 1; i < losses.size(); ++i) total = nn::add(total, losses[i]);
      const auto loss = nn::scale(total, 1.0 / static_cast<double>(losses.size()));
      if (!std::isfinite(loss.item()))
        throw TrainingError("non-finite loss in batch " + std::to_string(batch_id) +
                            " (epoch " + std::to_string(epoch) + ")");
      loss_sum += total.item();
      loss.backward();
      try {
        nn::adam_step(params, adam);
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " in batch " + std::to_string(batch_id));
      }
    }
    const auto n = static_cast<double>(order.size());
    EpochRecord rec{epoch, loss_sum / n, static_cast<double>(correct) / n};
    result.trace.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (cfg.stop_at_full_train_accuracy && correct == order.size() &&
        evaluate_model(model, data.instances).metrics.accuracy == 1.0) {
      result.stopped_early = true;
      break;
    }
  }
  nn::quantize_to_f32(params);
  return result;
}

inline nlohmann::json trace_json(const std::vector<EpochRecord>& trace) {
  auto out = nlohmann::json::array();
  for (const auto& r : trace)
    out.push_back({{"epoch", r.epoch}, {"loss", r.mean_loss}, {"train_accuracy", r.train_accuracy}});
  return out;
}

// Checkpoint metadata carries everything needed to rebuild the model and
// re-encode inputs: labels, vocabulary, model and run configuration.
inline void save_model(const std::filesystem::path& path, const EmotionModel& model,
                       const std::vector<std::string>& labels, const Vocabulary& vocab,
                       const TrainConfig& cfg) {
  nlohmann::json meta = {{"labels", labels},
                         {"vocabulary", vocab.tokens()},
                         {"model", to_json(model.config())},
                         {"train_config", to_json(cfg)}};
  nn::save_checkpoint(path, model.parameters(), meta);
}

struct LoadedModel {
  EmotionModel model;
  std::vector<std::string> labels;
  Vocabulary vocab;
  TrainConfig config;
};

inline LoadedModel load_model(const std::filesystem::path& path) {
  const auto ck = nn::load_checkpoint(path);
  LoadedModel m;
  try {
    m.labels = ck.meta.at("labels").get<std::vector<std::string>>();
    m.vocab = Vocabulary::from_tokens(ck.meta.at("vocabulary").get<std::vector<std::string>>());
    apply_json(m.config, ck.meta.at("train_config"));
    m.model = EmotionModel::init(model_config_from_json(ck.meta.at("model")), 0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("checkpoint metadata: ") + e.what());
  }
  auto params = m.model.parameters();
  nn::assign_parameters(params, ck);
  return m;
}

inline void check_labels(const std::vector<std::string>& checkpoint_labels,
                         const std::vector<std::string>& corpus_labels) {
  if (checkpoint_labels != corpus_labels) {
    std::ostringstream msg;
    msg << "label set mismatch: checkpoint has " << checkpoint_labels.size()
        << " labels, corpus has " << corpus_labels.size();
    throw ValidationError(msg.str());
  }
}

inline void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& preds,
                                  const std::vector<std::string>& labels) {
  out << "instance_id,true,pred";
  for (const auto& l : labels) out << ",logit_" << l;
  out << '\n';
  std::ostringstream num;
  num.precision(17);
  for (const auto& p : preds) {
    out << p.id << ',' << labels.at(p.truth) << ',' << labels.at(p.pred);
    for (double v : p.logits) {
      num.str("");
      num << v;
      out << ',' << num.str();
    }
    out << '\n';
  }
}

}  // namespace ecue::tasks
