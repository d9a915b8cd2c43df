// ecue: command-line front end for tagging, feature extraction, training,
// evaluation, prediction, ablation and gradient checks.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecue/ecue.hpp"

#ifndef ECUE_GIT_DESCRIBE
#define ECUE_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ecue;
using namespace ecue::tasks;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sha256_file(const fs::path& path) {
  const auto bytes = read_file(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed for " + path.string());
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

void log_line(const std::string& s) { std::cerr << s << std::endl; }

// Run manifest: resolved configuration, seed, build version, timestamps and
// digests of every input file.
class RunManifest {
 public:
  RunManifest(fs::path path, std::string command) : path_(std::move(path)) {
    j_ = {{"command", std::move(command)},
          {"git_describe", ECUE_GIT_DESCRIBE},
          {"started_at", utc_now()},
          {"inputs", json::object()}};
  }
  void set_config(const TrainConfig& c) {
    j_["config"] = to_json(c);
    j_["seed"] = c.seed;
  }
  void set(const std::string& key, json v) { j_[key] = std::move(v); }
  void add_input(const fs::path& p) {
    if (!p.empty()) j_["inputs"][p.lexically_normal().string()] = sha256_file(p);
  }
  void add_corpus_audio(const std::vector<Conversation>& corpus) {
    for (const auto& c : corpus)
      for (const auto& u : c.utterances)
        if (u.audio_path && fs::exists(*u.audio_path)) add_input(*u.audio_path);
  }
  void write() const { write_json(path_, j_); }
  void finish() {
    j_["finished_at"] = utc_now();
    write();
  }

 private:
  fs::path path_;
  json j_;
};

// TrainConfig fields exposed as flags. Values given on the command line
// override the config file, which overrides built-in defaults.
class ConfigFlags {
 public:
  void add(CLI::App* app, bool with_ablation_flags = true) {
    app->add_option("--config", config_path_, "JSON config file (flat TrainConfig keys or a run manifest)");
    bind(app->add_option("--data", flags_.data, "conversation JSONL"), [this](TrainConfig& c) { c.data = flags_.data; });
    bind(app->add_option("--kb", flags_.kb, "relation TSV (empty = no relations)"), [this](TrainConfig& c) { c.kb = flags_.kb; });
    bind(app->add_option("--lexicon", flags_.lexicon, "function-word list (empty = built-in list)"), [this](TrainConfig& c) { c.lexicon = flags_.lexicon; });
    bind(app->add_option("--task", task_, "epc or erc")->capture_default_str(), [this](TrainConfig& c) { c.task = parse_task(task_); });
    bind(app->add_option("--modality", modality_, "T, S or T+S")->capture_default_str(), [this](TrainConfig& c) { c.modality = parse_modality(modality_); });
    bind(app->add_option("--lr", flags_.lr, "Adam learning rate")->capture_default_str(), [this](TrainConfig& c) { c.lr = flags_.lr; });
    bind(app->add_option("--batch-size", flags_.batch_size, "instances per Adam step")->capture_default_str(), [this](TrainConfig& c) { c.batch_size = flags_.batch_size; });
    bind(app->add_option("--epochs", flags_.epochs, "maximum training epochs")->capture_default_str(), [this](TrainConfig& c) { c.epochs = flags_.epochs; });
    bind(app->add_option("--seed", flags_.seed, "random seed")->capture_default_str(), [this](TrainConfig& c) { c.seed = flags_.seed; });
    bind(app->add_option("--model-dim", flags_.model_dim, "model width (reference setup: 1024)")->capture_default_str(), [this](TrainConfig& c) { c.model_dim = flags_.model_dim; });
    bind(app->add_option("--n-heads", flags_.n_heads, "attention heads (reference setup: 8)")->capture_default_str(), [this](TrainConfig& c) { c.n_heads = flags_.n_heads; });
    bind(app->add_option("--text-layers", flags_.text_layers, "text encoder layers")->capture_default_str(), [this](TrainConfig& c) { c.text_layers = flags_.text_layers; });
    bind(app->add_option("--audio-layers", flags_.audio_layers, "audio encoder layers")->capture_default_str(), [this](TrainConfig& c) { c.audio_layers = flags_.audio_layers; });
    bind(app->add_option("--prosody-layers", flags_.prosody_layers, "prosody encoder layers")->capture_default_str(), [this](TrainConfig& c) { c.prosody_layers = flags_.prosody_layers; });
    bind(app->add_option("--mfm-blocks", flags_.mfm_blocks, "bridge fusion blocks")->capture_default_str(), [this](TrainConfig& c) { c.mfm_blocks = flags_.mfm_blocks; });
    bind(app->add_option("--bridge-len", flags_.bridge_len, "bridge sequence length")->capture_default_str(), [this](TrainConfig& c) { c.bridge_len = flags_.bridge_len; });
    bind(app->add_option("--mlp-depth", flags_.mlp_depth, "linear layers per bridge projection")->capture_default_str(), [this](TrainConfig& c) { c.mlp_depth = flags_.mlp_depth; });
    bind(app->add_option("--window", flags_.window, "history window in utterances")->capture_default_str(), [this](TrainConfig& c) { c.window = flags_.window; });
    bind(app->add_option("--dropout", flags_.dropout, "dropout rate")->capture_default_str(), [this](TrainConfig& c) { c.dropout = flags_.dropout; });
    bind(app->add_option("--audio-pool", flags_.audio_pool, "mel frames averaged per audio token")->capture_default_str(), [this](TrainConfig& c) { c.audio_pool = flags_.audio_pool; });
    bind(app->add_option("--mel-tokens", mel_tokens_, "frame or patch")->capture_default_str(), [this](TrainConfig& c) { c.mel_tokens = parse_mel_tokens(mel_tokens_); });
    bind(app->add_option("--patch-frames", flags_.patch_frames, "frames per mel patch")->capture_default_str(), [this](TrainConfig& c) { c.patch_frames = flags_.patch_frames; });
    bind(app->add_option("--patch-mels", flags_.patch_mels, "mel bands per mel patch")->capture_default_str(), [this](TrainConfig& c) { c.patch_mels = flags_.patch_mels; });
    if (with_ablation_flags) {
      bind(app->add_flag("--no-kwrt", flags_.no_kwrt, "drop importance scaling"), [this](TrainConfig& c) { c.no_kwrt = flags_.no_kwrt; });
      bind(app->add_flag("--no-pe", flags_.no_pe, "drop prosody enhancement"), [this](TrainConfig& c) { c.no_pe = flags_.no_pe; });
      bind(app->add_flag("--no-tmf", flags_.no_tmf, "drop the bridge fusion stage"), [this](TrainConfig& c) { c.no_tmf = flags_.no_tmf; });
    }
    bind(app->add_flag("--stop-at-full-train-accuracy", flags_.stop_at_full_train_accuracy,
                       "stop once every training instance is classified correctly"),
         [this](TrainConfig& c) { c.stop_at_full_train_accuracy = flags_.stop_at_full_train_accuracy; });
    bind(app->add_option("--split", flags_.split, "all, train, dev or test")->capture_default_str(), [this](TrainConfig& c) { c.split = flags_.split; });
    bind(app->add_option("--split-seed", flags_.split_seed, "seed of the conversation-id split")->capture_default_str(), [this](TrainConfig& c) { c.split_seed = flags_.split_seed; });
  }

  TrainConfig resolve() const {
    TrainConfig c;
    if (!config_path_.empty()) c = load_config(config_path_);
    for (const auto& [opt, apply] : bindings_)
      if (opt->count() > 0) apply(c);
    validate(c);
    return c;
  }
  const std::string& config_path() const { return config_path_; }

 private:
  void bind(CLI::Option* opt, std::function<void(TrainConfig&)> apply) {
    bindings_.emplace_back(opt, std::move(apply));
  }

  TrainConfig flags_;
  std::string task_ = to_string(flags_.task);
  std::string modality_ = to_string(flags_.modality);
  std::string mel_tokens_ = to_string(flags_.mel_tokens);
  std::string config_path_;
  std::vector<std::pair<CLI::Option*, std::function<void(TrainConfig&)>>> bindings_;
};

void print_epoch(const std::string& prefix, const EpochRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%sepoch %zu loss %.6f train_acc %.4f", prefix.c_str(), r.epoch,
                r.mean_loss, r.train_accuracy);
  log_line(buf);
}

void print_metrics(const Metrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "uar %.4f macro_f1 %.4f accuracy %.4f weighted_f1 %.4f", m.uar,
                m.macro_f1, m.accuracy, m.weighted_f1);
  std::cout << buf << '\n';
}

// ---- tag ------------------------------------------------------------------

int cmd_tag(const fs::path& kb_path, const fs::path& input, const fs::path& lexicon_path,
            const fs::path& out) {
  const auto kb = kb_path.empty() ? KnowledgeBase{} : load_kb(kb_path);
  const auto lex = lexicon_path.empty() ? default_function_lexicon() : load_function_lexicon(lexicon_path);
  const auto corpus = load_conversations(input);
  ensure_dir(out);
  std::ostringstream lines;
  for (const auto& conv : corpus) {
    const auto tokens = render_speaker_sequence(conv.utterances);
    const auto mats = build_importance(classify_words(tokens, lex), kb);
    const auto scores = squeeze_importance(mats).scores;
    const std::size_t k = mats.words.size();
    json words = json::array(), is_content = json::array(), tags = json::array();
    json m_rec = json::array(), m_rel = json::array(), m = json::array();
    for (std::size_t i = 0; i < k; ++i) {
      words.push_back(mats.words[i].surface);
      is_content.push_back(mats.words[i].is_content);
      json tr = json::array(), rr = json::array(), lr = json::array(), mr = json::array();
      for (std::size_t j = 0; j < k; ++j) {
        tr.push_back(pair_tag(mats, kb, i, j));
        rr.push_back(mats.m_rec(i, j));
        lr.push_back(mats.m_rel(i, j));
        mr.push_back(mats.m(i, j));
      }
      tags.push_back(std::move(tr));
      m_rec.push_back(std::move(rr));
      m_rel.push_back(std::move(lr));
      m.push_back(std::move(mr));
    }
    if (const auto err = check_invariants(mats))
      throw ContractViolation("importance invariants violated for " + conv.id + ": " + *err);
    lines << json{{"id", conv.id},     {"words", words}, {"is_content", is_content},
                  {"tags", tags},      {"m_rec", m_rec}, {"m_rel", m_rel},
                  {"m", m},            {"scores", scores}}
                 .dump()
          << '\n';
  }
  write_text_file(out / "tags.jsonl", lines.str());
  std::cout << "tagged " << corpus.size() << " conversations -> " << (out / "tags.jsonl").string() << '\n';
  return kExitOk;
}

// ---- featurize ------------------------------------------------------------

int cmd_featurize(const fs::path& wav, const fs::path& out) {
  const audio::AudioConfig cfg;
  const auto features = audio::extract_features(audio::read_wav(wav, cfg.sample_rate), cfg);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  audio::write_features(out, features, cfg, wav.string());
  std::cout << "frames " << features.mel.n_frames << " mels " << features.mel.n_mels << " -> "
            << out.string() << '\n';
  return kExitOk;
}

// ---- kb stats -------------------------------------------------------------

int cmd_kb_stats(const fs::path& kb_path, const fs::path& out) {
  KbLoadStats stats;
  const auto kb = load_kb(kb_path, &stats);
  const json j = {{"triples", kb.triple_count()},
                  {"vocabulary", kb.vocabulary_size()},
                  {"lines", stats.lines},
                  {"skipped_relations", stats.skipped_relations},
                  {"duplicates", stats.duplicates}};
  std::cout << "triples " << kb.triple_count() << '\n'
            << "vocabulary " << kb.vocabulary_size() << '\n'
            << "skipped_relations " << stats.skipped_relations << '\n'
            << "duplicates " << stats.duplicates << '\n';
  if (!out.empty()) {
    ensure_dir(out);
    write_json(out / "kb_stats.json", j);
  }
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct Loaded {
  std::vector<Conversation> corpus;
  Resources resources;
};

Loaded load_inputs(const TrainConfig& cfg, RunManifest* manifest) {
  Loaded l{load_corpus(cfg), load_resources(cfg)};
  if (manifest) {
    manifest->add_input(cfg.data);
    manifest->add_input(cfg.kb);
    manifest->add_input(cfg.lexicon);
    manifest->add_corpus_audio(l.corpus);
  }
  return l;
}

int cmd_train(const ConfigFlags& flags, const fs::path& out) {
  const auto cfg = flags.resolve();
  ensure_dir(out);
  RunManifest manifest(out / "run_manifest.json", "train");
  manifest.set_config(cfg);
  manifest.add_input(flags.config_path());
  auto in = load_inputs(cfg, &manifest);
  manifest.write();

  const auto vocab = Vocabulary::build(in.corpus);
  const auto data = build_dataset(in.corpus, cfg, vocab, in.resources);
  log_line("train: " + std::to_string(data.instances.size()) + " " + to_string(cfg.task) +
           " instances, " + std::to_string(data.labels.size()) + " labels");
  auto result = train_model(data, vocab, cfg, [](const EpochRecord& r) { print_epoch("", r); });
  save_model(out / "model.json", result.model, data.labels, vocab, cfg);
  write_json(out / "trace.json", trace_json(result.trace));
  const auto ev = evaluate_model(result.model, data.instances);
  write_json(out / "train_metrics.json", metrics_json(ev.metrics, ev.confusion));
  manifest.set("epochs_run", result.trace.size());
  manifest.set("parameters", result.model.parameter_count());
  manifest.finish();
  std::cout << "epochs " << result.trace.size() << " parameters " << result.model.parameter_count() << '\n';
  print_metrics(ev.metrics);
  return kExitOk;
}

// ---- eval / predict -------------------------------------------------------

struct EvalInputs {
  LoadedModel model;
  Dataset data;
  TrainConfig cfg;
};

EvalInputs prepare_eval(const fs::path& model_path, const std::string& data, const std::string& kb,
                        const std::string& split, RunManifest& manifest) {
  EvalInputs e{load_model(model_path), {}, {}};
  e.cfg = e.model.config;
  if (!data.empty()) e.cfg.data = data;
  if (!kb.empty()) e.cfg.kb = kb;
  if (!split.empty()) e.cfg.split = split;
  validate(e.cfg);
  manifest.set_config(e.cfg);
  manifest.add_input(model_path);
  manifest.add_input(nn::blob_path_for(model_path));
  auto in = load_inputs(e.cfg, &manifest);
  manifest.write();
  check_labels(e.model.labels, corpus_labels(in.corpus));
  e.data = build_dataset(in.corpus, e.cfg, e.model.vocab, in.resources);
  return e;
}

void write_predictions(const fs::path& path, const std::vector<Prediction>& preds,
                       const std::vector<std::string>& labels) {
  std::ostringstream csv;
  write_predictions_csv(csv, preds, labels);
  write_text_file(path, csv.str());
}

int cmd_eval(const fs::path& model_path, const std::string& data, const std::string& kb,
             const std::string& split, const fs::path& out, bool metrics) {
  ensure_dir(out);
  RunManifest manifest(out / "run_manifest.json", metrics ? "eval" : "predict");
  auto e = prepare_eval(model_path, data, kb, split, manifest);
  const auto ev = evaluate_model(e.model.model, e.data.instances);
  write_predictions(out / "predictions.csv", ev.predictions, e.model.labels);
  if (metrics) {
    write_json(out / "metrics.json", metrics_json(ev.metrics, ev.confusion));
    print_metrics(ev.metrics);
  } else {
    std::cout << "predicted " << ev.predictions.size() << " instances -> "
              << (out / "predictions.csv").string() << '\n';
  }
  manifest.finish();
  return kExitOk;
}

// ---- ablate ---------------------------------------------------------------

int cmd_ablate(const ConfigFlags& flags, const std::string& eval_split, const fs::path& out) {
  const auto cfg = flags.resolve();
  ensure_dir(out);
  RunManifest manifest(out / "run_manifest.json", "ablate");
  manifest.set_config(cfg);
  manifest.set("eval_split", eval_split.empty() ? cfg.split : eval_split);
  manifest.add_input(flags.config_path());
  auto in = load_inputs(cfg, &manifest);
  manifest.write();

  const auto vocab = Vocabulary::build(in.corpus);
  const auto train = build_dataset(in.corpus, cfg, vocab, in.resources);
  Dataset eval = train;
  if (!eval_split.empty() && eval_split != cfg.split) {
    auto ecfg = cfg;
    ecfg.split = eval_split;
    eval = build_dataset(load_corpus(ecfg), ecfg, vocab, in.resources);
  }
  const auto table = run_ablation(train, eval, vocab, cfg, [](const std::string& v, const EpochRecord& r) {
    print_epoch("[" + v + "] ", r);
  });
  const auto text = format_ablation(table);
  write_text_file(out / "ablation.txt", text);
  write_json(out / "ablation.json", ablation_json(table));
  manifest.finish();
  std::cout << text;
  return kExitOk;
}

// ---- gradcheck ------------------------------------------------------------

int cmd_gradcheck(std::uint64_t seed, const fs::path& out) {
  const auto entries = run_gradient_suite(seed);
  bool ok = true;
  json j = json::array();
  for (const auto& e : entries) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-22s max_rel_error %.3e (%zu coords) %s", e.module.c_str(),
                  e.result.max_rel_error, e.result.coords_checked, e.passed() ? "ok" : "FAIL");
    std::cout << buf << '\n';
    ok = ok && e.passed();
    j.push_back({{"module", e.module},
                 {"max_rel_error", e.result.max_rel_error},
                 {"coords_checked", e.result.coords_checked},
                 {"worst_param", e.result.worst_param},
                 {"worst_index", e.result.worst_index},
                 {"passed", e.passed()}});
  }
  if (!out.empty()) {
    ensure_dir(out);
    write_json(out / "gradcheck.json", {{"seed", seed}, {"tolerance", kGradCheckTolerance}, {"modules", j}});
  }
  return ok ? kExitOk : kExitValidation;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const SyntheticOptions& opt, const fs::path& out) {
  const auto paths = write_synthetic_corpus(out, opt);
  std::cout << "corpus " << paths.corpus.string() << "\nkb " << paths.kb.string() << '\n';
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Emotion prediction and recognition in conversation"};
  app.name("ecue");
  app.require_subcommand(1);
  app.fallthrough(false);

  // tag
  auto* tag = app.add_subcommand("tag", "tag word-pair relations in each conversation");
  std::string tag_kb, tag_input, tag_lexicon, tag_out;
  std::uint64_t tag_seed = 0;
  tag->add_option("--kb", tag_kb, "relation TSV");
  tag->add_option("--input", tag_input, "conversation JSONL")->required();
  tag->add_option("--lexicon", tag_lexicon, "function-word list (default: built-in)");
  tag->add_option("--out", tag_out, "output directory (writes tags.jsonl)")->required();
  tag->add_option("--seed", tag_seed, "unused; accepted for uniformity")->capture_default_str();

  // featurize
  auto* feat = app.add_subcommand("featurize", "extract mel and prosody frames from a WAV file");
  std::string feat_wav, feat_out;
  std::uint64_t feat_seed = 0;
  feat->add_option("--wav", feat_wav, "mono WAV file")->required();
  feat->add_option("--out", feat_out, "output manifest path (.json; blob written next to it)")->required();
  feat->add_option("--seed", feat_seed, "unused; accepted for uniformity")->capture_default_str();

  // kb stats
  auto* kb = app.add_subcommand("kb", "knowledge-base utilities");
  kb->require_subcommand(1);
  auto* kb_stats = kb->add_subcommand("stats", "print triple and vocabulary counts");
  std::string kb_path, kb_out;
  std::uint64_t kb_seed = 0;
  kb_stats->add_option("--kb,kb", kb_path, "relation TSV")->required();
  kb_stats->add_option("--out", kb_out, "optional output directory (writes kb_stats.json)");
  kb_stats->add_option("--seed", kb_seed, "unused; accepted for uniformity")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "train a model");
  ConfigFlags train_flags;
  std::string train_out;
  train_flags.add(train);
  train->add_option("--out", train_out, "output directory")->required();

  // eval / predict
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint: metrics, confusion matrix, predictions");
  auto* predict = app.add_subcommand("predict", "write per-instance predictions");
  struct EvalArgs {
    std::string model, data, kb, split, out;
    std::uint64_t seed = 0;
  } eval_args, predict_args;
  for (auto [cmd, args] : {std::pair{eval, &eval_args}, std::pair{predict, &predict_args}}) {
    cmd->add_option("--model", args->model, "checkpoint manifest written by train")->required();
    cmd->add_option("--data", args->data, "conversation JSONL (default: the training data)");
    cmd->add_option("--kb", args->kb, "relation TSV (default: the training KB)");
    cmd->add_option("--split", args->split, "all, train, dev or test (default: the training split)");
    cmd->add_option("--out", args->out, "output directory")->required();
    cmd->add_option("--seed", args->seed, "unused; evaluation is deterministic")->capture_default_str();
  }

  // ablate
  auto* ablate = app.add_subcommand("ablate", "train full and ablated variants and tabulate deltas");
  ConfigFlags ablate_flags;
  std::string ablate_out, ablate_eval_split;
  ablate_flags.add(ablate, false);
  ablate->add_option("--eval-split", ablate_eval_split, "split scored for the table (default: training split)");
  ablate->add_option("--out", ablate_out, "output directory")->required();

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient checks per module");
  std::uint64_t gc_seed = 0;
  std::string gc_out;
  gc->add_option("--seed", gc_seed, "seed for inputs and parameters")->capture_default_str();
  gc->add_option("--out", gc_out, "optional output directory (writes gradcheck.json)");

  // synth
  auto* synth = app.add_subcommand("synth", "write a separable synthetic corpus");
  SyntheticOptions synth_opt;
  std::string synth_out;
  synth->add_option("--seed", synth_opt.seed, "generator seed")->capture_default_str();
  synth->add_option("--conversations", synth_opt.conversations, "conversation count")->capture_default_str();
  synth->add_option("--utterances", synth_opt.utterances, "utterances per conversation")->capture_default_str();
  synth->add_option("--seconds", synth_opt.seconds, "clip length in seconds")->capture_default_str();
  synth->add_option("--out", synth_out, "output directory")->required();

  if (argc <= 1) {
    std::cout << app.help();
    return kExitValidation;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ecue: error[usage]: " << one_line(e.what()) << '\n';
    std::cerr << app.help();
    return kExitValidation;
  }

  if (*tag) return cmd_tag(tag_kb, tag_input, tag_lexicon, tag_out);
  if (*feat) return cmd_featurize(feat_wav, feat_out);
  if (*kb_stats) return cmd_kb_stats(kb_path, kb_out);
  if (*train) return cmd_train(train_flags, train_out);
  if (*eval) return cmd_eval(eval_args.model, eval_args.data, eval_args.kb, eval_args.split, eval_args.out, true);
  if (*predict)
    return cmd_eval(predict_args.model, predict_args.data, predict_args.kb, predict_args.split, predict_args.out, false);
  if (*ablate) return cmd_ablate(ablate_flags, ablate_eval_split, ablate_out);
  if (*gc) return cmd_gradcheck(gc_seed, gc_out);
  if (*synth) return cmd_synth(synth_opt, synth_out);
  std::cout << app.help();
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "ecue: error[io]: " << one_line(e.what()) << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "ecue: error[parse]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "ecue: error[validation]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const TrainingError& e) {
    std::cerr << "ecue: error[training]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "ecue: error[internal]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }
}
