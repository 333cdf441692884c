// Command-line front end for the suggestion-mining pipeline: prepare the
// dataset, train a classifier, evaluate it, run the keyword error analysis,
// and serve predictions over stdin/stdout.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "suggest/corpus.hpp"
#include "suggest/error.hpp"
#include "suggest/eval_report.hpp"
#include "suggest/features.hpp"
#include "suggest/fingerprint.hpp"
#include "suggest/linear_models.hpp"
#include "suggest/model_io.hpp"
#include "suggest/neural.hpp"
#include "suggest/normalize.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace suggest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Configuration errors (bad config file, missing inputs, unknown model kind)
// exit with kExitUsage; anything failing later exits with kExitRuntime.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Run configuration: defaults < config file < command-line flags.
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string train_path;
  std::string trial_path;
  std::string embeddings_path;
  std::string slang_path;
  std::string emoticon_path;
  std::string rules_path;

  std::string model_kind = "nb";
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  std::string format = "csv";

  double alpha = 1.0;
  double l2 = 1e-4;
  double learning_rate = 0.1;
  double decay = 0.01;
  std::size_t epochs = 50;
  std::size_t min_df = 1;
  std::size_t ngram_max = 1;
  std::size_t hidden_units = 128;
  std::size_t max_seq_len = 64;
  double clip_norm = 5.0;
  double lstm_learning_rate = 0.1;
  std::size_t lstm_epochs = 10;
  std::size_t embedding_dim = 300;

  std::string lowercase_policy = "lowercase_modified_only";
  std::string punct_policy = "drop_quoted";
};

template <typename T>
void maybe(const ordered_json& obj, const char* key, T* out) {
  if (obj.contains(key)) *out = obj.at(key).get<T>();
}

RunConfig load_run_config(const std::string& path) {
  RunConfig rc;
  if (path.empty()) return rc;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw UsageError(path + ": invalid JSON: " + e.what());
  }
  if (!doc.contains("version") || doc["version"] != 1)
    throw UsageError(path + ": config version must be 1");

  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    maybe(p, "train", &rc.train_path);
    maybe(p, "trial", &rc.trial_path);
    maybe(p, "embeddings", &rc.embeddings_path);
    maybe(p, "slang_lexicon", &rc.slang_path);
    maybe(p, "emoticon_lexicon", &rc.emoticon_path);
    maybe(p, "rule_table", &rc.rules_path);
  }
  maybe(doc, "model", &rc.model_kind);
  maybe(doc, "seed", &rc.seed);
  maybe(doc, "out_dir", &rc.out_dir);
  maybe(doc, "format", &rc.format);
  if (doc.contains("hyperparameters")) {
    const auto& h = doc["hyperparameters"];
    maybe(h, "alpha", &rc.alpha);
    maybe(h, "l2", &rc.l2);
    maybe(h, "learning_rate", &rc.learning_rate);
    maybe(h, "decay", &rc.decay);
    maybe(h, "epochs", &rc.epochs);
    maybe(h, "min_df", &rc.min_df);
    maybe(h, "ngram_max", &rc.ngram_max);
    maybe(h, "hidden_units", &rc.hidden_units);
    maybe(h, "max_seq_len", &rc.max_seq_len);
    maybe(h, "clip_norm", &rc.clip_norm);
    maybe(h, "lstm_learning_rate", &rc.lstm_learning_rate);
    maybe(h, "lstm_epochs", &rc.lstm_epochs);
    maybe(h, "embedding_dim", &rc.embedding_dim);
  }
  if (doc.contains("normalizer")) {
    const auto& n = doc["normalizer"];
    maybe(n, "lowercase_policy", &rc.lowercase_policy);
    maybe(n, "punct_policy", &rc.punct_policy);
  }
  return rc;
}

NormalizerConfig build_normalizer(const RunConfig& rc) {
  NormalizerConfig cfg = default_config();
  if (!rc.slang_path.empty()) cfg.slang_lexicon = load_slang_lexicon(rc.slang_path);
  if (!rc.emoticon_path.empty())
    cfg.emoticon_lexicon = load_emoticon_lexicon(rc.emoticon_path);
  if (!rc.rules_path.empty()) cfg.rules = load_rule_table(rc.rules_path);

  if (rc.lowercase_policy == "preserve")
    cfg.lowercase_policy = LowercasePolicy::Preserve;
  else if (rc.lowercase_policy == "lowercase_all")
    cfg.lowercase_policy = LowercasePolicy::LowercaseAll;
  else if (rc.lowercase_policy == "lowercase_modified_only")
    cfg.lowercase_policy = LowercasePolicy::LowercaseModifiedOnly;
  else
    throw UsageError("unknown lowercase_policy \"" + rc.lowercase_policy + "\"");

  if (rc.punct_policy == "drop_quoted")
    cfg.punct_policy = PunctPolicy::DropQuoted;
  else if (rc.punct_policy == "keep_all")
    cfg.punct_policy = PunctPolicy::KeepAll;
  else if (rc.punct_policy == "drop_all")
    cfg.punct_policy = PunctPolicy::DropAll;
  else
    throw UsageError("unknown punct_policy \"" + rc.punct_policy + "\"");
  return cfg;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty())
    throw UsageError(std::string("missing required ") + what + " path");
  if (!fs::exists(path))
    throw UsageError(std::string(what) + " path does not exist: " + path);
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail("cannot create output directory ", dir, ": ", ec.message());
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces
// ---------------------------------------------------------------------------

TokenStream normalized_tokens(const std::string& text,
                              const NormalizerConfig& cfg) {
  // normalize is idempotent, so this is safe on both raw and prepared text.
  return normalize(tokenize(text, cfg), cfg);
}

SparseVector featurize(const TokenStream& ts, const Vocabulary& vocab,
                       VectorizerKind kind) {
  return kind == VectorizerKind::Tfidf ? tfidf_vector(ts, vocab)
                                       : count_vector(ts, vocab);
}

void write_distribution_files(const std::string& dir,
                              const std::vector<std::pair<std::string, Dataset>>&
                                  splits) {
  ordered_json doc;
  doc["version"] = 1;
  ordered_json body;
  std::ostringstream txt;
  txt << "split                 suggestion  non_suggestion\n";
  for (const auto& [name, d] : splits) {
    auto dist = class_distribution(d);
    ordered_json row;
    row["suggestion"] = dist[Label::Suggestion];
    row["non_suggestion"] = dist[Label::NonSuggestion];
    body[name] = row;
    txt << std::left << std::setw(22) << name << std::right << std::setw(10)
        << dist[Label::Suggestion] << std::setw(16)
        << dist[Label::NonSuggestion] << "\n";
  }
  doc["splits"] = body;
  std::ofstream json_out(dir + "/distribution.json", std::ios::binary);
  json_out << doc.dump(2) << "\n";
  std::ofstream txt_out(dir + "/distribution.txt", std::ios::binary);
  txt_out << txt.str();
  if (!json_out || !txt_out) fail("failed writing distribution report");
}

Dataset normalize_dataset(const Dataset& d, const NormalizerConfig& cfg) {
  Dataset out;
  out.split_tag = d.split_tag;
  out.records.reserve(d.records.size());
  for (const LabeledSentence& rec : d.records) {
    std::string text = preprocess(rec.text, cfg);
    // A sentence can normalize to nothing (all-dropped punctuation); keep the
    // raw text so the record survives the non-empty-text invariant.
    if (text.empty()) text = rec.text;
    out.records.push_back({rec.id, std::move(text), rec.label});
  }
  return out;
}

void write_report_files(const std::string& stem, const EvalReport& report) {
  ordered_json doc;
  doc["version"] = 1;
  doc["n_records"] = report.matrix.total();
  ordered_json matrix;
  matrix["tp"] = report.matrix.tp;
  matrix["fp"] = report.matrix.fp;
  matrix["fn"] = report.matrix.fn;
  matrix["tn"] = report.matrix.tn;
  doc["matrix"] = matrix;
  doc["precision"] = report.precision;
  doc["recall"] = report.recall;
  doc["f1"] = report.f1;
  doc["degenerate"] = report.degenerate;
  std::ofstream json_out(stem + "_report.json", std::ios::binary);
  json_out << doc.dump(2) << "\n";

  std::ostringstream txt;
  txt << render_confusion(report.matrix);
  txt << "precision  " << fmt_double(report.precision) << "\n";
  txt << "recall     " << fmt_double(report.recall) << "\n";
  txt << "f1         " << fmt_double(report.f1) << "\n";
  if (report.degenerate) txt << "note: degenerate metric denominators\n";
  txt << "\nreference F1 grid (reported experiments; not targets):\n";
  for (const ReferenceScore& s : reference_scores())
    txt << "  " << std::left << std::setw(46) << s.model << " train "
        << s.train_f1 << "  test " << s.test_f1 << "\n";
  std::ofstream txt_out(stem + "_report.txt", std::ios::binary);
  txt_out << txt.str();

  std::ofstream preds(stem + "_predictions.csv", std::ios::binary);
  preds << "id,gold,predicted,decision_value\n";
  for (const RecordOutcome& o : report.outcomes) {
    preds << o.id << "," << (o.gold == Label::Suggestion ? 1 : 0) << ","
          << (o.predicted == Label::Suggestion ? 1 : 0) << ",";
    if (o.decision_value) preds << fmt_double(*o.decision_value);
    preds << "\n";
  }
  export_confusion(report.matrix, stem + "_confusion.csv");
  if (!json_out || !txt_out || !preds) fail("failed writing report files");
}

// ---------------------------------------------------------------------------
// Inference-side model loading
// ---------------------------------------------------------------------------

struct LoadedModel {
  ModelBundle bundle;
  NormalizerConfig normalizer;
  Vocabulary vocab;       // sparse models only
  EmbeddingTable embeddings;  // lstm only
};

LoadedModel load_for_inference(const std::string& model_path,
                               std::string vocab_path,
                               std::string normalizer_path,
                               const std::string& embeddings_path) {
  require_file(model_path, "model");
  LoadedModel lm;
  lm.bundle = load_model(model_path);

  const fs::path dir = fs::path(model_path).parent_path();
  if (normalizer_path.empty())
    normalizer_path = (dir / "normalizer.json").string();
  require_file(normalizer_path, "normalizer config");
  lm.normalizer = load_normalizer_config(normalizer_path);
  verify_normalizer(lm.bundle, lm.normalizer);

  if (lm.bundle.kind == ModelKind::Lstm) {
    require_file(embeddings_path, "embeddings");
    const auto& shape = std::get<LSTMClassifier>(lm.bundle.model).shape;
    lm.embeddings = load_embeddings(embeddings_path, shape.input_dim);
    verify_embeddings(lm.bundle, lm.embeddings);
  } else {
    if (vocab_path.empty()) vocab_path = (dir / "vocab.tsv").string();
    require_file(vocab_path, "vocabulary");
    lm.vocab = Vocabulary::load(vocab_path);
    verify_vocabulary(lm.bundle, lm.vocab);
  }
  return lm;
}

Prediction predict_record(const LoadedModel& lm, const std::string& id,
                          const std::string& text) {
  TokenStream ts = normalized_tokens(text, lm.normalizer);
  Prediction p;
  p.id = id;
  double decision;
  if (lm.bundle.kind == ModelKind::Lstm) {
    decision = lstm_decision_value(std::get<LSTMClassifier>(lm.bundle.model),
                                   ts, lm.embeddings);
  } else {
    SparseVector x = featurize(ts, lm.vocab, lm.bundle.vectorizer);
    decision = lm.bundle.decision_value(x);
  }
  p.decision_value = decision;
  p.label = label_from_decision(decision);
  return p;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_prepare(const RunConfig& rc) {
  require_file(rc.train_path, "train");
  if (!rc.trial_path.empty()) require_file(rc.trial_path, "trial");
  const DatasetFormat fmt = parse_format(rc.format);
  const NormalizerConfig cfg = build_normalizer(rc);

  Dataset train = load_dataset(rc.train_path, fmt, SplitTag::Train);
  Dataset trial;
  if (!rc.trial_path.empty())
    trial = load_dataset(rc.trial_path, fmt, SplitTag::Trial);

  Dataset train_norm = normalize_dataset(train, cfg);
  Dataset over = oversample(train_norm, rc.seed);

  ensure_out_dir(rc.out_dir);
  save_dataset(train_norm, rc.out_dir + "/train.normalized.csv");
  save_dataset(over, rc.out_dir + "/train.oversampled.csv");
  std::vector<std::pair<std::string, Dataset>> splits = {
      {"train", train_norm}, {"train_oversampled", over}};
  if (!rc.trial_path.empty()) {
    // Evaluation splits are normalized but never oversampled.
    Dataset trial_norm = normalize_dataset(trial, cfg);
    save_dataset(trial_norm, rc.out_dir + "/trial.normalized.csv");
    splits.push_back({"trial", trial_norm});
  }
  write_distribution_files(rc.out_dir, splits);

  for (const auto& [name, d] : splits) {
    auto dist = class_distribution(d);
    std::cout << name << ": " << dist[Label::Suggestion] << " suggestion / "
              << dist[Label::NonSuggestion] << " non_suggestion\n";
  }
  return kExitOk;
}

void write_loss_log(const std::string& path, const std::vector<double>& losses) {
  std::ofstream out(path, std::ios::binary);
  out << "epoch\tloss\n";
  for (std::size_t e = 0; e < losses.size(); ++e)
    out << e << "\t" << fmt_double(losses[e]) << "\n";
  if (!out) fail("failed writing loss log: ", path);
}

int cmd_train(const RunConfig& rc, const std::string& eval_input) {
  if (rc.model_kind != "nb" && rc.model_kind != "logreg" &&
      rc.model_kind != "svm" && rc.model_kind != "lstm")
    throw UsageError("unknown model kind \"" + rc.model_kind +
                     "\" (expected nb, logreg, svm or lstm)");
  const ModelKind kind = model_kind_from_name(rc.model_kind);
  require_file(rc.train_path, "train");
  const std::string eval_path = eval_input.empty() ? rc.train_path : eval_input;
  require_file(eval_path, "evaluation input");
  if (kind == ModelKind::Lstm) require_file(rc.embeddings_path, "embeddings");

  const DatasetFormat fmt = parse_format(rc.format);
  const NormalizerConfig cfg = build_normalizer(rc);
  Dataset train = load_dataset(rc.train_path, fmt, SplitTag::Train);
  if (train.records.empty()) fail("training set is empty");
  Dataset eval_set = load_dataset(eval_path, fmt, SplitTag::Train);

  std::vector<TokenStream> streams;
  std::vector<Label> labels;
  streams.reserve(train.records.size());
  for (const LabeledSentence& rec : train.records) {
    streams.push_back(normalized_tokens(rec.text, cfg));
    labels.push_back(rec.label);
  }

  ModelBundle bundle;
  bundle.kind = kind;
  bundle.normalizer_fingerprint = cfg.fingerprint();
  Vocabulary vocab;
  EmbeddingTable embeddings;
  std::vector<double> loss_log;

  if (kind == ModelKind::Lstm) {
    embeddings = load_embeddings(rc.embeddings_path, rc.embedding_dim);
    bundle.vectorizer = VectorizerKind::Embeddings;
    bundle.features_fingerprint = embeddings.fingerprint();
    LSTMShape shape;
    shape.input_dim = embeddings.dim();
    shape.hidden_units = rc.hidden_units;
    shape.max_seq_len = rc.max_seq_len;
    LSTMHyperparams hp;
    hp.learning_rate = rc.lstm_learning_rate;
    hp.decay = rc.decay;
    hp.epochs = rc.lstm_epochs;
    hp.clip_norm = rc.clip_norm;
    hp.seed = rc.seed;
    LSTMTrainResult r = lstm_fit(LSTMClassifier::init(shape, rc.seed), streams,
                                 labels, embeddings, hp);
    loss_log = r.epoch_loss;
    bundle.model = std::move(r.model);
  } else {
    VectorizerOptions opts;
    opts.min_df = rc.min_df;
    opts.ngram_max = rc.ngram_max;
    vocab = Vocabulary::fit(streams, opts);
    bundle.features_fingerprint = vocab.fingerprint();
    bundle.vectorizer = kind == ModelKind::Svm ? VectorizerKind::Tfidf
                                               : VectorizerKind::Count;
    std::vector<SparseVector> features;
    features.reserve(streams.size());
    for (const TokenStream& ts : streams)
      features.push_back(featurize(ts, vocab, bundle.vectorizer));

    if (kind == ModelKind::NaiveBayes) {
      bundle.model = nb_fit(features, labels, vocab.size(), rc.alpha);
    } else {
      LinearHyperparams hp;
      hp.l2 = rc.l2;
      hp.learning_rate = rc.learning_rate;
      hp.decay = rc.decay;
      hp.epochs = rc.epochs;
      hp.seed = rc.seed;
      LinearModel m = kind == ModelKind::LogReg
                          ? logistic_fit(features, labels, vocab.size(), hp)
                          : svm_fit(features, labels, vocab.size(), hp);
      loss_log = m.loss_history;
      bundle.model = std::move(m);
    }
  }

  ensure_out_dir(rc.out_dir);
  save_model(bundle, rc.out_dir + "/model.txt");
  save_normalizer_config(cfg, rc.out_dir + "/normalizer.json");
  if (kind != ModelKind::Lstm) vocab.save(rc.out_dir + "/vocab.tsv");
  if (!loss_log.empty()) write_loss_log(rc.out_dir + "/train_log.tsv", loss_log);

  // Training-set evaluation report.
  LoadedModel lm;
  lm.bundle = std::move(bundle);
  lm.normalizer = cfg;
  lm.vocab = std::move(vocab);
  lm.embeddings = std::move(embeddings);
  std::vector<Prediction> preds;
  preds.reserve(eval_set.records.size());
  for (const LabeledSentence& rec : eval_set.records)
    preds.push_back(predict_record(lm, rec.id, rec.text));
  EvalReport report = evaluate(eval_set, preds);
  write_report_files(rc.out_dir + "/train", report);

  std::cout << "trained " << model_kind_name(kind) << " on "
            << train.records.size() << " records; training F1 "
            << fmt_double(report.f1) << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& rc, const std::string& model_path,
                 const std::string& input_path, const std::string& vocab_path,
                 const std::string& normalizer_path) {
  require_file(input_path, "input dataset");
  LoadedModel lm = load_for_inference(model_path, vocab_path, normalizer_path,
                                      rc.embeddings_path);
  Dataset gold = load_dataset(input_path, parse_format(rc.format));

  std::vector<Prediction> preds;
  preds.reserve(gold.records.size());
  for (const LabeledSentence& rec : gold.records)
    preds.push_back(predict_record(lm, rec.id, rec.text));
  EvalReport report = evaluate(gold, preds);

  ensure_out_dir(rc.out_dir);
  write_report_files(rc.out_dir + "/eval", report);
  std::cout << "evaluated " << gold.records.size() << " records; F1 "
            << fmt_double(report.f1) << " precision "
            << fmt_double(report.precision) << " recall "
            << fmt_double(report.recall) << "\n";
  return kExitOk;
}

int cmd_analyze(const RunConfig& rc, const std::string& model_path,
                const std::string& input_path, const std::string& vocab_path,
                const std::string& normalizer_path,
                const std::vector<std::string>& keywords,
                std::size_t exemplar_cap) {
  require_file(input_path, "input dataset");
  LoadedModel lm = load_for_inference(model_path, vocab_path, normalizer_path,
                                      rc.embeddings_path);
  Dataset gold = load_dataset(input_path, parse_format(rc.format));

  std::vector<Prediction> preds;
  preds.reserve(gold.records.size());
  for (const LabeledSentence& rec : gold.records)
    preds.push_back(predict_record(lm, rec.id, rec.text));
  EvalReport report = evaluate(gold, preds);
  const std::vector<std::string>& kws =
      keywords.empty() ? default_keywords() : keywords;
  KeywordReport kr =
      keyword_analysis(report, gold, kws, lm.normalizer, exemplar_cap);

  ensure_out_dir(rc.out_dir);
  export_confusion(report.matrix, rc.out_dir + "/analysis_confusion.csv");

  ordered_json doc;
  doc["version"] = 1;
  doc["applicable"] = kr.applicable;
  doc["n_false_positives"] = kr.n_false_positives;
  doc["fraction_fp_with_any_keyword"] = kr.fraction_fp_with_any_keyword;
  ordered_json per;
  for (const std::string& k : kws) {
    std::string lower = k;
    for (char& c : lower)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (kr.per_keyword_fraction.count(lower))
      per[lower] = kr.per_keyword_fraction.at(lower);
  }
  doc["per_keyword_fraction"] = per;
  auto exemplars = [&](const std::vector<RecordOutcome>& list) {
    ordered_json arr = ordered_json::array();
    for (const RecordOutcome& o : list) {
      ordered_json row;
      row["id"] = o.id;
      if (o.decision_value) row["decision_value"] = *o.decision_value;
      arr.push_back(row);
    }
    return arr;
  };
  doc["false_positive_exemplars"] = exemplars(kr.fp_exemplars);
  doc["false_negative_exemplars"] = exemplars(kr.fn_exemplars);
  std::ofstream json_out(rc.out_dir + "/analysis.json", std::ios::binary);
  json_out << doc.dump(2) << "\n";

  std::ostringstream txt;
  txt << render_confusion(report.matrix) << "\n";
  if (!kr.applicable) {
    txt << "keyword analysis not applicable: no false positives\n";
  } else {
    txt << "false positives: " << kr.n_false_positives << "\n";
    txt << "fraction with any keyword: "
        << fmt_double(kr.fraction_fp_with_any_keyword)
        << "  (reported 0.77 in the reference experiments)\n";
    for (const auto& [k, v] : kr.per_keyword_fraction)
      txt << "  " << std::left << std::setw(12) << k << fmt_double(v) << "\n";
  }
  std::ofstream txt_out(rc.out_dir + "/analysis.txt", std::ios::binary);
  txt_out << txt.str();
  if (!json_out || !txt_out) fail("failed writing analysis files");

  std::cout << "analysis: " << kr.n_false_positives << " false positives";
  if (kr.applicable)
    std::cout << ", keyword fraction "
              << fmt_double(kr.fraction_fp_with_any_keyword);
  std::cout << "\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& rc, const std::string& model_path,
                const std::string& vocab_path,
                const std::string& normalizer_path) {
  LoadedModel lm = load_for_inference(model_path, vocab_path, normalizer_path,
                                      rc.embeddings_path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(std::cin, line)) {
    Prediction p = predict_record(lm, "stdin-" + std::to_string(n++), line);
    std::cout << label_name(p.label) << "\n";
  }
  return kExitOk;
}

int cmd_normalize(const RunConfig& rc) {
  const NormalizerConfig cfg = build_normalizer(rc);
  std::string line;
  while (std::getline(std::cin, line)) std::cout << preprocess(line, cfg) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"suggestion-mining pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  if (const char* env = std::getenv("SUGGEST_CONFIG")) config_path = env;
  app.add_option("--config", config_path,
                 "JSON run configuration (default: $SUGGEST_CONFIG)");

  // Flag values that override the config file when given.
  std::string flag_input, flag_trial, flag_out, flag_format, flag_model_kind;
  std::string flag_model, flag_vocab, flag_normalizer, flag_embeddings;
  std::string flag_eval_input;
  std::vector<std::string> flag_keywords;
  std::size_t flag_exemplars = 10;
  std::int64_t flag_seed = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", flag_input, "input dataset file");
    sub->add_option("--out-dir", flag_out, "output directory");
    sub->add_option("--seed", flag_seed, "RNG seed");
    sub->add_option("--format", flag_format, "dataset format (csv|tsv[:header|:noheader])");
  };

  CLI::App* prepare = app.add_subcommand(
      "prepare", "normalize and rebalance the training data");
  prepare->fallthrough();
  add_common(prepare);
  prepare->add_option("--trial", flag_trial, "trial split file");

  CLI::App* train =
      app.add_subcommand("train", "fit a classifier on prepared data");
  train->fallthrough();
  add_common(train);
  train->add_option("--model-kind", flag_model_kind,
                    "nb | logreg | svm | lstm");
  train->add_option("--embeddings", flag_embeddings,
                    "embedding file (lstm only)");
  std::size_t flag_embedding_dim = 0;
  train->add_option("--embedding-dim", flag_embedding_dim,
                    "expected embedding dimension (default 300)");
  train->add_option("--eval-input", flag_eval_input,
                    "dataset for the training report (default: --input)");

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "score a trained model on a dataset");
  evaluate_cmd->fallthrough();
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--model", flag_model, "model file")->required();
  evaluate_cmd->add_option("--vocab", flag_vocab, "vocabulary file");
  evaluate_cmd->add_option("--normalizer-config", flag_normalizer,
                           "normalizer config JSON");
  evaluate_cmd->add_option("--embeddings", flag_embeddings,
                           "embedding file (lstm only)");

  CLI::App* analyze =
      app.add_subcommand("analyze", "keyword error analysis of a trained model");
  analyze->fallthrough();
  add_common(analyze);
  analyze->add_option("--model", flag_model, "model file")->required();
  analyze->add_option("--vocab", flag_vocab, "vocabulary file");
  analyze->add_option("--normalizer-config", flag_normalizer,
                      "normalizer config JSON");
  analyze->add_option("--embeddings", flag_embeddings,
                      "embedding file (lstm only)");
  analyze->add_option("--keywords", flag_keywords,
                      "keywords to search for (default: the reported set)");
  analyze->add_option("--exemplars", flag_exemplars, "exemplar list cap");

  CLI::App* predict = app.add_subcommand(
      "predict", "read sentences on stdin, write one label per line");
  predict->fallthrough();
  predict->add_option("--model", flag_model, "model file")->required();
  predict->add_option("--vocab", flag_vocab, "vocabulary file");
  predict->add_option("--normalizer-config", flag_normalizer,
                      "normalizer config JSON");
  predict->add_option("--embeddings", flag_embeddings,
                      "embedding file (lstm only)");

  CLI::App* normalize_cmd = app.add_subcommand(
      "normalize", "filter mode: one sentence per line -> normalized line");
  normalize_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig rc = load_run_config(config_path);
    if (!flag_input.empty()) rc.train_path = flag_input;
    if (!flag_trial.empty()) rc.trial_path = flag_trial;
    if (!flag_out.empty()) rc.out_dir = flag_out;
    if (!flag_format.empty()) rc.format = flag_format;
    if (!flag_model_kind.empty()) rc.model_kind = flag_model_kind;
    if (!flag_embeddings.empty()) rc.embeddings_path = flag_embeddings;
    if (flag_seed >= 0) rc.seed = static_cast<std::uint64_t>(flag_seed);
    if (flag_embedding_dim > 0) rc.embedding_dim = flag_embedding_dim;

    if (prepare->parsed()) return cmd_prepare(rc);
    if (train->parsed()) return cmd_train(rc, flag_eval_input);
    if (evaluate_cmd->parsed())
      return cmd_evaluate(rc, flag_model, rc.train_path, flag_vocab,
                          flag_normalizer);
    if (analyze->parsed())
      return cmd_analyze(rc, flag_model, rc.train_path, flag_vocab,
                         flag_normalizer, flag_keywords, flag_exemplars);
    if (predict->parsed())
      return cmd_predict(rc, flag_model, flag_vocab, flag_normalizer);
    if (normalize_cmd->parsed()) return cmd_normalize(rc);
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
