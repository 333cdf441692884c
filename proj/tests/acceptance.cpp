// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Dataset-dependent criteria run against the official
// SemEval files when $SUGGEST_OFFICIAL_DIR (or data/official/) provides
// train.csv/test.csv; otherwise they run their documented substitutes and say
// so.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "suggest/corpus.hpp"
#include "suggest/error.hpp"
#include "suggest/eval_report.hpp"
#include "suggest/features.hpp"
#include "suggest/fingerprint.hpp"
#include "suggest/linear_models.hpp"
#include "suggest/model_io.hpp"
#include "suggest/neural.hpp"
#include "suggest/normalize.hpp"
#include "suggest/rng.hpp"

namespace fs = std::filesystem;
using namespace suggest;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool pass, const std::string& what,
            double elapsed_s) {
  std::ostringstream line;
  line << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": "
       << what << " (" << std::fixed << std::setprecision(2) << elapsed_s
       << "s)";
  std::cout << line.str() << std::endl;
  if (!pass) ++g_failures;
}

void note(int criterion, const std::string& what) {
  std::cout << "[NOTE] criterion " << criterion << ": " << what << std::endl;
}

std::string data_dir() {
  const char* env = std::getenv("SUGGEST_DATA");
  return env ? env : "data";
}

// Official SemEval Sub-Task A files, when the user has dropped them in.
struct OfficialData {
  bool available = false;
  std::string train_path;
  std::string test_path;
};

OfficialData find_official() {
  OfficialData od;
  std::vector<std::string> candidates;
  if (const char* env = std::getenv("SUGGEST_OFFICIAL_DIR"))
    candidates.push_back(env);
  candidates.push_back(data_dir() + "/official");
  for (const std::string& dir : candidates) {
    const std::string train = dir + "/train.csv";
    const std::string test = dir + "/test.csv";
    if (fs::exists(train) && fs::exists(test)) {
      od.available = true;
      od.train_path = train;
      od.test_path = test;
      return od;
    }
  }
  return od;
}

// ---------------------------------------------------------------------------
// Synthetic forum-style corpus for the dataset-dependent substitutes
// ---------------------------------------------------------------------------

struct Synthetic {
  std::vector<TokenStream> train_streams, test_streams;
  std::vector<Label> train_labels, test_labels;
  Dataset test_gold;
  std::set<std::string> vocabulary;
};

TokenStream stream_of(const std::vector<std::string>& words) {
  TokenStream ts;
  for (const std::string& w : words) {
    Token t;
    t.surface = w;
    ts.tokens.push_back(t);
  }
  return ts;
}

Synthetic make_synthetic(std::size_t n_train, std::size_t n_test,
                         std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> pos_templates = {
      {"please", "add", "X", "to", "the", "Y"},
      {"you", "should", "support", "X", "in", "Y"},
      {"it", "would", "be", "great", "if", "Y", "had", "X"},
      {"could", "you", "make", "the", "Y", "X"},
      {"i", "want", "an", "option", "for", "X"},
      {"add", "a", "way", "to", "X", "the", "Y"},
      {"the", "Y", "needs", "X", "support"},
  };
  static const std::vector<std::vector<std::string>> neg_templates = {
      {"the", "Y", "crashes", "when", "i", "open", "X"},
      {"i", "love", "the", "new", "X", "in", "the", "Y"},
      {"the", "X", "works", "fine", "on", "my", "Y"},
      {"the", "update", "broke", "X", "on", "Y"},
      {"the", "Y", "is", "slow", "since", "the", "X", "update"},
      {"my", "Y", "shows", "X", "twice"},
      {"the", "X", "in", "the", "Y", "looks", "great"},
      {"support", "told", "me", "to", "reset", "the", "X"},
  };
  static const std::vector<std::string> nouns = {
      "toolbar",  "editor", "sidebar", "search", "login",  "profile",
      "gallery",  "export", "sync",    "theme",  "widget", "cache",
      "renderer", "filter", "preview", "backup", "player", "installer"};
  static const std::vector<std::string> devices = {
      "app", "phone", "tablet", "desktop", "browser", "build", "client"};

  Synthetic s;
  Rng rng(seed);
  auto emit = [&](std::size_t n, std::vector<TokenStream>* streams,
                  std::vector<Label>* labels, Dataset* gold,
                  const std::string& prefix) {
    for (std::size_t i = 0; i < n; ++i) {
      // Imbalanced like the source distribution: ~1 positive per 4 records.
      const bool pos = rng.next_below(4) == 0;
      const auto& pool = pos ? pos_templates : neg_templates;
      std::vector<std::string> words = pool[rng.next_below(pool.size())];
      for (std::string& w : words) {
        if (w == "X") w = nouns[rng.next_below(nouns.size())];
        else if (w == "Y") w = devices[rng.next_below(devices.size())];
      }
      // Occasional filler so sentences differ in length.
      if (rng.next_below(3) == 0)
        words.push_back(nouns[rng.next_below(nouns.size())]);
      // 4% label noise keeps scores away from 1.0.
      Label label = pos ? Label::Suggestion : Label::NonSuggestion;
      if (rng.next_below(25) == 0)
        label = label == Label::Suggestion ? Label::NonSuggestion
                                           : Label::Suggestion;
      for (const std::string& w : words) s.vocabulary.insert(w);
      streams->push_back(stream_of(words));
      labels->push_back(label);
      if (gold) {
        std::string text;
        for (std::size_t k = 0; k < words.size(); ++k) {
          if (k) text += ' ';
          text += words[k];
        }
        gold->records.push_back(
            {prefix + std::to_string(i), text, label});
      }
    }
  };
  emit(n_train, &s.train_streams, &s.train_labels, nullptr, "tr");
  emit(n_test, &s.test_streams, &s.test_labels, &s.test_gold, "te");
  return s;
}

EmbeddingTable hashed_embeddings(const std::set<std::string>& vocab,
                                 std::size_t dim) {
  EmbeddingTable t(dim, fnv1a64("synthetic-embeddings"));
  for (const std::string& w : vocab) {
    Rng rng(fnv1a64(w));
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-0.8, 0.8);
    t.insert(w, std::move(v));
  }
  return t;
}

double f1_of(const std::vector<Label>& gold, const std::vector<Label>& pred) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == Label::Suggestion;
    const bool p = pred[i] == Label::Suggestion;
    if (g && p) ++tp;
    else if (!g && p) ++fp;
    else if (g && !p) ++fn;
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

// ---------------------------------------------------------------------------
// Criterion 1: Table-2 golden rows, byte-exact, < 1 s
// ---------------------------------------------------------------------------

void criterion_1() {
  auto start = Clock::now();
  const std::string row1_in = "ie9mobile does not do this :(";
  const std::string row1_out = "ie mobile does not do this <emsad>";
  const std::string row2_in =
      "For example if you want a feed for every Tumblr feed containing the "
      "hashtags \" \"#retail #design \" \"; \" \"http://www.tumblr "
      ".com/tagged/retail+ design\"\"; would be a feedly feed.\"";
  const std::string row2_out =
      "For example if you want a feed for every tumblr feed containing the "
      "hashtags <hashtag> retail <hashtag> design <url> would be a feedly "
      "feed";
  const bool ok = preprocess(row1_in) == row1_out &&
                  preprocess(row2_in) == row2_out;
  const double t = seconds_since(start);
  report(1, ok && t < 1.0,
         "normalization golden rows byte-exact through preprocess", t);
}

// ---------------------------------------------------------------------------
// Criterion 2: oversampling arithmetic
// ---------------------------------------------------------------------------

void criterion_2(const OfficialData& od) {
  auto start = Clock::now();
  bool ok = true;
  std::string what;
  if (od.available) {
    Dataset train = load_dataset(od.train_path, {}, SplitTag::Train);
    auto before = class_distribution(train);
    Dataset over = oversample(train, 42);
    auto after = class_distribution(over);
    ok = before[Label::Suggestion] == 2085 &&
         before[Label::NonSuggestion] == 6415 &&
         after[Label::Suggestion] == 4170 &&
         after[Label::NonSuggestion] == 6415;
    what = "official train distribution 2085/6415 -> 4170/6415";
    const std::string trial_path =
        fs::path(od.train_path).parent_path() / "trial.csv";
    if (fs::exists(trial_path)) {
      auto trial = class_distribution(load_dataset(trial_path, {}, SplitTag::Trial));
      if (trial[Label::Suggestion] != 296 ||
          trial[Label::NonSuggestion] != 296) {
        note(2, "official trial distribution is not 296/296");
        ok = false;
      }
    }
  } else {
    note(2, "official train file unavailable; running the property substitute");
    Rng rng(811);
    for (int round = 0; round < 200 && ok; ++round) {
      const std::size_t pos = 1 + rng.next_below(500);
      const std::size_t neg = rng.next_below(1500);
      Dataset d;
      d.split_tag = SplitTag::Train;
      for (std::size_t i = 0; i < pos; ++i)
        d.records.push_back({"p" + std::to_string(i), "x", Label::Suggestion});
      for (std::size_t i = 0; i < neg; ++i)
        d.records.push_back(
            {"n" + std::to_string(i), "y", Label::NonSuggestion});
      Dataset o = oversample(d, rng.next_u64());
      auto dist = class_distribution(o);
      std::set<std::string> ids;
      for (const auto& rec : o.records) ids.insert(rec.id);
      ok = dist[Label::Suggestion] == 2 * pos &&
           dist[Label::NonSuggestion] == neg &&
           ids.size() == o.records.size();
    }
    what = "oversampling doubles positives on 200 random synthetic datasets";
  }
  report(2, ok, what, seconds_since(start));
}

// ---------------------------------------------------------------------------
// Criterion 3: classical-model reproduction / synthetic substitute, < 5 min
// ---------------------------------------------------------------------------

struct TrainedSparse {
  ModelBundle bundle;
  Vocabulary vocab;
  double test_f1 = 0.0;
};

TrainedSparse train_sparse_model(ModelKind kind,
                                 const std::vector<TokenStream>& train,
                                 const std::vector<Label>& labels,
                                 const std::vector<TokenStream>& test,
                                 const std::vector<Label>& test_labels) {
  TrainedSparse out;
  out.vocab = Vocabulary::fit(train);
  out.bundle.kind = kind;
  out.bundle.vectorizer =
      kind == ModelKind::Svm ? VectorizerKind::Tfidf : VectorizerKind::Count;
  auto featurize = [&](const TokenStream& ts) {
    return out.bundle.vectorizer == VectorizerKind::Tfidf
               ? tfidf_vector(ts, out.vocab)
               : count_vector(ts, out.vocab);
  };
  std::vector<SparseVector> x;
  x.reserve(train.size());
  for (const TokenStream& ts : train) x.push_back(featurize(ts));

  if (kind == ModelKind::NaiveBayes) {
    out.bundle.model = nb_fit(x, labels, out.vocab.size(), 1.0);
  } else {
    LinearHyperparams hp;
    LinearModel m = kind == ModelKind::LogReg
                        ? logistic_fit(x, labels, out.vocab.size(), hp)
                        : svm_fit(x, labels, out.vocab.size(), hp);
    out.bundle.model = std::move(m);
  }

  std::vector<Label> pred;
  pred.reserve(test.size());
  for (const TokenStream& ts : test)
    pred.push_back(label_from_decision(out.bundle.decision_value(featurize(ts))));
  out.test_f1 = f1_of(test_labels, pred);
  return out;
}

// Oversample parallel stream/label arrays the same way corpus::oversample
// does for datasets.
void oversample_streams(std::vector<TokenStream>* streams,
                        std::vector<Label>* labels, std::uint64_t seed) {
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < streams->size(); ++i) {
    index.push_back(i);
    if ((*labels)[i] == Label::Suggestion) index.push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(index);
  std::vector<TokenStream> s2;
  std::vector<Label> l2;
  for (std::size_t i : index) {
    s2.push_back((*streams)[i]);
    l2.push_back((*labels)[i]);
  }
  *streams = std::move(s2);
  *labels = std::move(l2);
}

void criterion_3_and_7(const OfficialData& od) {
  auto start = Clock::now();

  // Criterion 7's fixture part is exact and always runs.
  bool fixture_ok = true;
  {
    Dataset corpus;
    corpus.records.push_back({"f1", "it would be nice", Label::NonSuggestion});
    corpus.records.push_back({"f2", "this would help", Label::NonSuggestion});
    corpus.records.push_back({"f3", "would work maybe", Label::NonSuggestion});
    corpus.records.push_back({"f4", "the app crashes", Label::NonSuggestion});
    corpus.records.push_back({"t1", "please add this", Label::Suggestion});
    std::vector<Prediction> preds = {{"f1", Label::Suggestion, 1.0},
                                     {"f2", Label::Suggestion, 2.0},
                                     {"f3", Label::Suggestion, 3.0},
                                     {"f4", Label::Suggestion, 4.0},
                                     {"t1", Label::Suggestion, 5.0}};
    EvalReport r = evaluate(corpus, preds);
    KeywordReport kr = keyword_analysis(r, corpus);
    fixture_ok = kr.applicable && kr.n_false_positives == 4 &&
                 std::abs(kr.fraction_fp_with_any_keyword - 0.75) < 1e-15 &&
                 std::abs(kr.per_keyword_fraction.at("would") - 0.75) < 1e-15;

    Dataset no_fp_corpus;
    no_fp_corpus.records.push_back({"a", "crashes", Label::NonSuggestion});
    EvalReport clean =
        evaluate(no_fp_corpus, {{"a", Label::NonSuggestion, std::nullopt}});
    KeywordReport empty_kr = keyword_analysis(clean, no_fp_corpus);
    fixture_ok = fixture_ok && !empty_kr.applicable;
  }

  if (od.available) {
    const NormalizerConfig& cfg = default_config();
    Dataset train_raw = load_dataset(od.train_path, {}, SplitTag::Train);
    Dataset test_raw = load_dataset(od.test_path, {}, SplitTag::Test);

    auto streams_of = [&](const Dataset& d) {
      std::vector<TokenStream> out;
      out.reserve(d.records.size());
      for (const LabeledSentence& rec : d.records)
        out.push_back(normalize(tokenize(rec.text, cfg), cfg));
      return out;
    };
    std::vector<TokenStream> train_streams = streams_of(train_raw);
    std::vector<Label> train_labels;
    for (const auto& rec : train_raw.records) train_labels.push_back(rec.label);
    oversample_streams(&train_streams, &train_labels, 42);

    std::vector<TokenStream> test_streams = streams_of(test_raw);
    std::vector<Label> test_labels;
    for (const auto& rec : test_raw.records) test_labels.push_back(rec.label);

    TrainedSparse nb = train_sparse_model(ModelKind::NaiveBayes, train_streams,
                                          train_labels, test_streams,
                                          test_labels);
    TrainedSparse lr = train_sparse_model(ModelKind::LogReg, train_streams,
                                          train_labels, test_streams,
                                          test_labels);
    TrainedSparse svm = train_sparse_model(ModelKind::Svm, train_streams,
                                           train_labels, test_streams,
                                           test_labels);
    note(3, "official test F1: nb " + std::to_string(nb.test_f1) + ", logreg " +
                std::to_string(lr.test_f1) + ", svm " +
                std::to_string(svm.test_f1));
    const bool band_ok = std::abs(nb.test_f1 - 0.517) <= 0.05 &&
                         std::abs(lr.test_f1 - 0.572) <= 0.05 &&
                         std::abs(svm.test_f1 - 0.576) <= 0.05;

    // LSTM: beat NB on the same split or report the documented gap.
    bool lstm_reported = true;
    const char* emb_env = std::getenv("SUGGEST_EMBEDDINGS");
    if (emb_env && fs::exists(emb_env)) {
      EmbeddingTable emb = load_embeddings(emb_env);
      LSTMShape shape;
      shape.input_dim = emb.dim();
      LSTMHyperparams hp;
      hp.epochs = 5;  // keeps the criterion inside its runtime budget
      LSTMTrainResult r = lstm_fit(LSTMClassifier::init(shape, 42),
                                   train_streams, train_labels, emb, hp);
      std::vector<Label> pred;
      for (const TokenStream& ts : test_streams)
        pred.push_back(lstm_predict(r.model, ts, emb));
      const double lstm_f1 = f1_of(test_labels, pred);
      if (lstm_f1 > nb.test_f1)
        note(3, "lstm test F1 " + std::to_string(lstm_f1) + " beats nb");
      else
        note(3, "lstm test F1 " + std::to_string(lstm_f1) +
                    " does not beat nb " + std::to_string(nb.test_f1) +
                    "; gap documented here as required");
    } else {
      note(3, "no $SUGGEST_EMBEDDINGS file; lstm comparison skipped");
    }
    report(3, band_ok && lstm_reported,
           "nb/logreg/svm test F1 within +/-0.05 of 0.517/0.572/0.576",
           seconds_since(start));

    // Criterion 7 on the official data with the best trained model.
    auto kw_start = Clock::now();
    const TrainedSparse& best =
        svm.test_f1 >= lr.test_f1
            ? (svm.test_f1 >= nb.test_f1 ? svm : nb)
            : (lr.test_f1 >= nb.test_f1 ? lr : nb);
    std::vector<Prediction> train_preds;
    std::vector<TokenStream> orig_train = streams_of(train_raw);
    for (std::size_t i = 0; i < train_raw.records.size(); ++i) {
      SparseVector x = best.bundle.vectorizer == VectorizerKind::Tfidf
                           ? tfidf_vector(orig_train[i], best.vocab)
                           : count_vector(orig_train[i], best.vocab);
      const double dv = best.bundle.decision_value(x);
      train_preds.push_back(
          {train_raw.records[i].id, label_from_decision(dv), dv});
    }
    EvalReport train_report = evaluate(train_raw, train_preds);
    KeywordReport kr = keyword_analysis(train_report, train_raw);
    if (!kr.applicable) {
      // The band check needs false positives to exist; a model that fits its
      // training set without any is reported as not-applicable, not failed.
      note(7, "no training-set false positives; keyword fraction not "
              "applicable");
    } else {
      const double frac = kr.fraction_fp_with_any_keyword;
      note(7, "fraction of training false positives with keywords: " +
                  std::to_string(frac) + " (reported value 0.77)");
      if (std::abs(frac - 0.77) > 0.15)
        note(7, "outside the 0.77 +/- 0.15 band; non-fatal (different model "
                "family than the reference system)");
    }
    report(7, fixture_ok,
           "keyword fixtures exact; official fraction reported next to 0.77",
           seconds_since(kw_start));
  } else {
    note(3, "official train/test files unavailable; running the synthetic "
            "substitute (Table-3 band check requires the official data)");
    Synthetic s = make_synthetic(1500, 400, 99);
    std::vector<TokenStream> train_streams = s.train_streams;
    std::vector<Label> train_labels = s.train_labels;
    oversample_streams(&train_streams, &train_labels, 42);

    TrainedSparse nb =
        train_sparse_model(ModelKind::NaiveBayes, train_streams, train_labels,
                           s.test_streams, s.test_labels);
    TrainedSparse lr =
        train_sparse_model(ModelKind::LogReg, train_streams, train_labels,
                           s.test_streams, s.test_labels);
    TrainedSparse svm =
        train_sparse_model(ModelKind::Svm, train_streams, train_labels,
                           s.test_streams, s.test_labels);

    EmbeddingTable emb = hashed_embeddings(s.vocabulary, 16);
    LSTMShape shape;
    shape.input_dim = 16;
    shape.hidden_units = 16;
    shape.max_seq_len = 16;
    LSTMHyperparams hp;
    hp.learning_rate = 0.2;
    hp.epochs = 8;
    LSTMTrainResult lstm = lstm_fit(LSTMClassifier::init(shape, 42),
                                    train_streams, train_labels, emb, hp);
    std::vector<Label> lstm_pred;
    for (const TokenStream& ts : s.test_streams)
      lstm_pred.push_back(lstm_predict(lstm.model, ts, emb));
    const double lstm_f1 = f1_of(s.test_labels, lstm_pred);

    note(3, "synthetic test F1: nb " + std::to_string(nb.test_f1) +
                ", logreg " + std::to_string(lr.test_f1) + ", svm " +
                std::to_string(svm.test_f1) + ", lstm " +
                std::to_string(lstm_f1));
    if (lstm_f1 > nb.test_f1)
      note(3, "lstm beats nb on the synthetic split");
    else
      note(3, "lstm does not beat nb on the synthetic split; gap " +
                  std::to_string(nb.test_f1 - lstm_f1) + " documented");

    // The label-noise rate caps achievable F1 well below 1; all four models
    // must still clearly learn the task.
    const double floor = 0.75;
    const bool ok = nb.test_f1 > floor && lr.test_f1 > floor &&
                    svm.test_f1 > floor && lstm_f1 > floor &&
                    seconds_since(start) < 300.0;
    report(3, ok,
           "substitute: all four models learn the synthetic task (floor 0.75)",
           seconds_since(start));

    // Criterion 7 substitute: fixtures are exact; the 0.77-band part needs
    // the official data.
    auto kw_start = Clock::now();
    note(7, "official data unavailable; band check against 0.77 skipped, "
            "fixture checks run");
    report(7, fixture_ok, "keyword-analysis fixtures exact",
           seconds_since(kw_start));
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: exhaustive NB oracle sweep, < 10 s
// ---------------------------------------------------------------------------

double nb_oracle_decision(const std::vector<SparseVector>& docs,
                          const std::vector<Label>& labels, std::size_t dim,
                          double alpha, const SparseVector& query) {
  double score[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    const Label want = c == 1 ? Label::Suggestion : Label::NonSuggestion;
    std::size_t n_docs = 0;
    std::vector<double> counts(dim, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (labels[i] != want) continue;
      ++n_docs;
      for (const auto& [idx, v] : docs[i].entries) {
        counts[idx] += v;
        total += v;
      }
    }
    score[c] = std::log(static_cast<double>(n_docs) /
                        static_cast<double>(docs.size()));
    for (const auto& [idx, v] : query.entries)
      score[c] += v * std::log((counts[idx] + alpha) /
                               (total + alpha * static_cast<double>(dim)));
  }
  return score[1] - score[0];
}

void criterion_4() {
  auto start = Clock::now();
  bool ok = true;
  double worst = 0.0;
  std::size_t checked = 0;
  Rng rng(20250315);
  for (std::size_t n_docs = 2; n_docs <= 5 && ok; ++n_docs) {
    for (std::size_t n_terms = 1; n_terms <= 6 && ok; ++n_terms) {
      // Every labeling with both classes present.
      for (std::uint32_t bits = 1; bits + 1 < (1u << n_docs) && ok; ++bits) {
        std::vector<Label> labels;
        for (std::size_t i = 0; i < n_docs; ++i)
          labels.push_back((bits >> i) & 1 ? Label::Suggestion
                                           : Label::NonSuggestion);
        // Three seeded count matrices per configuration, two alphas.
        for (int rep = 0; rep < 3 && ok; ++rep) {
          std::vector<SparseVector> docs;
          for (std::size_t i = 0; i < n_docs; ++i) {
            SparseVector x;
            for (std::uint32_t t = 0; t < n_terms; ++t) {
              const double c = static_cast<double>(rng.next_below(3));
              if (c > 0) x.entries.push_back({t, c});
            }
            docs.push_back(std::move(x));
          }
          for (double alpha : {0.5, 1.0}) {
            NBModel m = nb_fit(docs, labels, n_terms, alpha);
            for (const SparseVector& q : docs) {
              const double got = nb_decision_value(m, q);
              const double want =
                  nb_oracle_decision(docs, labels, n_terms, alpha, q);
              worst = std::max(worst, std::abs(got - want));
              ++checked;
              if (std::abs(got - want) > 1e-12) ok = false;
            }
          }
        }
      }
    }
  }
  const double t = seconds_since(start);
  note(4, "checked " + std::to_string(checked) +
              " posteriors; worst |difference| " + std::to_string(worst));
  report(4, ok && t < 10.0,
         "nb agrees with the brute-force oracle to 1e-12 on the sweep", t);
}

// ---------------------------------------------------------------------------
// Criterion 5: gradient checks, < 60 s
// ---------------------------------------------------------------------------

bool check_linear_gradients(LossKind kind, double tol, double margin_buffer,
                            std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t dim = 5;
  std::vector<SparseVector> docs;
  std::vector<double> y01;
  for (int i = 0; i < 8; ++i) {
    SparseVector x;
    for (std::uint32_t t = 0; t < dim; ++t)
      if (rng.next_below(3) > 0)
        x.entries.push_back({t, rng.uniform(-2.0, 2.0)});
    docs.push_back(std::move(x));
    y01.push_back(i % 2 ? 1.0 : 0.0);
  }
  std::vector<double> w(dim);
  for (double& x : w) x = rng.uniform(-1.0, 1.0);
  double b = rng.uniform(-0.5, 0.5);

  if (kind == LossKind::Hinge) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      double z = b;
      for (const auto& [idx, v] : docs[i].entries) z += w[idx] * v;
      if (std::abs((y01[i] > 0.5 ? 1.0 : -1.0) * z - 1.0) <= margin_buffer)
        return check_linear_gradients(kind, tol, margin_buffer, seed + 7777);
    }
  }

  const double l2 = 1e-3;
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
  linear_loss_gradient(kind, docs, y01, l2, w, b, &loss, &grad_w, &grad_b);

  const double step = 1e-5;
  for (std::size_t j = 0; j <= dim; ++j) {
    auto probe = [&](double delta) {
      std::vector<double> wp = w;
      double bp = b;
      if (j < dim) wp[j] += delta;
      else bp += delta;
      double l = 0.0;
      linear_loss_gradient(kind, docs, y01, l2, wp, bp, &l, nullptr, nullptr);
      return l;
    };
    const double numeric = (probe(step) - probe(-step)) / (2.0 * step);
    const double analytic = j < dim ? grad_w[j] : grad_b;
    const double err = std::abs(numeric - analytic) /
                       std::max({1.0, std::abs(numeric), std::abs(analytic)});
    if (err >= tol) return false;
  }
  return true;
}

bool check_lstm_gradients(std::uint64_t seed) {
  Rng rng(seed * 104729);
  for (std::size_t len = 1; len <= 5; ++len) {
    LSTMShape shape;
    shape.input_dim = 3;
    shape.hidden_units = 2;
    shape.max_seq_len = 8;
    LSTMClassifier m = LSTMClassifier::init(shape, seed);
    std::vector<std::vector<double>> xs;
    std::vector<bool> mask;
    for (std::size_t t = 0; t < len; ++t) {
      std::vector<double> x(3);
      for (double& v : x) v = rng.uniform(-1.5, 1.5);
      xs.push_back(std::move(x));
      mask.push_back(true);
    }
    const double y = static_cast<double>(rng.next_below(2));

    LSTMForwardCache cache;
    lstm_forward(m, xs, mask, &cache);
    LSTMGradients grads = LSTMGradients::zeros(shape);
    lstm_backward(m, cache, y, &grads);
    const std::vector<double> analytic = grads.flatten();

    std::vector<double> params = m.flatten();
    const double step = 1e-4;
    for (std::size_t j = 0; j < params.size(); ++j) {
      LSTMClassifier probe = m;
      std::vector<double> p = params;
      auto loss_at = [&](double v) {
        p[j] = v;
        probe.unflatten(p);
        const double prob = lstm_forward(probe, xs, mask);
        return -(y * std::log(prob) + (1.0 - y) * std::log(1.0 - prob));
      };
      const double numeric =
          (loss_at(params[j] + step) - loss_at(params[j] - step)) /
          (2.0 * step);
      p[j] = params[j];
      const double err = std::abs(numeric - analytic[j]) /
                         std::max({1.0, std::abs(numeric),
                                   std::abs(analytic[j])});
      if (err >= 1e-3) return false;
    }
  }
  return true;
}

void criterion_5() {
  auto start = Clock::now();
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 25 && ok; ++seed)
    ok = check_linear_gradients(LossKind::Logistic, 1e-4, 0.0, seed);
  for (std::uint64_t seed = 1; seed <= 25 && ok; ++seed)
    ok = check_linear_gradients(LossKind::Hinge, 1e-4, 1e-3, seed);
  for (std::uint64_t seed = 1; seed <= 20 && ok; ++seed)
    ok = check_lstm_gradients(seed);
  const double t = seconds_since(start);
  report(5, ok && t < 60.0,
         "logistic/svm/lstm gradients match finite differences", t);
}

// ---------------------------------------------------------------------------
// Criterion 6: metric identities
// ---------------------------------------------------------------------------

void criterion_6() {
  auto start = Clock::now();
  bool ok = true;
  Rng rng(606);
  for (int round = 0; round < 1000 && ok; ++round) {
    const std::size_t n = 1 + rng.next_below(40);
    Dataset gold;
    std::vector<Prediction> preds;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "r" + std::to_string(i);
      gold.records.push_back({id, "t",
                              rng.next_below(2) ? Label::Suggestion
                                                : Label::NonSuggestion});
      preds.push_back({id,
                       rng.next_below(2) ? Label::Suggestion
                                         : Label::NonSuggestion,
                       std::nullopt});
    }
    EvalReport r = evaluate(gold, preds);
    const double tp = static_cast<double>(r.matrix.tp);
    const double fp = static_cast<double>(r.matrix.fp);
    const double fn = static_cast<double>(r.matrix.fn);
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = p + rec > 0 ? 2 * p * rec / (p + rec) : 0.0;
    ok = std::abs(r.f1 - f1) <= 1e-12 && r.matrix.total() == n;
  }

  // The 2/3 fixture.
  Dataset gold;
  std::vector<Prediction> preds;
  auto add = [&](const std::string& id, Label g, Label pr) {
    gold.records.push_back({id, "t", g});
    preds.push_back({id, pr, std::nullopt});
  };
  add("a", Label::Suggestion, Label::Suggestion);
  add("b", Label::Suggestion, Label::Suggestion);
  add("c", Label::NonSuggestion, Label::Suggestion);
  add("d", Label::Suggestion, Label::NonSuggestion);
  for (int i = 0; i < 6; ++i)
    add("tn" + std::to_string(i), Label::NonSuggestion, Label::NonSuggestion);
  EvalReport r = evaluate(gold, preds);
  ok = ok && std::abs(r.f1 - 2.0 / 3.0) <= 1e-12 &&
       std::abs(r.precision - 2.0 / 3.0) <= 1e-12 &&
       std::abs(r.recall - 2.0 / 3.0) <= 1e-12;

  report(6, ok, "F1 identity on 1000 random vectors and the 2/3 fixture",
         seconds_since(start));
}

// ---------------------------------------------------------------------------
// Criterion 8: totality fuzz + full-pipeline determinism
// ---------------------------------------------------------------------------

std::string random_utf8(Rng& rng, std::size_t max_cps) {
  std::string out;
  const std::size_t n = rng.next_below(max_cps + 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t cp;
    do {
      cp = static_cast<std::uint32_t>(rng.next_below(0x110000));
    } while (cp >= 0xD800 && cp <= 0xDFFF);
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_8() {
  auto start = Clock::now();
  bool ok = true;

  // 10,000 random UTF-8 strings through preprocess without failure, and
  // repeated calls agree.
  Rng rng(88001);
  for (int round = 0; round < 10000 && ok; ++round) {
    const std::string text = random_utf8(rng, 48);
    try {
      const std::string a = preprocess(text);
      ok = preprocess(text) == a;
    } catch (...) {
      ok = false;
    }
  }
  if (!ok) {
    report(8, false, "preprocess fuzz failed", seconds_since(start));
    return;
  }

  // Full pipeline twice through the CLI with a fixed seed; artifacts must be
  // byte-identical.
  const char* cli = std::getenv("SUGGEST_CLI");
  if (!cli) {
    report(8, false, "SUGGEST_CLI not set; cannot run the pipeline twice",
           seconds_since(start));
    return;
  }
  const std::string train_csv = data_dir() + "/demo/train.csv";
  const std::string trial_csv = data_dir() + "/demo/trial.csv";
  const fs::path base =
      fs::temp_directory_path() /
      ("suggestmine-accept-" + std::to_string(rng.next_u64()));
  fs::create_directories(base);
  auto run_pipeline = [&](const std::string& tag) {
    const std::string dir = (base / tag).string();
    std::string cmd = std::string(cli) + " prepare --input " + train_csv +
                      " --trial " + trial_csv + " --seed 42 --out-dir " + dir +
                      "/prep > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return false;
    cmd = std::string(cli) + " train --input " + dir +
          "/prep/train.oversampled.csv --eval-input " + dir +
          "/prep/train.normalized.csv --model-kind logreg --seed 42" +
          " --out-dir " + dir + "/model > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return false;
    cmd = std::string(cli) + " analyze --model " + dir +
          "/model/model.txt --input " + dir +
          "/prep/trial.normalized.csv --out-dir " + dir +
          "/analysis > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  ok = run_pipeline("one") && run_pipeline("two");
  if (ok) {
    for (const char* rel :
         {"prep/train.normalized.csv", "prep/train.oversampled.csv",
          "prep/trial.normalized.csv", "prep/distribution.json",
          "model/model.txt", "model/vocab.tsv", "model/normalizer.json",
          "model/train_log.tsv", "model/train_report.json",
          "model/train_predictions.csv", "analysis/analysis.json",
          "analysis/analysis_confusion.csv"}) {
      const std::string a = slurp((base / "one" / rel).string());
      const std::string b = slurp((base / "two" / rel).string());
      if (a.empty() || a != b) {
        note(8, std::string("artifact differs or missing: ") + rel);
        ok = false;
      }
    }
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  report(8, ok, "10k-string preprocess fuzz + bit-identical pipeline reruns",
         seconds_since(start));
}

}  // namespace

int main() {
  const OfficialData od = find_official();
  std::cout << "official dataset: "
            << (od.available ? od.train_path : "not present (substitutes run)")
            << std::endl;
  try {
    criterion_1();
    criterion_2(od);
    criterion_3_and_7(od);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_8();
  } catch (const std::exception& e) {
    std::cout << "[FAIL] acceptance suite aborted: " << e.what() << std::endl;
    return 1;
  }
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
