#include "suggest/eval_report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "suggest/error.hpp"

namespace suggest {

EvalReport evaluate(const Dataset& gold,
                    const std::vector<Prediction>& predictions) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const Prediction& p : predictions) {
    if (!by_id.emplace(p.id, &p).second)
      fail("evaluate: duplicate prediction for id \"", p.id, "\"");
  }

  std::vector<std::string> missing;
  std::unordered_set<std::string> gold_ids;
  for (const LabeledSentence& rec : gold.records) {
    gold_ids.insert(rec.id);
    if (!by_id.count(rec.id)) missing.push_back(rec.id);
  }
  std::vector<std::string> surplus;
  for (const Prediction& p : predictions)
    if (!gold_ids.count(p.id)) surplus.push_back(p.id);
  if (!missing.empty() || !surplus.empty()) {
    std::ostringstream msg;
    msg << "evaluate: predictions do not cover gold ids exactly;";
    if (!missing.empty()) {
      msg << " missing:";
      for (const std::string& id : missing) msg << " " << id;
      msg << ";";
    }
    if (!surplus.empty()) {
      msg << " surplus:";
      for (const std::string& id : surplus) msg << " " << id;
    }
    throw Error(msg.str());
  }

  EvalReport r;
  for (const LabeledSentence& rec : gold.records) {
    const Prediction& p = *by_id.at(rec.id);
    RecordOutcome o;
    o.id = rec.id;
    o.gold = rec.label;
    o.predicted = p.label;
    o.decision_value = p.decision_value;
    r.outcomes.push_back(std::move(o));
    const bool gold_pos = rec.label == Label::Suggestion;
    const bool pred_pos = p.label == Label::Suggestion;
    if (gold_pos && pred_pos) ++r.matrix.tp;
    else if (!gold_pos && pred_pos) ++r.matrix.fp;
    else if (gold_pos && !pred_pos) ++r.matrix.fn;
    else ++r.matrix.tn;
  }

  const double tp = static_cast<double>(r.matrix.tp);
  const double fp = static_cast<double>(r.matrix.fp);
  const double fn = static_cast<double>(r.matrix.fn);
  if (tp + fp > 0.0) r.precision = tp / (tp + fp);
  else r.degenerate = true;
  if (tp + fn > 0.0) r.recall = tp / (tp + fn);
  else r.degenerate = true;
  if (r.precision + r.recall > 0.0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  else r.degenerate = true;
  return r;
}

const std::vector<std::string>& default_keywords() {
  static const std::vector<std::string> kws = {
      "want", "please", "add", "support", "would", "could", "should", "need"};
  return kws;
}

KeywordReport keyword_analysis(const EvalReport& report, const Dataset& corpus,
                               const std::vector<std::string>& keywords,
                               const NormalizerConfig& cfg,
                               std::size_t exemplar_cap) {
  std::unordered_map<std::string, const LabeledSentence*> text_by_id;
  for (const LabeledSentence& rec : corpus.records)
    text_by_id.emplace(rec.id, &rec);

  KeywordReport kr;
  kr.keywords = keywords;

  std::vector<const RecordOutcome*> fps, fns;
  for (const RecordOutcome& o : report.outcomes) {
    if (o.gold == Label::NonSuggestion && o.predicted == Label::Suggestion)
      fps.push_back(&o);
    else if (o.gold == Label::Suggestion && o.predicted == Label::NonSuggestion)
      fns.push_back(&o);
  }
  kr.n_false_positives = fps.size();
  if (fps.empty()) return kr;  // not applicable; fractions left at zero
  kr.applicable = true;

  std::set<std::string> wanted;
  for (const std::string& k : keywords) {
    std::string lower = k;
    for (char& c : lower)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    wanted.insert(lower);
  }

  std::map<std::string, std::size_t> per_keyword_hits;
  std::size_t any_hits = 0;
  for (const RecordOutcome* o : fps) {
    auto rec = text_by_id.find(o->id);
    if (rec == text_by_id.end())
      fail("keyword_analysis: id \"", o->id, "\" not present in corpus");
    // Matching runs on the normalized token stream so contraction splitting
    // is consistent with training features; normalize is idempotent, so
    // already-normalized corpora are fine too.
    TokenStream ts = normalize(tokenize(rec->second->text, cfg), cfg);
    std::set<std::string> present;
    for (const Token& t : ts.tokens) {
      std::string lower = t.surface;
      for (char& c : lower)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (wanted.count(lower)) present.insert(lower);
    }
    if (!present.empty()) ++any_hits;
    for (const std::string& k : present) ++per_keyword_hits[k];
  }

  const double n_fp = static_cast<double>(fps.size());
  kr.fraction_fp_with_any_keyword = static_cast<double>(any_hits) / n_fp;
  for (const std::string& k : wanted)
    kr.per_keyword_fraction[k] =
        static_cast<double>(per_keyword_hits[k]) / n_fp;

  auto order = [](const RecordOutcome* a, const RecordOutcome* b) {
    const bool has_a = a->decision_value.has_value();
    const bool has_b = b->decision_value.has_value();
    if (has_a && has_b) {
      const double va = std::abs(*a->decision_value);
      const double vb = std::abs(*b->decision_value);
      if (va != vb) return va > vb;
      return a->id < b->id;
    }
    if (has_a != has_b) return has_a;
    return a->id < b->id;
  };
  std::sort(fps.begin(), fps.end(), order);
  std::sort(fns.begin(), fns.end(), order);
  for (std::size_t i = 0; i < fps.size() && i < exemplar_cap; ++i)
    kr.fp_exemplars.push_back(*fps[i]);
  for (std::size_t i = 0; i < fns.size() && i < exemplar_cap; ++i)
    kr.fn_exemplars.push_back(*fns[i]);
  return kr;
}

void export_confusion(const ConfusionMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write confusion matrix file: ", path);
  out << "gold,pred_pos,pred_neg\n";
  out << "gold_pos," << m.tp << "," << m.fn << "\n";
  out << "gold_neg," << m.fp << "," << m.tn << "\n";
  if (!out) fail("failed writing confusion matrix file: ", path);
}

ConfusionMatrix parse_confusion(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open confusion matrix file: ", path);
  std::string line;
  if (!std::getline(in, line) || line != "gold,pred_pos,pred_neg")
    fail(path, ": bad confusion matrix header");
  ConfusionMatrix m;
  auto parse_row = [&](const char* tag, std::size_t* a, std::size_t* b) {
    if (!std::getline(in, line)) fail(path, ": truncated confusion matrix");
    std::istringstream row(line);
    std::string label, sa, sb;
    if (!std::getline(row, label, ',') || !std::getline(row, sa, ',') ||
        !std::getline(row, sb) || label != tag)
      fail(path, ": malformed confusion row \"", line, "\"");
    *a = std::stoull(sa);
    *b = std::stoull(sb);
  };
  parse_row("gold_pos", &m.tp, &m.fn);
  parse_row("gold_neg", &m.fp, &m.tn);
  return m;
}

std::string render_confusion(const ConfusionMatrix& m) {
  std::ostringstream out;
  auto cell = [](std::size_t v) {
    std::string s = std::to_string(v);
    return s.size() < 11 ? std::string(11 - s.size(), ' ') + s : " " + s;
  };
  out << "            " << "   pred_pos" << "   pred_neg" << "\n";
  out << "gold_pos    " << cell(m.tp) << cell(m.fn) << "\n";
  out << "gold_neg    " << cell(m.fp) << cell(m.tn) << "\n";
  return out.str();
}

const std::vector<ReferenceScore>& reference_scores() {
  static const std::vector<ReferenceScore> scores = {
      {"Multinomial Naive Bayes (Count Vectorizer)", 0.641, 0.517},
      {"Logistic Regression (Count Vectorizer)", 0.679, 0.572},
      {"SVM Linear Kernel (TfIdf Vectorizer)", 0.695, 0.576},
      {"LSTM (128 LSTM Units)", 0.731, 0.591},
      {"Provided Baseline", 0.720, 0.267},
      {"ULMFiT", 0.861, 0.701},
  };
  return scores;
}

const std::vector<LeaderboardRow>& reference_leaderboard() {
  static const std::vector<LeaderboardRow> rows = {
      {1, "OleNet", 0.7812},         {2, "ThisIsCompetition", 0.7778},
      {3, "m_y", 0.7761},            {4, "yimmon", 0.7629},
      {5, "NTUA-ISLab", 0.7488},     {10, "MIDAS", 0.7011},
  };
  return rows;
}

}  // namespace suggest
