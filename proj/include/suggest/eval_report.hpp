#ifndef SUGGEST_EVAL_REPORT_HPP
#define SUGGEST_EVAL_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "suggest/corpus.hpp"
#include "suggest/normalize.hpp"

namespace suggest {

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Prediction {
  std::string id;
  Label label = Label::NonSuggestion;
  std::optional<double> decision_value;
};

struct RecordOutcome {
  std::string id;
  Label gold = Label::NonSuggestion;
  Label predicted = Label::NonSuggestion;
  std::optional<double> decision_value;
};

struct EvalReport {
  ConfusionMatrix matrix;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when a metric denominator vanished and the 0 convention was applied.
  bool degenerate = false;
  std::vector<RecordOutcome> outcomes;
};

// Positive-class precision/recall/F1 with Suggestion as the positive class.
// Prediction ids must exactly cover the gold ids; violations are reported
// with the offending ids listed.
EvalReport evaluate(const Dataset& gold, const std::vector<Prediction>& predictions);

struct KeywordReport {
  std::vector<std::string> keywords;
  // False positives exist; when false, the fractions are meaningless.
  bool applicable = false;
  std::size_t n_false_positives = 0;
  double fraction_fp_with_any_keyword = 0.0;
  std::map<std::string, double> per_keyword_fraction;
  std::vector<RecordOutcome> fp_exemplars;
  std::vector<RecordOutcome> fn_exemplars;
};

const std::vector<std::string>& default_keywords();

// Fraction of false positives whose normalized text contains >= 1 keyword as
// a whole token (case-insensitive). Exemplar lists are capped and ordered by
// |decision_value| descending when scores are available, else by id.
KeywordReport keyword_analysis(const EvalReport& report, const Dataset& corpus,
                               const std::vector<std::string>& keywords =
                                   default_keywords(),
                               const NormalizerConfig& cfg = default_config(),
                               std::size_t exemplar_cap = 10);

// Small delimited 2x2 grid: "gold_pos,tp,fn" / "gold_neg,fp,tn" under a
// header. Round-trips through parse_confusion exactly.
void export_confusion(const ConfusionMatrix& m, const std::string& path);
ConfusionMatrix parse_confusion(const std::string& path);
std::string render_confusion(const ConfusionMatrix& m);

// Table 3 / Table 4 of the source experiments, kept for side-by-side
// reporting only; none of these are training targets.
struct ReferenceScore {
  std::string model;
  double train_f1;
  double test_f1;
};
struct LeaderboardRow {
  int rank;
  std::string team;
  double f1;
};
const std::vector<ReferenceScore>& reference_scores();
const std::vector<LeaderboardRow>& reference_leaderboard();

}  // namespace suggest

#endif
