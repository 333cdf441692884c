#ifndef SUGGEST_LINEAR_MODELS_HPP
#define SUGGEST_LINEAR_MODELS_HPP

#include <cstdint>
#include <vector>

#include "suggest/corpus.hpp"
#include "suggest/features.hpp"

namespace suggest {

// Shared classifier contract: decision_value > 0 predicts Suggestion; an
// exact 0 falls back to NonSuggestion (the majority class).
inline Label label_from_decision(double decision_value) {
  return decision_value > 0.0 ? Label::Suggestion : Label::NonSuggestion;
}

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes over count vectors
// ---------------------------------------------------------------------------

struct NBModel {
  double alpha = 1.0;
  // Index 0 = NonSuggestion, 1 = Suggestion.
  double log_prior[2] = {0.0, 0.0};
  std::vector<double> log_likelihood[2];  // per-term, both sized |V|

  std::size_t dim() const { return log_likelihood[0].size(); }
};

NBModel nb_fit(const std::vector<SparseVector>& features,
               const std::vector<Label>& labels, std::size_t dim,
               double alpha = 1.0);

// Log posterior odds of Suggestion.
double nb_decision_value(const NBModel& m, const SparseVector& x);
Label nb_predict(const NBModel& m, const SparseVector& x);

// ---------------------------------------------------------------------------
// Linear models trained by gradient descent
// ---------------------------------------------------------------------------

enum class LossKind { Logistic, Hinge };

struct LinearHyperparams {
  double l2 = 1e-4;
  double learning_rate = 0.1;
  double decay = 0.01;  // lr_t = learning_rate / (1 + decay * epoch)
  std::size_t epochs = 50;
  std::uint64_t seed = 42;
};

struct LinearModel {
  LossKind loss_kind = LossKind::Logistic;
  std::vector<double> weights;
  double bias = 0.0;
  LinearHyperparams hp;
  std::vector<double> loss_history;  // objective after each epoch

  std::size_t dim() const { return weights.size(); }
};

// Full-batch gradient descent on mean cross-entropy + (l2/2)*||w||^2.
// Deterministic; training loss is non-increasing under the default schedule.
LinearModel logistic_fit(const std::vector<SparseVector>& features,
                         const std::vector<Label>& labels, std::size_t dim,
                         const LinearHyperparams& hp = {});

// Seeded-shuffle subgradient descent on mean hinge loss + (l2/2)*||w||^2.
LinearModel svm_fit(const std::vector<SparseVector>& features,
                    const std::vector<Label>& labels, std::size_t dim,
                    const LinearHyperparams& hp = {});

double linear_decision_value(const LinearModel& m, const SparseVector& x);
Label linear_predict(const LinearModel& m, const SparseVector& x);

// Gradient of the full-batch objective at (weights, bias); used by training
// and by the finite-difference checks. For hinge loss the subgradient at a
// kink takes the zero branch.
void linear_loss_gradient(LossKind kind, const std::vector<SparseVector>& x,
                          const std::vector<double>& y01, double l2,
                          const std::vector<double>& weights, double bias,
                          double* loss_out, std::vector<double>* grad_w,
                          double* grad_b);

}  // namespace suggest

#endif
