#include "suggest/linear_models.hpp"

#include <algorithm>
#include <cmath>

#include "suggest/error.hpp"
#include "suggest/rng.hpp"

namespace suggest {

namespace {

void check_dimensions(const std::vector<SparseVector>& features,
                      std::size_t dim) {
  for (const SparseVector& x : features)
    for (const auto& [idx, w] : x.entries)
      if (idx >= dim)
        fail("feature index ", idx, " out of range for dimension ", dim);
}

void check_both_classes(const std::vector<Label>& labels) {
  bool pos = false, neg = false;
  for (Label l : labels) (l == Label::Suggestion ? pos : neg) = true;
  if (!pos || !neg) fail("training data must contain both classes");
}

double sparse_dot(const std::vector<double>& w, const SparseVector& x) {
  double acc = 0.0;
  for (const auto& [idx, v] : x.entries) {
    if (idx >= w.size())
      fail("feature index ", idx, " out of range for dimension ", w.size());
    acc += w[idx] * v;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes
// ---------------------------------------------------------------------------

NBModel nb_fit(const std::vector<SparseVector>& features,
               const std::vector<Label>& labels, std::size_t dim,
               double alpha) {
  if (features.size() != labels.size())
    fail("nb_fit: ", features.size(), " feature vectors vs ", labels.size(),
         " labels");
  if (alpha <= 0.0) fail("nb_fit: alpha must be positive, got ", alpha);
  check_both_classes(labels);
  check_dimensions(features, dim);

  NBModel m;
  m.alpha = alpha;
  std::size_t class_docs[2] = {0, 0};
  std::vector<double> term_counts[2];
  term_counts[0].assign(dim, 0.0);
  term_counts[1].assign(dim, 0.0);
  double total_counts[2] = {0.0, 0.0};

  for (std::size_t i = 0; i < features.size(); ++i) {
    const int c = labels[i] == Label::Suggestion ? 1 : 0;
    ++class_docs[c];
    for (const auto& [idx, v] : features[i].entries) {
      if (v < 0.0) fail("nb_fit: negative count in document ", i);
      term_counts[c][idx] += v;
      total_counts[c] += v;
    }
  }

  const double n = static_cast<double>(features.size());
  for (int c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(static_cast<double>(class_docs[c]) / n);
    m.log_likelihood[c].resize(dim);
    const double denom = total_counts[c] + alpha * static_cast<double>(dim);
    for (std::size_t t = 0; t < dim; ++t)
      m.log_likelihood[c][t] = std::log((term_counts[c][t] + alpha) / denom);
  }
  return m;
}

double nb_decision_value(const NBModel& m, const SparseVector& x) {
  double score[2];
  for (int c = 0; c < 2; ++c) {
    score[c] = m.log_prior[c];
    for (const auto& [idx, v] : x.entries) {
      if (idx >= m.dim())
        fail("feature index ", idx, " out of range for dimension ", m.dim());
      score[c] += v * m.log_likelihood[c][idx];
    }
  }
  return score[1] - score[0];
}

Label nb_predict(const NBModel& m, const SparseVector& x) {
  return label_from_decision(nb_decision_value(m, x));
}

// ---------------------------------------------------------------------------
// Gradient-descent linear models
// ---------------------------------------------------------------------------

void linear_loss_gradient(LossKind kind, const std::vector<SparseVector>& x,
                          const std::vector<double>& y01, double l2,
                          const std::vector<double>& weights, double bias,
                          double* loss_out, std::vector<double>* grad_w,
                          double* grad_b) {
  const std::size_t n = x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  if (grad_w) grad_w->assign(weights.size(), 0.0);
  double gb = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double z = sparse_dot(weights, x[i]) + bias;
    if (kind == LossKind::Logistic) {
      const double y = y01[i];
      // Stable cross-entropy: max(z,0) - z*y + log(1 + exp(-|z|)).
      loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double delta = (p - y) * inv_n;
      if (grad_w)
        for (const auto& [idx, v] : x[i].entries) (*grad_w)[idx] += delta * v;
      gb += delta;
    } else {
      const double ysign = y01[i] > 0.5 ? 1.0 : -1.0;
      const double margin = ysign * z;
      if (margin < 1.0) {
        loss += 1.0 - margin;
        const double delta = -ysign * inv_n;
        if (grad_w)
          for (const auto& [idx, v] : x[i].entries)
            (*grad_w)[idx] += delta * v;
        gb += delta;
      }
    }
  }
  loss *= inv_n;

  double reg = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    reg += weights[j] * weights[j];
    if (grad_w) (*grad_w)[j] += l2 * weights[j];
  }
  loss += 0.5 * l2 * reg;

  if (loss_out) *loss_out = loss;
  if (grad_b) *grad_b = gb;
}

namespace {

std::vector<double> to_y01(const std::vector<Label>& labels) {
  std::vector<double> y;
  y.reserve(labels.size());
  for (Label l : labels) y.push_back(l == Label::Suggestion ? 1.0 : 0.0);
  return y;
}

}  // namespace

LinearModel logistic_fit(const std::vector<SparseVector>& features,
                         const std::vector<Label>& labels, std::size_t dim,
                         const LinearHyperparams& hp) {
  if (features.size() != labels.size())
    fail("logistic_fit: feature/label count mismatch");
  if (hp.epochs < 1) fail("logistic_fit: epochs must be >= 1");
  check_both_classes(labels);
  check_dimensions(features, dim);

  LinearModel m;
  m.loss_kind = LossKind::Logistic;
  m.hp = hp;
  m.weights.assign(dim, 0.0);
  m.bias = 0.0;

  const std::vector<double> y = to_y01(labels);
  std::vector<double> grad_w;
  double grad_b = 0.0;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    double loss = 0.0;
    linear_loss_gradient(LossKind::Logistic, features, y, hp.l2, m.weights,
                         m.bias, &loss, &grad_w, &grad_b);
    if (!std::isfinite(loss))
      fail("logistic_fit: non-finite loss at epoch ", epoch);
    const double lr =
        hp.learning_rate / (1.0 + hp.decay * static_cast<double>(epoch));
    for (std::size_t j = 0; j < dim; ++j) m.weights[j] -= lr * grad_w[j];
    m.bias -= lr * grad_b;
    linear_loss_gradient(LossKind::Logistic, features, y, hp.l2, m.weights,
                         m.bias, &loss, nullptr, nullptr);
    if (!std::isfinite(loss))
      fail("logistic_fit: non-finite loss at epoch ", epoch);
    m.loss_history.push_back(loss);
  }
  return m;
}

LinearModel svm_fit(const std::vector<SparseVector>& features,
                    const std::vector<Label>& labels, std::size_t dim,
                    const LinearHyperparams& hp) {
  if (features.size() != labels.size())
    fail("svm_fit: feature/label count mismatch");
  if (hp.epochs < 1) fail("svm_fit: epochs must be >= 1");
  check_both_classes(labels);
  check_dimensions(features, dim);

  LinearModel m;
  m.loss_kind = LossKind::Hinge;
  m.hp = hp;

  // w is kept as scale * v so the per-sample L2 shrink stays O(nnz).
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;

  const std::vector<double> y = to_y01(labels);
  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(hp.seed);

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const double lr =
        hp.learning_rate / (1.0 + hp.decay * static_cast<double>(epoch));
    rng.shuffle(order);
    const double shrink = 1.0 - lr * hp.l2;
    if (shrink <= 0.0)
      fail("svm_fit: learning rate too large for l2 strength at epoch ", epoch);
    for (std::size_t i : order) {
      const double ysign = y[i] > 0.5 ? 1.0 : -1.0;
      const double margin = ysign * (scale * sparse_dot(v, features[i]) + bias);
      scale *= shrink;
      if (margin < 1.0) {
        const double step = lr * ysign / scale;
        for (const auto& [idx, val] : features[i].entries)
          v[idx] += step * val;
        bias += lr * ysign;
      }
      if (std::abs(scale) < 1e-100) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
    std::vector<double> w_now(dim);
    for (std::size_t j = 0; j < dim; ++j) w_now[j] = scale * v[j];
    double loss = 0.0;
    linear_loss_gradient(LossKind::Hinge, features, y, hp.l2, w_now, bias,
                         &loss, nullptr, nullptr);
    if (!std::isfinite(loss))
      fail("svm_fit: non-finite loss at epoch ", epoch);
    m.loss_history.push_back(loss);
  }

  m.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) m.weights[j] = scale * v[j];
  m.bias = bias;
  return m;
}

double linear_decision_value(const LinearModel& m, const SparseVector& x) {
  return sparse_dot(m.weights, x) + m.bias;
}

Label linear_predict(const LinearModel& m, const SparseVector& x) {
  return label_from_decision(linear_decision_value(m, x));
}

}  // namespace suggest
