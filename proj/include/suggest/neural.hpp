#ifndef SUGGEST_NEURAL_HPP
#define SUGGEST_NEURAL_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "suggest/corpus.hpp"
#include "suggest/normalize.hpp"

namespace suggest {

// ---------------------------------------------------------------------------
// Pretrained word embeddings (fasttext text format)
// ---------------------------------------------------------------------------

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim, std::uint64_t fingerprint)
      : dim_(dim), zero_(dim, 0.0), fingerprint_(fingerprint) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t duplicate_count() const { return duplicates_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  void insert(const std::string& word, std::vector<double> vec);

  // Unknown words map to the zero vector.
  const std::vector<double>& lookup(const std::string& word) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<double> zero_;
  std::size_t duplicates_ = 0;
  std::uint64_t fingerprint_ = 0;

  friend EmbeddingTable load_embeddings(const std::string&, std::size_t);
};

// Text format: header "count dim", then one "word v1 ... v_dim" per line.
// Duplicate words keep the last vector (counted); dimension mismatches and
// non-finite components are errors naming the line.
EmbeddingTable load_embeddings(const std::string& path,
                               std::size_t expected_dim = 300);

// ---------------------------------------------------------------------------
// LSTM sentence classifier
// ---------------------------------------------------------------------------

struct LSTMShape {
  std::size_t input_dim = 300;
  std::size_t hidden_units = 128;
  std::size_t max_seq_len = 64;
};

// Gate order throughout: input, forget, output, candidate.
enum { kGateInput = 0, kGateForget = 1, kGateOutput = 2, kGateCandidate = 3 };

struct LSTMClassifier {
  LSTMShape shape;
  std::uint64_t init_seed = 42;
  std::vector<double> w_input[4];   // hidden x input, row-major
  std::vector<double> w_hidden[4];  // hidden x hidden, row-major
  std::vector<double> bias[4];      // hidden
  std::vector<double> w_out;        // hidden
  double b_out = 0.0;

  static LSTMClassifier init(const LSTMShape& shape, std::uint64_t seed = 42);

  std::size_t param_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);
};

struct LSTMGradients {
  std::vector<double> w_input[4];
  std::vector<double> w_hidden[4];
  std::vector<double> bias[4];
  std::vector<double> w_out;
  double b_out = 0.0;

  static LSTMGradients zeros(const LSTMShape& shape);
  std::vector<double> flatten() const;
  double global_norm() const;
  void scale(double s);
};

struct LSTMStepCache {
  std::vector<double> x;
  bool masked = false;
  std::vector<double> gate_i, gate_f, gate_o, gate_g;
  std::vector<double> c, tanh_c, h;
};

struct LSTMForwardCache {
  std::vector<LSTMStepCache> steps;
  std::vector<double> h_final;
  double logit = 0.0;
  double probability = 0.0;
};

// Probability of Suggestion. Masked steps (pad positions) pass state through
// untouched. Throws on non-finite activations.
double lstm_forward(const LSTMClassifier& m,
                    const std::vector<std::vector<double>>& inputs,
                    const std::vector<bool>& mask,
                    LSTMForwardCache* cache = nullptr);

// Accumulates d(cross-entropy(y, p))/d(params) into g.
void lstm_backward(const LSTMClassifier& m, const LSTMForwardCache& cache,
                   double y, LSTMGradients* g);

struct LSTMHyperparams {
  double learning_rate = 0.1;
  double decay = 0.01;
  std::size_t epochs = 10;
  double clip_norm = 5.0;
  std::uint64_t seed = 42;
};

struct LSTMTrainResult {
  LSTMClassifier model;
  std::vector<double> epoch_loss;
};

// Embeds each token (frozen embeddings, zero for OOV), truncates the tail at
// shape.max_seq_len, and trains by per-sample BPTT with global-norm clipping.
LSTMTrainResult lstm_fit(const LSTMClassifier& init,
                         const std::vector<TokenStream>& sentences,
                         const std::vector<Label>& labels,
                         const EmbeddingTable& embeddings,
                         const LSTMHyperparams& hp);

double lstm_decision_value(const LSTMClassifier& m, const TokenStream& ts,
                           const EmbeddingTable& embeddings);
Label lstm_predict(const LSTMClassifier& m, const TokenStream& ts,
                   const EmbeddingTable& embeddings);

// The paper's transfer-learning system is not reimplemented here; its
// configuration and scores are kept as reference metadata only.
struct UlmfitReference {
  std::size_t bptt = 70;
  std::size_t batch_size = 48;
  std::size_t embedding_size = 400;
  std::size_t hidden_size = 1150;
  std::size_t num_layers = 3;
  double train_f1 = 0.861;
  double test_f1 = 0.701;
};

const UlmfitReference& ulmfit_reference();

}  // namespace suggest

#endif
