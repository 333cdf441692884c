#ifndef SUGGEST_MODEL_IO_HPP
#define SUGGEST_MODEL_IO_HPP

#include <string>
#include <variant>

#include "suggest/features.hpp"
#include "suggest/linear_models.hpp"
#include "suggest/neural.hpp"
#include "suggest/normalize.hpp"

namespace suggest {

enum class ModelKind { NaiveBayes, LogReg, Svm, Lstm };
enum class VectorizerKind { Count, Tfidf, Embeddings };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);
const char* vectorizer_kind_name(VectorizerKind k);

// A trained model plus the fingerprints binding it to the preprocessing and
// feature space it was trained with.
struct ModelBundle {
  ModelKind kind = ModelKind::NaiveBayes;
  VectorizerKind vectorizer = VectorizerKind::Count;
  std::uint64_t features_fingerprint = 0;  // vocabulary or embedding table
  std::uint64_t normalizer_fingerprint = 0;
  std::variant<NBModel, LinearModel, LSTMClassifier> model;

  double decision_value(const SparseVector& x) const;
};

// Versioned plain-text persistence; doubles are written with max_digits10 so
// save/load round-trips bit-exactly.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

// Hard errors on mismatch: the model was trained with different
// preprocessing or a different vocabulary.
void verify_vocabulary(const ModelBundle& bundle, const Vocabulary& vocab);
void verify_normalizer(const ModelBundle& bundle, const NormalizerConfig& cfg);
void verify_embeddings(const ModelBundle& bundle, const EmbeddingTable& table);

// Normalizer configuration as a versioned JSON document, exact enough to
// reproduce the fingerprint.
void save_normalizer_config(const NormalizerConfig& cfg, const std::string& path);
NormalizerConfig load_normalizer_config(const std::string& path);

}  // namespace suggest

#endif
