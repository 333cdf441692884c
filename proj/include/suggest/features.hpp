#ifndef SUGGEST_FEATURES_HPP
#define SUGGEST_FEATURES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "suggest/normalize.hpp"

namespace suggest {

// Sorted sparse feature vector; indices strictly increasing, no stored zeros.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double l2_norm() const;
  bool operator==(const SparseVector&) const = default;
};

struct VectorizerOptions {
  std::size_t min_df = 1;
  // Unigrams by default; 2 enables (1,2)-grams with bigram terms "w1 w2".
  std::size_t ngram_max = 1;
};

class Vocabulary {
 public:
  // Terms with document frequency < min_df are excluded; indices are assigned
  // in lexicographic term order so fitting is deterministic.
  static Vocabulary fit(const std::vector<TokenStream>& corpus,
                        const VectorizerOptions& opts = {});

  std::size_t size() const { return terms_.size(); }
  std::size_t n_documents() const { return n_documents_; }
  const VectorizerOptions& options() const { return opts_; }

  // -1 when the term is out of vocabulary.
  std::int64_t index_of(const std::string& term) const;
  const std::string& term_at(std::size_t index) const { return terms_[index]; }
  std::size_t document_frequency(std::size_t index) const { return df_[index]; }

  double idf(std::size_t index) const;

  std::string canonical_text() const;
  std::uint64_t fingerprint() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::map<std::string, std::uint32_t> term_to_index_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t n_documents_ = 0;
  VectorizerOptions opts_;
};

// Terms of a token stream under the vocabulary's n-gram options.
std::vector<std::string> extract_terms(const TokenStream& ts,
                                       std::size_t ngram_max);

// weight(i) = occurrences of term i; OOV tokens contribute nothing.
SparseVector count_vector(const TokenStream& ts, const Vocabulary& v);

// tf * idf with idf = ln((1+n)/(1+df)) + 1, L2-normalized when non-zero.
SparseVector tfidf_vector(const TokenStream& ts, const Vocabulary& v);

}  // namespace suggest

#endif
