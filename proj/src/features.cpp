#include "suggest/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "suggest/error.hpp"
#include "suggest/fingerprint.hpp"

namespace suggest {

double SparseVector::l2_norm() const {
  double sq = 0.0;
  for (const auto& [i, w] : entries) sq += w * w;
  return std::sqrt(sq);
}

std::vector<std::string> extract_terms(const TokenStream& ts,
                                       std::size_t ngram_max) {
  std::vector<std::string> terms;
  terms.reserve(ts.tokens.size());
  for (const Token& t : ts.tokens) terms.push_back(t.surface);
  if (ngram_max >= 2) {
    const std::size_t n_unigrams = terms.size();
    for (std::size_t g = 2; g <= ngram_max; ++g) {
      for (std::size_t i = 0; g <= n_unigrams && i + g <= n_unigrams; ++i) {
        std::string gram = terms[i];
        for (std::size_t k = 1; k < g; ++k) {
          gram += ' ';
          gram += terms[i + k];
        }
        terms.push_back(std::move(gram));
      }
    }
  }
  return terms;
}

Vocabulary Vocabulary::fit(const std::vector<TokenStream>& corpus,
                           const VectorizerOptions& opts) {
  if (corpus.empty()) fail("fit_vocabulary: empty corpus");
  if (opts.min_df < 1) fail("fit_vocabulary: min_df must be >= 1");
  if (opts.ngram_max < 1 || opts.ngram_max > 3)
    fail("fit_vocabulary: ngram_max must be in [1,3]");

  std::map<std::string, std::size_t> df;
  for (const TokenStream& ts : corpus) {
    std::set<std::string> seen;
    for (std::string& term : extract_terms(ts, opts.ngram_max))
      seen.insert(std::move(term));
    for (const std::string& term : seen) ++df[term];
  }

  Vocabulary v;
  v.n_documents_ = corpus.size();
  v.opts_ = opts;
  for (const auto& [term, count] : df) {
    if (count < opts.min_df) continue;
    v.term_to_index_.emplace(term, static_cast<std::uint32_t>(v.terms_.size()));
    v.terms_.push_back(term);
    v.df_.push_back(count);
  }
  return v;
}

std::int64_t Vocabulary::index_of(const std::string& term) const {
  auto it = term_to_index_.find(term);
  return it == term_to_index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double Vocabulary::idf(std::size_t index) const {
  return std::log((1.0 + static_cast<double>(n_documents_)) /
                  (1.0 + static_cast<double>(df_[index]))) +
         1.0;
}

std::string Vocabulary::canonical_text() const {
  std::ostringstream out;
  out << "suggestmine-vocab v1\n";
  out << "n_documents\t" << n_documents_ << "\n";
  out << "min_df\t" << opts_.min_df << "\n";
  out << "ngram_max\t" << opts_.ngram_max << "\n";
  for (std::size_t i = 0; i < terms_.size(); ++i)
    out << terms_[i] << "\t" << i << "\t" << df_[i] << "\n";
  return out.str();
}

std::uint64_t Vocabulary::fingerprint() const { return fnv1a64(canonical_text()); }

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write vocabulary file: ", path);
  out << canonical_text();
  if (!out) fail("failed writing vocabulary file: ", path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open vocabulary file: ", path);
  std::string line;
  if (!std::getline(in, line) || line != "suggestmine-vocab v1")
    fail(path, ": not a vocabulary file (bad magic line)");

  Vocabulary v;
  auto read_kv = [&](const char* key) -> std::size_t {
    if (!std::getline(in, line)) fail(path, ": truncated header");
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.substr(0, tab) != key)
      fail(path, ": expected header line \"", key, "\"");
    return static_cast<std::size_t>(
        parse_u64(line.substr(tab + 1), path + " header " + key));
  };
  v.n_documents_ = read_kv("n_documents");
  v.opts_.min_df = read_kv("min_df");
  v.opts_.ngram_max = read_kv("ngram_max");

  std::size_t lineno = 4;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string term, idx_s, df_s;
    if (!std::getline(row, term, '\t') || !std::getline(row, idx_s, '\t') ||
        !std::getline(row, df_s))
      fail(path, ": line ", lineno, ": malformed vocabulary row");
    const std::string ctx = path + " line " + std::to_string(lineno);
    if (parse_u64(idx_s, ctx) != v.terms_.size())
      fail(path, ": line ", lineno, ": vocabulary indices out of order");
    std::size_t df = parse_u64(df_s, ctx);
    if (df < 1 || df > v.n_documents_)
      fail(path, ": line ", lineno, ": document frequency out of range");
    v.term_to_index_.emplace(term, static_cast<std::uint32_t>(v.terms_.size()));
    v.terms_.push_back(term);
    v.df_.push_back(df);
  }
  return v;
}

namespace {

SparseVector counts_of(const TokenStream& ts, const Vocabulary& v) {
  std::map<std::uint32_t, double> acc;
  for (const std::string& term : extract_terms(ts, v.options().ngram_max)) {
    std::int64_t idx = v.index_of(term);
    if (idx >= 0) acc[static_cast<std::uint32_t>(idx)] += 1.0;
  }
  SparseVector out;
  out.entries.assign(acc.begin(), acc.end());
  return out;
}

}  // namespace

SparseVector count_vector(const TokenStream& ts, const Vocabulary& v) {
  return counts_of(ts, v);
}

SparseVector tfidf_vector(const TokenStream& ts, const Vocabulary& v) {
  SparseVector out = counts_of(ts, v);
  for (auto& [idx, w] : out.entries) w *= v.idf(idx);
  double norm = out.l2_norm();
  if (norm > 0.0)
    for (auto& [idx, w] : out.entries) w /= norm;
  return out;
}

}  // namespace suggest
