#include "suggest/neural.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "suggest/error.hpp"
#include "suggest/fingerprint.hpp"
#include "suggest/rng.hpp"

namespace suggest {

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
  if (vec.size() != dim_)
    fail("embedding for \"", word, "\" has ", vec.size(),
         " components, expected ", dim_);
  if (zero_.size() != dim_) zero_.assign(dim_, 0.0);
  auto [it, inserted] = vectors_.try_emplace(word, std::move(vec));
  if (!inserted) {
    it->second = std::move(vec);
    ++duplicates_;
  }
}

const std::vector<double>& EmbeddingTable::lookup(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? zero_ : it->second;
}

EmbeddingTable load_embeddings(const std::string& path,
                               std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) fail("cannot open embedding file: ", path);

  std::string line;
  if (!std::getline(in, line)) fail(path, ": empty embedding file");
  std::istringstream header(line);
  std::size_t count = 0, dim = 0;
  if (!(header >> count >> dim))
    fail(path, ": line 1: malformed header (expected \"count dim\")");
  std::string extra;
  if (header >> extra) fail(path, ": line 1: malformed header (extra fields)");
  if (dim != expected_dim)
    fail(path, ": embedding dimension ", dim, " does not match expected ",
         expected_dim);

  EmbeddingTable table(dim, 0);
  std::uint64_t fp = fnv1a64(line + "\n");
  std::size_t lineno = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    fp = fnv1a64(line + "\n", fp);
    std::istringstream row(line);
    std::string word, piece;
    row >> word;
    std::vector<double> vec;
    vec.reserve(dim);
    // strtod instead of stream extraction so "nan"/"inf" parse and then get
    // rejected by the finiteness check below.
    while (row >> piece) {
      char* end = nullptr;
      const double v = std::strtod(piece.c_str(), &end);
      if (end != piece.c_str() + piece.size())
        fail(path, ": line ", lineno, ": bad vector component \"", piece, "\"");
      vec.push_back(v);
    }
    if (vec.size() != dim)
      fail(path, ": line ", lineno, ": expected ", dim,
           " vector components, got ", vec.size());
    for (double comp : vec)
      if (!std::isfinite(comp))
        fail(path, ": line ", lineno, ": non-finite component");
    table.insert(word, std::move(vec));
    ++rows;
  }
  if (rows != count)
    fail(path, ": line ", lineno + 1, ": header declared ", count,
         " vectors but file has ", rows);
  table.fingerprint_ = fp;
  return table;
}

// ---------------------------------------------------------------------------
// LSTM parameters
// ---------------------------------------------------------------------------

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Uniform(-r, r) init with r = 1/sqrt(hidden); pinned RNG for cross-platform
// determinism.
void fill_uniform(std::vector<double>& v, Rng& rng, double r) {
  for (double& x : v) x = rng.uniform(-r, r);
}

}  // namespace

LSTMClassifier LSTMClassifier::init(const LSTMShape& shape, std::uint64_t seed) {
  LSTMClassifier m;
  m.shape = shape;
  m.init_seed = seed;
  Rng rng(seed);
  const double r = 1.0 / std::sqrt(static_cast<double>(shape.hidden_units));
  for (int g = 0; g < 4; ++g) {
    m.w_input[g].resize(shape.hidden_units * shape.input_dim);
    m.w_hidden[g].resize(shape.hidden_units * shape.hidden_units);
    m.bias[g].assign(shape.hidden_units, 0.0);
    fill_uniform(m.w_input[g], rng, r);
    fill_uniform(m.w_hidden[g], rng, r);
  }
  // Forget-gate bias starts at 1 so early training does not wipe the cell.
  for (double& b : m.bias[kGateForget]) b = 1.0;
  m.w_out.resize(shape.hidden_units);
  fill_uniform(m.w_out, rng, r);
  m.b_out = 0.0;
  return m;
}

std::size_t LSTMClassifier::param_count() const {
  return 4 * (shape.hidden_units * shape.input_dim +
              shape.hidden_units * shape.hidden_units + shape.hidden_units) +
         shape.hidden_units + 1;
}

std::vector<double> LSTMClassifier::flatten() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (int g = 0; g < 4; ++g) {
    out.insert(out.end(), w_input[g].begin(), w_input[g].end());
    out.insert(out.end(), w_hidden[g].begin(), w_hidden[g].end());
    out.insert(out.end(), bias[g].begin(), bias[g].end());
  }
  out.insert(out.end(), w_out.begin(), w_out.end());
  out.push_back(b_out);
  return out;
}

void LSTMClassifier::unflatten(const std::vector<double>& params) {
  if (params.size() != param_count())
    fail("LSTM unflatten: expected ", param_count(), " parameters, got ",
         params.size());
  std::size_t pos = 0;
  auto take = [&](std::vector<double>& dst) {
    std::copy(params.begin() + static_cast<std::ptrdiff_t>(pos),
              params.begin() + static_cast<std::ptrdiff_t>(pos + dst.size()),
              dst.begin());
    pos += dst.size();
  };
  for (int g = 0; g < 4; ++g) {
    take(w_input[g]);
    take(w_hidden[g]);
    take(bias[g]);
  }
  take(w_out);
  b_out = params[pos];
}

LSTMGradients LSTMGradients::zeros(const LSTMShape& shape) {
  LSTMGradients g;
  for (int k = 0; k < 4; ++k) {
    g.w_input[k].assign(shape.hidden_units * shape.input_dim, 0.0);
    g.w_hidden[k].assign(shape.hidden_units * shape.hidden_units, 0.0);
    g.bias[k].assign(shape.hidden_units, 0.0);
  }
  g.w_out.assign(shape.hidden_units, 0.0);
  g.b_out = 0.0;
  return g;
}

std::vector<double> LSTMGradients::flatten() const {
  std::vector<double> out;
  for (int g = 0; g < 4; ++g) {
    out.insert(out.end(), w_input[g].begin(), w_input[g].end());
    out.insert(out.end(), w_hidden[g].begin(), w_hidden[g].end());
    out.insert(out.end(), bias[g].begin(), bias[g].end());
  }
  out.insert(out.end(), w_out.begin(), w_out.end());
  out.push_back(b_out);
  return out;
}

double LSTMGradients::global_norm() const {
  double sq = b_out * b_out;
  auto add = [&](const std::vector<double>& v) {
    for (double x : v) sq += x * x;
  };
  for (int g = 0; g < 4; ++g) {
    add(w_input[g]);
    add(w_hidden[g]);
    add(bias[g]);
  }
  add(w_out);
  return std::sqrt(sq);
}

void LSTMGradients::scale(double s) {
  auto mul = [&](std::vector<double>& v) {
    for (double& x : v) x *= s;
  };
  for (int g = 0; g < 4; ++g) {
    mul(w_input[g]);
    mul(w_hidden[g]);
    mul(bias[g]);
  }
  mul(w_out);
  b_out *= s;
}

// ---------------------------------------------------------------------------
// Forward / backward
// ---------------------------------------------------------------------------

double lstm_forward(const LSTMClassifier& m,
                    const std::vector<std::vector<double>>& inputs,
                    const std::vector<bool>& mask, LSTMForwardCache* cache) {
  const std::size_t H = m.shape.hidden_units;
  const std::size_t D = m.shape.input_dim;
  if (mask.size() != inputs.size())
    fail("lstm_forward: mask length ", mask.size(), " vs sequence length ",
         inputs.size());

  std::vector<double> h(H, 0.0), c(H, 0.0);
  std::vector<double> pre(4 * H);
  if (cache) {
    cache->steps.clear();
    cache->steps.reserve(inputs.size());
  }

  for (std::size_t t = 0; t < inputs.size(); ++t) {
    LSTMStepCache step;
    step.masked = !mask[t];
    if (step.masked) {
      if (cache) cache->steps.push_back(std::move(step));
      continue;
    }
    const std::vector<double>& x = inputs[t];
    if (x.size() != D)
      fail("lstm_forward: input at step ", t, " has dimension ", x.size(),
           ", expected ", D);

    for (int g = 0; g < 4; ++g) {
      const double* wx = m.w_input[g].data();
      const double* wh = m.w_hidden[g].data();
      for (std::size_t j = 0; j < H; ++j) {
        double acc = m.bias[g][j];
        const double* wx_row = wx + j * D;
        for (std::size_t k = 0; k < D; ++k) acc += wx_row[k] * x[k];
        const double* wh_row = wh + j * H;
        for (std::size_t k = 0; k < H; ++k) acc += wh_row[k] * h[k];
        pre[static_cast<std::size_t>(g) * H + j] = acc;
      }
    }

    step.x = x;
    step.gate_i.resize(H);
    step.gate_f.resize(H);
    step.gate_o.resize(H);
    step.gate_g.resize(H);
    step.c.resize(H);
    step.tanh_c.resize(H);
    step.h.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
      const double gi = sigmoid(pre[kGateInput * H + j]);
      const double gf = sigmoid(pre[kGateForget * H + j]);
      const double go = sigmoid(pre[kGateOutput * H + j]);
      const double gg = std::tanh(pre[kGateCandidate * H + j]);
      const double cj = gf * c[j] + gi * gg;
      const double tc = std::tanh(cj);
      const double hj = go * tc;
      if (!std::isfinite(hj))
        fail("lstm_forward: non-finite activation at step ", t);
      step.gate_i[j] = gi;
      step.gate_f[j] = gf;
      step.gate_o[j] = go;
      step.gate_g[j] = gg;
      step.c[j] = cj;
      step.tanh_c[j] = tc;
      step.h[j] = hj;
    }
    c = step.c;
    h = step.h;
    if (cache) cache->steps.push_back(std::move(step));
  }

  double z = m.b_out;
  for (std::size_t j = 0; j < H; ++j) z += m.w_out[j] * h[j];
  const double p = sigmoid(z);
  if (!std::isfinite(p)) fail("lstm_forward: non-finite output");
  if (cache) {
    cache->h_final = h;
    cache->logit = z;
    cache->probability = p;
  }
  return p;
}

void lstm_backward(const LSTMClassifier& m, const LSTMForwardCache& cache,
                   double y, LSTMGradients* g) {
  const std::size_t H = m.shape.hidden_units;
  const std::size_t D = m.shape.input_dim;

  // d(CE)/dz for sigmoid output.
  const double dz = cache.probability - y;
  g->b_out += dz;
  std::vector<double> dh(H), dc(H, 0.0);
  for (std::size_t j = 0; j < H; ++j) {
    g->w_out[j] += dz * cache.h_final[j];
    dh[j] = dz * m.w_out[j];
  }

  std::vector<double> da(4 * H);
  for (std::size_t ti = cache.steps.size(); ti-- > 0;) {
    const LSTMStepCache& step = cache.steps[ti];
    if (step.masked) continue;

    // Previous unmasked step supplies h_{t-1}, c_{t-1}.
    const LSTMStepCache* prev = nullptr;
    for (std::size_t k = ti; k-- > 0;) {
      if (!cache.steps[k].masked) {
        prev = &cache.steps[k];
        break;
      }
    }

    for (std::size_t j = 0; j < H; ++j) {
      const double go = step.gate_o[j];
      const double tc = step.tanh_c[j];
      const double dho = dh[j];
      const double dgo = dho * tc;
      const double dcj = dc[j] + dho * go * (1.0 - tc * tc);
      const double c_prev = prev ? prev->c[j] : 0.0;
      const double dgf = dcj * c_prev;
      const double dgi = dcj * step.gate_g[j];
      const double dgg = dcj * step.gate_i[j];

      da[kGateInput * H + j] = dgi * step.gate_i[j] * (1.0 - step.gate_i[j]);
      da[kGateForget * H + j] = dgf * step.gate_f[j] * (1.0 - step.gate_f[j]);
      da[kGateOutput * H + j] = dgo * go * (1.0 - go);
      da[kGateCandidate * H + j] =
          dgg * (1.0 - step.gate_g[j] * step.gate_g[j]);
      dc[j] = dcj * step.gate_f[j];
    }

    for (int gate = 0; gate < 4; ++gate) {
      const double* da_g = da.data() + static_cast<std::size_t>(gate) * H;
      double* gwx = g->w_input[gate].data();
      double* gwh = g->w_hidden[gate].data();
      for (std::size_t j = 0; j < H; ++j) {
        const double a = da_g[j];
        g->bias[gate][j] += a;
        double* gwx_row = gwx + j * D;
        for (std::size_t k = 0; k < D; ++k) gwx_row[k] += a * step.x[k];
        if (prev) {
          double* gwh_row = gwh + j * H;
          for (std::size_t k = 0; k < H; ++k) gwh_row[k] += a * prev->h[k];
        }
      }
    }

    std::fill(dh.begin(), dh.end(), 0.0);
    if (prev) {
      for (int gate = 0; gate < 4; ++gate) {
        const double* da_g = da.data() + static_cast<std::size_t>(gate) * H;
        const double* wh = m.w_hidden[gate].data();
        for (std::size_t j = 0; j < H; ++j) {
          const double a = da_g[j];
          const double* wh_row = wh + j * H;
          for (std::size_t k = 0; k < H; ++k) dh[k] += a * wh_row[k];
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

void embed_sequence(const TokenStream& ts, const EmbeddingTable& embeddings,
                    std::size_t max_seq_len,
                    std::vector<std::vector<double>>* inputs,
                    std::vector<bool>* mask) {
  inputs->clear();
  mask->clear();
  const std::size_t len = std::min(ts.tokens.size(), max_seq_len);
  for (std::size_t i = 0; i < len; ++i) {
    inputs->push_back(embeddings.lookup(ts.tokens[i].surface));
    mask->push_back(true);
  }
}

void apply_update(std::vector<double>& param, const std::vector<double>& grad,
                  double lr) {
  for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
}

}  // namespace

LSTMTrainResult lstm_fit(const LSTMClassifier& init,
                         const std::vector<TokenStream>& sentences,
                         const std::vector<Label>& labels,
                         const EmbeddingTable& embeddings,
                         const LSTMHyperparams& hp) {
  if (sentences.size() != labels.size())
    fail("lstm_fit: sentence/label count mismatch");
  if (sentences.empty()) fail("lstm_fit: empty training set");
  if (embeddings.dim() != init.shape.input_dim)
    fail("lstm_fit: embedding dimension ", embeddings.dim(),
         " does not match model input dimension ", init.shape.input_dim);

  LSTMTrainResult result;
  result.model = init;
  LSTMClassifier& m = result.model;

  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(hp.seed);

  std::vector<std::vector<double>> inputs;
  std::vector<bool> mask;
  LSTMForwardCache cache;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const double lr =
        hp.learning_rate / (1.0 + hp.decay * static_cast<double>(epoch));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t i : order) {
      embed_sequence(sentences[i], embeddings, m.shape.max_seq_len, &inputs,
                     &mask);
      const double y = labels[i] == Label::Suggestion ? 1.0 : 0.0;
      double p;
      try {
        p = lstm_forward(m, inputs, mask, &cache);
      } catch (const Error& e) {
        fail("lstm_fit: diverged at epoch ", epoch, ": ", e.what());
      }
      const double eps = 1e-12;
      epoch_loss += -(y * std::log(p + eps) + (1.0 - y) * std::log(1.0 - p + eps));

      LSTMGradients grad = LSTMGradients::zeros(m.shape);
      lstm_backward(m, cache, y, &grad);
      const double norm = grad.global_norm();
      if (!std::isfinite(norm))
        fail("lstm_fit: non-finite gradient at epoch ", epoch);
      if (norm > hp.clip_norm && norm > 0.0) grad.scale(hp.clip_norm / norm);

      for (int gate = 0; gate < 4; ++gate) {
        apply_update(m.w_input[gate], grad.w_input[gate], lr);
        apply_update(m.w_hidden[gate], grad.w_hidden[gate], lr);
        apply_update(m.bias[gate], grad.bias[gate], lr);
      }
      apply_update(m.w_out, grad.w_out, lr);
      m.b_out -= lr * grad.b_out;
    }
    epoch_loss /= static_cast<double>(sentences.size());
    if (!std::isfinite(epoch_loss))
      fail("lstm_fit: non-finite loss at epoch ", epoch);
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

double lstm_decision_value(const LSTMClassifier& m, const TokenStream& ts,
                           const EmbeddingTable& embeddings) {
  std::vector<std::vector<double>> inputs;
  std::vector<bool> mask;
  embed_sequence(ts, embeddings, m.shape.max_seq_len, &inputs, &mask);
  LSTMForwardCache cache;
  lstm_forward(m, inputs, mask, &cache);
  return cache.logit;  // sign-compatible with probability > 0.5
}

Label lstm_predict(const LSTMClassifier& m, const TokenStream& ts,
                   const EmbeddingTable& embeddings) {
  return lstm_decision_value(m, ts, embeddings) > 0.0 ? Label::Suggestion
                                                      : Label::NonSuggestion;
}

const UlmfitReference& ulmfit_reference() {
  static const UlmfitReference ref;
  return ref;
}

}  // namespace suggest
