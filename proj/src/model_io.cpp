#include "suggest/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "suggest/error.hpp"
#include "suggest/fingerprint.hpp"

namespace suggest {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

void write_vector(std::ostream& out, const char* tag,
                  const std::vector<double>& v) {
  out << tag << " " << v.size() << "\n";
  for (double x : v) out << fmt_double(x) << "\n";
}

std::vector<double> read_vector(std::istream& in, const char* tag,
                                const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) fail(path, ": truncated before ", tag);
  std::istringstream hdr(line);
  std::string name;
  std::size_t count = 0;
  if (!(hdr >> name >> count) || name != tag)
    fail(path, ": expected \"", tag, " <count>\", got \"", line, "\"");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      fail(path, ": truncated inside ", tag);
    v[i] = parse_f64(line, path + " " + tag);
  }
  return v;
}

std::string read_kv(std::istream& in, const char* key, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) fail(path, ": truncated before key ", key);
  auto sp = line.find(' ');
  if (sp == std::string::npos || line.substr(0, sp) != key)
    fail(path, ": expected key \"", key, "\", got \"", line, "\"");
  return line.substr(sp + 1);
}

}  // namespace

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::NaiveBayes: return "nb";
    case ModelKind::LogReg: return "logreg";
    case ModelKind::Svm: return "svm";
    case ModelKind::Lstm: return "lstm";
  }
  return "nb";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "nb") return ModelKind::NaiveBayes;
  if (name == "logreg") return ModelKind::LogReg;
  if (name == "svm") return ModelKind::Svm;
  if (name == "lstm") return ModelKind::Lstm;
  fail("unknown model kind \"", name, "\" (expected nb, logreg, svm or lstm)");
}

const char* vectorizer_kind_name(VectorizerKind k) {
  switch (k) {
    case VectorizerKind::Count: return "count";
    case VectorizerKind::Tfidf: return "tfidf";
    case VectorizerKind::Embeddings: return "embeddings";
  }
  return "count";
}

double ModelBundle::decision_value(const SparseVector& x) const {
  if (kind == ModelKind::NaiveBayes)
    return nb_decision_value(std::get<NBModel>(model), x);
  return linear_decision_value(std::get<LinearModel>(model), x);
}

void save_model(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write model file: ", path);
  out << "suggestmine-model v1\n";
  out << "kind " << model_kind_name(bundle.kind) << "\n";
  out << "vectorizer " << vectorizer_kind_name(bundle.vectorizer) << "\n";
  out << "features_fingerprint " << fingerprint_hex(bundle.features_fingerprint)
      << "\n";
  out << "normalizer_fingerprint "
      << fingerprint_hex(bundle.normalizer_fingerprint) << "\n";

  if (bundle.kind == ModelKind::NaiveBayes) {
    const NBModel& m = std::get<NBModel>(bundle.model);
    out << "alpha " << fmt_double(m.alpha) << "\n";
    out << "dim " << m.dim() << "\n";
    out << "log_prior " << fmt_double(m.log_prior[0]) << " "
        << fmt_double(m.log_prior[1]) << "\n";
    write_vector(out, "log_likelihood_neg", m.log_likelihood[0]);
    write_vector(out, "log_likelihood_pos", m.log_likelihood[1]);
  } else if (bundle.kind == ModelKind::LogReg || bundle.kind == ModelKind::Svm) {
    const LinearModel& m = std::get<LinearModel>(bundle.model);
    out << "loss " << (m.loss_kind == LossKind::Logistic ? "logistic" : "hinge")
        << "\n";
    out << "l2 " << fmt_double(m.hp.l2) << "\n";
    out << "learning_rate " << fmt_double(m.hp.learning_rate) << "\n";
    out << "decay " << fmt_double(m.hp.decay) << "\n";
    out << "epochs " << m.hp.epochs << "\n";
    out << "seed " << m.hp.seed << "\n";
    out << "bias " << fmt_double(m.bias) << "\n";
    write_vector(out, "weights", m.weights);
  } else {
    const LSTMClassifier& m = std::get<LSTMClassifier>(bundle.model);
    out << "input_dim " << m.shape.input_dim << "\n";
    out << "hidden_units " << m.shape.hidden_units << "\n";
    out << "max_seq_len " << m.shape.max_seq_len << "\n";
    out << "init_seed " << m.init_seed << "\n";
    static const char* gate_names[4] = {"input", "forget", "output", "cand"};
    for (int g = 0; g < 4; ++g) {
      write_vector(out, concat("w_input_", gate_names[g]).c_str(), m.w_input[g]);
      write_vector(out, concat("w_hidden_", gate_names[g]).c_str(),
                   m.w_hidden[g]);
      write_vector(out, concat("bias_", gate_names[g]).c_str(), m.bias[g]);
    }
    write_vector(out, "w_out", m.w_out);
    out << "b_out " << fmt_double(m.b_out) << "\n";
  }
  out << "end\n";
  if (!out) fail("failed writing model file: ", path);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open model file: ", path);
  std::string line;
  if (!std::getline(in, line) || line != "suggestmine-model v1")
    fail(path, ": not a model file (bad magic line)");

  ModelBundle bundle;
  bundle.kind = model_kind_from_name(read_kv(in, "kind", path));
  const std::string vec = read_kv(in, "vectorizer", path);
  if (vec == "count") bundle.vectorizer = VectorizerKind::Count;
  else if (vec == "tfidf") bundle.vectorizer = VectorizerKind::Tfidf;
  else if (vec == "embeddings") bundle.vectorizer = VectorizerKind::Embeddings;
  else fail(path, ": unknown vectorizer \"", vec, "\"");
  bundle.features_fingerprint =
      fingerprint_from_hex(read_kv(in, "features_fingerprint", path));
  bundle.normalizer_fingerprint =
      fingerprint_from_hex(read_kv(in, "normalizer_fingerprint", path));

  if (bundle.kind == ModelKind::NaiveBayes) {
    NBModel m;
    m.alpha = parse_f64(read_kv(in, "alpha", path), path + " alpha");
    const std::size_t dim = parse_u64(read_kv(in, "dim", path), path + " dim");
    std::istringstream priors(read_kv(in, "log_prior", path));
    if (!(priors >> m.log_prior[0] >> m.log_prior[1]))
      fail(path, ": malformed log_prior line");
    m.log_likelihood[0] = read_vector(in, "log_likelihood_neg", path);
    m.log_likelihood[1] = read_vector(in, "log_likelihood_pos", path);
    if (m.log_likelihood[0].size() != dim || m.log_likelihood[1].size() != dim)
      fail(path, ": log_likelihood size does not match dim");
    bundle.model = std::move(m);
  } else if (bundle.kind == ModelKind::LogReg || bundle.kind == ModelKind::Svm) {
    LinearModel m;
    const std::string loss = read_kv(in, "loss", path);
    if (loss == "logistic") m.loss_kind = LossKind::Logistic;
    else if (loss == "hinge") m.loss_kind = LossKind::Hinge;
    else fail(path, ": unknown loss \"", loss, "\"");
    m.hp.l2 = parse_f64(read_kv(in, "l2", path), path + " l2");
    m.hp.learning_rate =
        parse_f64(read_kv(in, "learning_rate", path), path + " learning_rate");
    m.hp.decay = parse_f64(read_kv(in, "decay", path), path + " decay");
    m.hp.epochs = parse_u64(read_kv(in, "epochs", path), path + " epochs");
    m.hp.seed = parse_u64(read_kv(in, "seed", path), path + " seed");
    m.bias = parse_f64(read_kv(in, "bias", path), path + " bias");
    m.weights = read_vector(in, "weights", path);
    bundle.model = std::move(m);
  } else {
    LSTMClassifier m;
    m.shape.input_dim =
        parse_u64(read_kv(in, "input_dim", path), path + " input_dim");
    m.shape.hidden_units =
        parse_u64(read_kv(in, "hidden_units", path), path + " hidden_units");
    m.shape.max_seq_len =
        parse_u64(read_kv(in, "max_seq_len", path), path + " max_seq_len");
    m.init_seed = parse_u64(read_kv(in, "init_seed", path), path + " init_seed");
    static const char* gate_names[4] = {"input", "forget", "output", "cand"};
    for (int g = 0; g < 4; ++g) {
      m.w_input[g] =
          read_vector(in, concat("w_input_", gate_names[g]).c_str(), path);
      m.w_hidden[g] =
          read_vector(in, concat("w_hidden_", gate_names[g]).c_str(), path);
      m.bias[g] = read_vector(in, concat("bias_", gate_names[g]).c_str(), path);
      if (m.w_input[g].size() != m.shape.hidden_units * m.shape.input_dim ||
          m.w_hidden[g].size() != m.shape.hidden_units * m.shape.hidden_units ||
          m.bias[g].size() != m.shape.hidden_units)
        fail(path, ": LSTM parameter block has inconsistent shape");
    }
    m.w_out = read_vector(in, "w_out", path);
    if (m.w_out.size() != m.shape.hidden_units)
      fail(path, ": w_out size does not match hidden_units");
    m.b_out = parse_f64(read_kv(in, "b_out", path), path + " b_out");
    bundle.model = std::move(m);
  }

  if (!std::getline(in, line) || line != "end")
    fail(path, ": missing end marker");
  return bundle;
}

void verify_vocabulary(const ModelBundle& bundle, const Vocabulary& vocab) {
  if (bundle.kind == ModelKind::Lstm)
    fail("LSTM models carry an embedding fingerprint, not a vocabulary");
  if (vocab.fingerprint() != bundle.features_fingerprint)
    fail("vocabulary fingerprint ", fingerprint_hex(vocab.fingerprint()),
         " does not match the model's ",
         fingerprint_hex(bundle.features_fingerprint),
         " (model was trained with a different vocabulary)");
}

void verify_normalizer(const ModelBundle& bundle, const NormalizerConfig& cfg) {
  if (cfg.fingerprint() != bundle.normalizer_fingerprint)
    fail("normalizer fingerprint ", fingerprint_hex(cfg.fingerprint()),
         " does not match the model's ",
         fingerprint_hex(bundle.normalizer_fingerprint),
         " (model was trained with different preprocessing)");
}

void verify_embeddings(const ModelBundle& bundle, const EmbeddingTable& table) {
  if (table.fingerprint() != bundle.features_fingerprint)
    fail("embedding fingerprint ", fingerprint_hex(table.fingerprint()),
         " does not match the model's ",
         fingerprint_hex(bundle.features_fingerprint),
         " (model was trained with different embeddings)");
}

// ---------------------------------------------------------------------------
// Normalizer configuration persistence
// ---------------------------------------------------------------------------

namespace {

const char* lowercase_policy_name(LowercasePolicy p) {
  switch (p) {
    case LowercasePolicy::Preserve: return "preserve";
    case LowercasePolicy::LowercaseAll: return "lowercase_all";
    case LowercasePolicy::LowercaseModifiedOnly: return "lowercase_modified_only";
  }
  return "lowercase_modified_only";
}

LowercasePolicy lowercase_policy_from_name(const std::string& s) {
  if (s == "preserve") return LowercasePolicy::Preserve;
  if (s == "lowercase_all") return LowercasePolicy::LowercaseAll;
  if (s == "lowercase_modified_only") return LowercasePolicy::LowercaseModifiedOnly;
  fail("unknown lowercase policy \"", s, "\"");
}

const char* punct_policy_name(PunctPolicy p) {
  switch (p) {
    case PunctPolicy::DropQuoted: return "drop_quoted";
    case PunctPolicy::KeepAll: return "keep_all";
    case PunctPolicy::DropAll: return "drop_all";
  }
  return "drop_quoted";
}

PunctPolicy punct_policy_from_name(const std::string& s) {
  if (s == "drop_quoted") return PunctPolicy::DropQuoted;
  if (s == "keep_all") return PunctPolicy::KeepAll;
  if (s == "drop_all") return PunctPolicy::DropAll;
  fail("unknown punct policy \"", s, "\"");
}

}  // namespace

void save_normalizer_config(const NormalizerConfig& cfg,
                            const std::string& path) {
  ordered_json doc;
  doc["version"] = 1;
  doc["lowercase_policy"] = lowercase_policy_name(cfg.lowercase_policy);
  doc["punct_policy"] = punct_policy_name(cfg.punct_policy);
  ordered_json slang = ordered_json::array();
  for (const auto& [k, v] : cfg.slang_lexicon) slang.push_back({k, v});
  doc["slang"] = std::move(slang);
  ordered_json emoticons = ordered_json::array();
  for (const auto& [k, v] : cfg.emoticon_lexicon)
    emoticons.push_back({k, mask_string(v)});
  doc["emoticons"] = std::move(emoticons);
  ordered_json rules = ordered_json::array();
  for (const PatternRule& r : cfg.rules)
    rules.push_back({r.name, r.mask ? mask_string(*r.mask) : "-",
                     r.icase ? "i" : "-", r.pattern.empty() ? "-" : r.pattern});
  doc["rules"] = std::move(rules);

  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write normalizer config: ", path);
  out << doc.dump(2) << "\n";
  if (!out) fail("failed writing normalizer config: ", path);
}

NormalizerConfig load_normalizer_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open normalizer config: ", path);
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    fail(path, ": invalid JSON: ", e.what());
  }
  if (!doc.contains("version") || doc["version"] != 1)
    fail(path, ": unsupported normalizer config version");

  NormalizerConfig cfg;
  cfg.lowercase_policy =
      lowercase_policy_from_name(doc.at("lowercase_policy").get<std::string>());
  cfg.punct_policy =
      punct_policy_from_name(doc.at("punct_policy").get<std::string>());
  for (const auto& entry : doc.at("slang"))
    cfg.slang_lexicon[entry.at(0).get<std::string>()] =
        entry.at(1).get<std::string>();
  for (const auto& entry : doc.at("emoticons")) {
    auto mask = mask_from_string(entry.at(1).get<std::string>());
    if (!mask) fail(path, ": unknown emoticon mask \"",
                    entry.at(1).get<std::string>(), "\"");
    cfg.emoticon_lexicon[entry.at(0).get<std::string>()] = *mask;
  }
  std::string rule_tsv = "version\t1\n";
  for (const auto& entry : doc.at("rules"))
    rule_tsv += entry.at(0).get<std::string>() + "\t" +
                entry.at(1).get<std::string>() + "\t" +
                entry.at(2).get<std::string>() + "\t" +
                entry.at(3).get<std::string>() + "\n";
  cfg.rules = parse_rule_table(rule_tsv, path);
  return cfg;
}

}  // namespace suggest
