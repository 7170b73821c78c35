#include "newscheck/artifact.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "newscheck/digest.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'W', 'S', 'C', 'H', 'E', 'C', 'K'};

template <class T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& label) : bytes_(bytes), label_(label) {}

  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(label_ + ": truncated artifact");
  }
  std::string_view bytes_;
  const std::string& label_;
  std::size_t pos_ = 0;
};

// Fixed-width little-endian arrays inside CBOR payloads.
template <class T>
json to_binary(const std::vector<T>& v) {
  std::vector<std::uint8_t> out;
  out.reserve(v.size() * sizeof(T));
  for (const T& x : v) {
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>) {
      bits = std::bit_cast<std::uint64_t>(x);
    } else {
      bits = static_cast<std::uint64_t>(x);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
  }
  return json::binary(std::move(out));
}

template <class T>
std::vector<T> from_binary(const json& j, const char* what) {
  if (!j.is_binary()) throw FormatError(std::string("field ") + what + " is not a binary array");
  const auto& b = j.get_binary();
  if (b.size() % sizeof(T) != 0) throw FormatError(std::string("field ") + what + " has a ragged length");
  std::vector<T> out(b.size() / sizeof(T));
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(b[k * sizeof(T) + i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>) {
      out[k] = std::bit_cast<double>(bits);
    } else {
      out[k] = static_cast<T>(bits);
    }
  }
  return out;
}

std::string to_cbor(const json& j) {
  const auto bytes = json::to_cbor(j);
  return std::string(bytes.begin(), bytes.end());
}

json from_cbor(const std::string& payload, const std::string& label, const std::string& section) {
  try {
    return json::from_cbor(payload);
  } catch (const json::exception& e) {
    throw FormatError(label + ": section " + section + " is not valid CBOR: " + e.what());
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw FormatError(what);
}

// ------------------------------------------------------------ feature stages

json tfidf_to_json(const TfidfModel& m) {
  const auto& v = m.vocabulary;
  std::vector<std::uint64_t> df(v.document_frequency.begin(), v.document_frequency.end());
  return json{{"terms", v.terms},
              {"df", to_binary(df)},
              {"n_documents", v.n_documents},
              {"ngram_range", {v.ngram_range.lo, v.ngram_range.hi}},
              {"min_df", v.min_df},
              {"idf", to_binary(m.idf)},
              {"l2_normalize", m.l2_normalize}};
}

TfidfModel tfidf_from_json(const json& j) {
  TfidfModel m;
  auto& v = m.vocabulary;
  v.terms = j.at("terms").get<std::vector<std::string>>();
  const auto df = from_binary<std::uint64_t>(j.at("df"), "df");
  v.document_frequency.assign(df.begin(), df.end());
  v.n_documents = j.at("n_documents").get<std::size_t>();
  v.ngram_range = {j.at("ngram_range").at(0).get<int>(), j.at("ngram_range").at(1).get<int>()};
  v.min_df = j.at("min_df").get<std::size_t>();
  m.idf = from_binary<double>(j.at("idf"), "idf");
  m.l2_normalize = j.at("l2_normalize").get<bool>();
  require(v.document_frequency.size() == v.terms.size() && m.idf.size() == v.terms.size(),
          "tfidf section has mismatched array lengths");
  v.rebuild_index();
  return m;
}

json phraser_to_json(const Phraser& p) {
  json pairs = json::array();
  for (const auto& [ab, score] : p.pair_score) pairs.push_back(json::array({ab.first, ab.second, score}));
  return json{{"threshold", p.threshold}, {"min_count", p.min_count}, {"delimiter", p.delimiter}, {"pairs", pairs}};
}

Phraser phraser_from_json(const json& j) {
  Phraser p;
  p.threshold = j.at("threshold").get<double>();
  p.min_count = j.at("min_count").get<std::size_t>();
  p.delimiter = j.at("delimiter").get<std::string>();
  for (const auto& e : j.at("pairs")) {
    p.pair_score[{e.at(0).get<std::string>(), e.at(1).get<std::string>()}] = e.at(2).get<double>();
  }
  return p;
}

json w2v_to_json(const EmbeddingModel& m) {
  return json{{"config", m.config},
              {"terms", m.terms},
              {"frequency", to_binary(m.frequency)},
              {"dim", m.dim()},
              {"input", to_binary(m.input_vectors.data)},
              {"output", to_binary(m.output_vectors.data)},
              {"epoch_loss", to_binary(m.epoch_loss)}};
}

EmbeddingModel w2v_from_json(const json& j) {
  EmbeddingModel m;
  m.config = j.at("config").get<W2vConfig>();
  m.terms = j.at("terms").get<std::vector<std::string>>();
  m.frequency = from_binary<std::uint64_t>(j.at("frequency"), "frequency");
  const auto dim = j.at("dim").get<std::size_t>();
  m.input_vectors = Matrix(m.terms.size(), dim);
  m.output_vectors = Matrix(m.terms.size(), dim);
  m.input_vectors.data = from_binary<double>(j.at("input"), "input");
  m.output_vectors.data = from_binary<double>(j.at("output"), "output");
  m.epoch_loss = from_binary<double>(j.at("epoch_loss"), "epoch_loss");
  require(m.frequency.size() == m.terms.size() && m.input_vectors.data.size() == m.terms.size() * dim &&
              m.output_vectors.data.size() == m.terms.size() * dim,
          "w2v section has mismatched array lengths");
  m.rebuild_index();
  return m;
}

// --------------------------------------------------------------------- models

json tree_to_json(const DecisionTree& t) {
  std::vector<std::int32_t> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    left.push_back(n.left);
    right.push_back(n.right);
    threshold.push_back(n.threshold);
    value.push_back(n.value);
  }
  return json{{"feature", to_binary(feature)},
              {"threshold", to_binary(threshold)},
              {"left", to_binary(left)},
              {"right", to_binary(right)},
              {"value", to_binary(value)}};
}

DecisionTree tree_from_json(const json& j, std::size_t dim) {
  const auto feature = from_binary<std::int32_t>(j.at("feature"), "feature");
  const auto left = from_binary<std::int32_t>(j.at("left"), "left");
  const auto right = from_binary<std::int32_t>(j.at("right"), "right");
  const auto threshold = from_binary<double>(j.at("threshold"), "threshold");
  const auto value = from_binary<double>(j.at("value"), "value");
  const std::size_t n = feature.size();
  require(n > 0 && left.size() == n && right.size() == n && threshold.size() == n && value.size() == n,
          "tree arrays have mismatched lengths");
  DecisionTree t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = t.nodes[i];
    node = {feature[i], threshold[i], left[i], right[i], value[i]};
    if (node.feature >= 0) {
      // Children always follow their parent, which also rules out cycles.
      require(static_cast<std::size_t>(node.feature) < dim, "tree splits on a feature beyond the model dimension");
      require(node.left > static_cast<std::int32_t>(i) && node.right > static_cast<std::int32_t>(i) &&
                  static_cast<std::size_t>(node.left) < n && static_cast<std::size_t>(node.right) < n,
              "tree has invalid child links");
    }
  }
  return t;
}

}  // namespace

json model_to_json(const ClassifierModel& model) {
  if (const auto* m = std::get_if<LogRegModel>(&model)) {
    return json{{"params", {{"C", m->params.C}, {"max_epochs", m->params.max_epochs}, {"tol", m->params.tol}}},
                {"weights", to_binary(m->weights)},
                {"bias", m->bias},
                {"epochs_run", m->epochs_run}};
  }
  if (const auto* m = std::get_if<SvmModel>(&model)) {
    const auto& sv = m->support_vectors;
    std::vector<std::uint64_t> row_ptr(sv.row_ptr().begin(), sv.row_ptr().end());
    std::vector<std::uint64_t> idx(m->support_indices.begin(), m->support_indices.end());
    return json{{"params",
                 {{"C", m->params.C}, {"gamma", m->params.gamma}, {"tol", m->params.tol}, {"cache_mb", m->params.cache_mb}}},
                {"dim", m->dim},
                {"sv_row_ptr", to_binary(row_ptr)},
                {"sv_cols", to_binary(sv.col_indices())},
                {"sv_values", to_binary(sv.values())},
                {"dual_coefs", to_binary(m->dual_coefs)},
                {"support_indices", to_binary(idx)},
                {"intercept", m->intercept},
                {"platt_a", m->platt_a},
                {"platt_b", m->platt_b},
                {"iterations", m->iterations}};
  }
  if (const auto* m = std::get_if<ForestModel>(&model)) {
    json trees = json::array();
    for (const auto& t : m->trees) trees.push_back(tree_to_json(t));
    return json{{"params",
                 {{"n_estimators", m->params.n_estimators},
                  {"seed", m->params.seed},
                  {"bootstrap", m->params.bootstrap},
                  {"max_features", m->params.max_features}}},
                {"dim", m->dim},
                {"trees", trees}};
  }
  if (const auto* m = std::get_if<AdaBoostModel>(&model)) {
    std::vector<std::uint32_t> features;
    std::vector<double> thresholds;
    std::vector<std::int32_t> polarity;
    for (const auto& s : m->stumps) {
      features.push_back(s.feature);
      thresholds.push_back(s.threshold);
      polarity.push_back(s.polarity);
    }
    return json{{"params", {{"n_estimators", m->params.n_estimators}, {"learning_rate", m->params.learning_rate}}},
                {"dim", m->dim},
                {"features", to_binary(features)},
                {"thresholds", to_binary(thresholds)},
                {"polarity", to_binary(polarity)},
                {"weights", to_binary(m->stump_weights)},
                {"errors", to_binary(m->stump_errors)}};
  }
  const auto& m = std::get<GbdtModel>(model);
  json trees = json::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  return json{{"params",
               {{"n_estimators", m.params.n_estimators},
                {"learning_rate", m.params.learning_rate},
                {"max_depth", m.params.max_depth},
                {"max_bins", m.params.max_bins},
                {"min_data_in_leaf", m.params.min_data_in_leaf},
                {"lambda_l2", m.params.lambda_l2},
                {"min_sum_hessian", m.params.min_sum_hessian},
                {"leaf_wise", m.params.leaf_wise},
                {"num_leaves", m.params.num_leaves}}},
              {"dim", m.dim},
              {"base_score", m.base_score},
              {"trees", trees}};
}

ClassifierModel model_from_json(ModelFamily family, const json& j) {
  const auto& p = j.at("params");
  switch (family) {
    case ModelFamily::LogReg: {
      LogRegModel m;
      m.params = {p.at("C").get<double>(), p.at("max_epochs").get<int>(), p.at("tol").get<double>()};
      m.weights = from_binary<double>(j.at("weights"), "weights");
      m.bias = j.at("bias").get<double>();
      m.epochs_run = j.at("epochs_run").get<int>();
      return m;
    }
    case ModelFamily::Svm: {
      SvmModel m;
      m.params.C = p.at("C").get<double>();
      m.params.gamma = p.at("gamma").get<double>();
      m.params.tol = p.at("tol").get<double>();
      m.params.cache_mb = p.at("cache_mb").get<double>();
      m.dim = j.at("dim").get<std::size_t>();
      const auto row_ptr = from_binary<std::uint64_t>(j.at("sv_row_ptr"), "sv_row_ptr");
      try {
        m.support_vectors = SparseMatrix::from_csr(std::vector<std::size_t>(row_ptr.begin(), row_ptr.end()),
                                                   from_binary<std::uint32_t>(j.at("sv_cols"), "sv_cols"),
                                                   from_binary<double>(j.at("sv_values"), "sv_values"), m.dim);
      } catch (const ValidationError& e) {
        throw FormatError(std::string("svm support vectors: ") + e.what());
      }
      m.dual_coefs = from_binary<double>(j.at("dual_coefs"), "dual_coefs");
      const auto idx = from_binary<std::uint64_t>(j.at("support_indices"), "support_indices");
      m.support_indices.assign(idx.begin(), idx.end());
      m.intercept = j.at("intercept").get<double>();
      m.platt_a = j.at("platt_a").get<double>();
      m.platt_b = j.at("platt_b").get<double>();
      m.iterations = j.at("iterations").get<std::size_t>();
      require(m.dual_coefs.size() == m.support_vectors.rows(), "svm dual coefficients do not match support vectors");
      return m;
    }
    case ModelFamily::RandomForest: {
      ForestModel m;
      m.params = {p.at("n_estimators").get<int>(), p.at("seed").get<std::uint64_t>(), p.at("bootstrap").get<bool>(),
                  p.at("max_features").get<std::size_t>()};
      m.dim = j.at("dim").get<std::size_t>();
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t, m.dim));
      require(static_cast<int>(m.trees.size()) == m.params.n_estimators, "forest tree count differs from n_estimators");
      return m;
    }
    case ModelFamily::AdaBoost: {
      AdaBoostModel m;
      m.params = {p.at("n_estimators").get<int>(), p.at("learning_rate").get<double>()};
      m.dim = j.at("dim").get<std::size_t>();
      const auto features = from_binary<std::uint32_t>(j.at("features"), "features");
      const auto thresholds = from_binary<double>(j.at("thresholds"), "thresholds");
      const auto polarity = from_binary<std::int32_t>(j.at("polarity"), "polarity");
      m.stump_weights = from_binary<double>(j.at("weights"), "weights");
      m.stump_errors = from_binary<double>(j.at("errors"), "errors");
      require(thresholds.size() == features.size() && polarity.size() == features.size() &&
                  m.stump_weights.size() == features.size() && m.stump_errors.size() == features.size(),
              "adaboost arrays have mismatched lengths");
      for (std::size_t i = 0; i < features.size(); ++i) {
        require(features[i] < m.dim, "adaboost stump feature beyond model dimension");
        m.stumps.push_back({features[i], thresholds[i], polarity[i]});
      }
      return m;
    }
    case ModelFamily::Gbdt: {
      GbdtModel m;
      m.params.n_estimators = p.at("n_estimators").get<int>();
      m.params.learning_rate = p.at("learning_rate").get<double>();
      m.params.max_depth = p.at("max_depth").get<int>();
      m.params.max_bins = p.at("max_bins").get<int>();
      m.params.min_data_in_leaf = p.at("min_data_in_leaf").get<int>();
      m.params.lambda_l2 = p.at("lambda_l2").get<double>();
      m.params.min_sum_hessian = p.at("min_sum_hessian").get<double>();
      m.params.leaf_wise = p.at("leaf_wise").get<bool>();
      m.params.num_leaves = p.at("num_leaves").get<int>();
      m.dim = j.at("dim").get<std::size_t>();
      m.base_score = j.at("base_score").get<double>();
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t, m.dim));
      return m;
    }
  }
  throw FormatError("unsupported model family");
}

std::string encode_artifact(const std::vector<ArtifactSection>& sections) {
  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kArtifactFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sections.size()));
  for (const auto& s : sections) {
    if (s.name.empty() || s.name.size() > 0xffff) throw ValidationError("artifact section name has a bad length");
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.name.size()));
    out += s.name;
    put_le<std::uint64_t>(out, s.payload.size());
    const Sha256 d = sha256(s.payload);
    out.append(reinterpret_cast<const char*>(d.data()), d.size());
    out += s.payload;
  }
  return out;
}

std::vector<ArtifactSection> decode_artifact(std::string_view bytes, const std::string& label) {
  Reader r(bytes, label);
  if (r.take(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) {
    throw FormatError(label + ": not an artifact (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kArtifactFormatVersion) {
    throw FormatError(label + ": unsupported artifact format version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>();
  std::vector<ArtifactSection> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    ArtifactSection s;
    s.name = std::string(r.take(r.get<std::uint16_t>()));
    const auto size = r.get<std::uint64_t>();
    const auto stored = r.take(32);
    s.payload = std::string(r.take(static_cast<std::size_t>(size)));
    const Sha256 actual = sha256(s.payload);
    if (std::memcmp(actual.data(), stored.data(), 32) != 0) {
      throw FormatError(label + ": checksum mismatch in section " + s.name);
    }
    sections.push_back(std::move(s));
  }
  if (!r.done()) throw FormatError(label + ": trailing bytes after last section");
  return sections;
}

namespace {

std::string model_section(ModelFamily f) { return "model/" + std::string(to_string(f)) + "/v1"; }

// Accepts known section kinds at version 1 only.
void check_section_name(const std::string& name, const std::string& label) {
  if (name == "metadata") return;
  const auto slash = name.rfind('/');
  if (slash == std::string::npos) throw FormatError(label + ": section " + name + " carries no version");
  const std::string base = name.substr(0, slash);
  const std::string version = name.substr(slash + 1);
  bool known = base == "tfidf" || base == "w2v" || base == "phraser";
  if (base.rfind("model/", 0) == 0) {
    try {
      parse_model_family(base.substr(6));
      known = true;
    } catch (const ConfigError&) {
      known = false;
    }
  }
  if (!known) throw FormatError(label + ": unknown section " + name);
  if (version != "v1") throw FormatError(label + ": unsupported version " + version + " of section " + base);
}

}  // namespace

std::string serialize_pipeline(const FittedPipeline& p, const json& extra) {
  json meta{{"format", "newscheck-pipeline"},
            {"descriptor", p.spec.descriptor()},
            {"family", std::string(to_string(p.spec.family))},
            {"feature_kind", std::string(to_string(p.spec.features.kind))},
            {"features", p.spec.features},
            {"params", p.spec.params},
            {"seed", p.spec.seed},
            {"prep", p.featurizer.prep},
            {"info", extra.is_null() ? json::object() : extra}};
  std::vector<ArtifactSection> sections{{"metadata", meta.dump()}};
  const auto& f = p.featurizer;
  if (f.tfidf) sections.push_back({"tfidf/v1", to_cbor(tfidf_to_json(*f.tfidf))});
  if (f.phraser) sections.push_back({"phraser/v1", to_cbor(phraser_to_json(*f.phraser))});
  if (f.embeddings) sections.push_back({"w2v/v1", to_cbor(w2v_to_json(*f.embeddings))});
  sections.push_back({model_section(family_of(p.model)), to_cbor(model_to_json(p.model))});
  return encode_artifact(sections);
}

LoadedPipeline deserialize_pipeline(std::string_view bytes, const std::string& label) {
  const auto sections = decode_artifact(bytes, label);
  std::map<std::string, const std::string*> by_name;
  for (const auto& s : sections) {
    check_section_name(s.name, label);
    if (!by_name.emplace(s.name, &s.payload).second) throw FormatError(label + ": duplicate section " + s.name);
  }
  auto section = [&](const std::string& name) -> const std::string& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError(label + ": missing section " + name);
    return *it->second;
  };

  LoadedPipeline out;
  try {
    out.metadata = json::parse(section("metadata"));
    auto& p = out.pipeline;
    p.spec.family = parse_model_family(out.metadata.at("family").get<std::string>());
    p.spec.features = out.metadata.at("features").get<FeatureConfig>();
    p.spec.params = out.metadata.at("params").get<ParamMap>();
    p.spec.seed = out.metadata.at("seed").get<std::uint64_t>();
    auto& f = p.featurizer;
    f.kind = p.spec.features.kind;
    f.prep = out.metadata.at("prep").get<PrepConfig>();
    if (f.kind == FeatureKind::Tfidf) {
      f.tfidf = tfidf_from_json(from_cbor(section("tfidf/v1"), label, "tfidf/v1"));
    } else {
      if (by_name.count("phraser/v1")) f.phraser = phraser_from_json(from_cbor(section("phraser/v1"), label, "phraser/v1"));
      f.embeddings = w2v_from_json(from_cbor(section("w2v/v1"), label, "w2v/v1"));
    }
    const std::string ms = model_section(p.spec.family);
    p.model = model_from_json(p.spec.family, from_cbor(section(ms), label, ms));
    if (dimension(p.model) != f.dimension()) throw FormatError("model and feature dimensions differ");
  } catch (const FormatError& e) {
    const std::string what = e.what();
    if (what.rfind(label, 0) == 0) throw;
    throw FormatError(label + ": " + what);
  } catch (const json::exception& e) {
    throw FormatError(label + ": malformed section content: " + e.what());
  } catch (const Error& e) {
    throw FormatError(label + ": " + e.what());
  }
  return out;
}

void save_pipeline(const std::filesystem::path& path, const FittedPipeline& pipeline, const json& extra) {
  const std::string bytes = serialize_pipeline(pipeline, extra);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

LoadedPipeline load_pipeline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open artifact " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_pipeline(ss.str(), path.filename().string());
}

std::string pipeline_digest(const FittedPipeline& pipeline) { return sha256_hex(serialize_pipeline(pipeline)); }

}  // namespace newscheck
