// Command-line front end: train, evaluate, ingest, serve, predict, score, synth.
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "newscheck/artifact.hpp"
#include "newscheck/config.hpp"
#include "newscheck/evaluation.hpp"
#include "newscheck/ingest.hpp"
#include "newscheck/report.hpp"
#include "newscheck/service.hpp"
#include "newscheck/synthetic.hpp"

namespace fs = std::filesystem;
using namespace newscheck;

namespace {

Corpus load_corpus(const fs::path& path) {
  if (fs::is_directory(path)) {
    auto imported = load_fakebr(path);
    for (const auto& w : imported.warnings) std::cerr << "warning: " << w << "\n";
    if (imported.skipped) std::cerr << "skipped " << imported.skipped << " files\n";
    return std::move(imported.corpus);
  }
  return load_jsonl(path);
}

ProjectConfig load_config(const std::string& path) {
  return path.empty() ? ProjectConfig::defaults() : load_project_config(path);
}

std::string read_text_arg(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) {
    std::ifstream in(arg, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw InputError("cannot write '" + out + "'");
}

Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fake-news detection toolkit for Brazilian Portuguese"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Project config (JSON)")->check(CLI::ExistingFile);

  // train
  auto* train = app.add_subcommand("train", "Fit one pipeline and write an artifact");
  std::string corpus_path, features = "tfidf", family = "logreg", out_path, unlabeled_path, register_dir, entry_id;
  std::vector<std::string> params;
  std::uint64_t seed = 1;
  int cv_folds = 0;
  train->add_option("--corpus", corpus_path, "JSONL file or Fake.br directory")->required();
  train->add_option("--features", features, "tfidf | cbow | skipgram");
  train->add_option("--model", family, "logreg | svm | rf | adaboost | gbdt");
  train->add_option("--params", params, "key=value hyperparameters");
  train->add_option("--out", out_path, "Artifact file")->required();
  train->add_option("--unlabeled", unlabeled_path, "Extra JSONL text for phrases and embeddings");
  train->add_option("--seed", seed);
  train->add_option("--cv", cv_folds, "Also cross-validate with this many folds and store cv_f1");
  train->add_option("--register", register_dir, "Add the artifact to this registry directory");
  train->add_option("--id", entry_id, "Registry id (default: model+features)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate one pipeline, a grid, or the 15-row comparison");
  int k = 5;
  std::string grid_path, report_kind = "table", report_out;
  bool one = false;
  evaluate->add_option("--corpus", corpus_path)->required();
  evaluate->add_option("--k", k);
  evaluate->add_option("--seed", seed);
  evaluate->add_option("--grid", grid_path, "Grid file: {\"features\", \"model\", \"grid\": {key: [values]}}");
  evaluate->add_flag("--single", one, "Evaluate only --features/--model/--params");
  evaluate->add_option("--features", features);
  evaluate->add_option("--model", family);
  evaluate->add_option("--params", params);
  evaluate->add_option("--report", report_kind)->check(CLI::IsMember({"table", "json"}));
  evaluate->add_option("--out", report_out, "Write the report here instead of stdout");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Fetch articles of one source into the news bank");
  std::string registry_file, bank_path, source_name;
  std::size_t limit = 100;
  ingest->add_option("--registry", registry_file, "Source registry (JSON)")->required();
  ingest->add_option("--bank", bank_path, "News bank JSONL")->required();
  ingest->add_option("--source", source_name)->required();
  ingest->add_option("--limit", limit);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP verification service");
  std::string registry_dir, bind = "127.0.0.1:8080", static_dir;
  serve->add_option("--registry", registry_dir, "Directory with manifest.json")->required();
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--static", static_dir, "Web page directory served at /");

  // predict
  auto* predict = app.add_subcommand("predict", "Verify one text with every registered model");
  std::string text_arg;
  bool as_json = false;
  predict->add_option("--registry", registry_dir)->required();
  predict->add_option("--text", text_arg, "Text, or a file holding it")->required();
  predict->add_flag("--json", as_json);

  // score
  auto* score = app.add_subcommand("score", "Share of articles judged true, per source of a news bank");
  score->add_option("--registry", registry_dir)->required();
  score->add_option("--bank", bank_path)->required();
  score->add_option("--report", report_kind)->check(CLI::IsMember({"table", "json"}));

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic two-vocabulary corpus as JSONL");
  std::size_t n_docs = 400;
  synth->add_option("--docs", n_docs);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const ProjectConfig config = load_config(config_path);

    if (*train) {
      const Corpus corpus = load_corpus(corpus_path);
      PipelineSpec spec;
      spec.features = config.feature(parse_feature_kind(features));
      spec.family = parse_model_family(family);
      spec.params = parse_param_list(params);
      spec.seed = seed;
      std::vector<TokenStream> unlabeled;
      if (!unlabeled_path.empty()) {
        const Corpus extra = load_jsonl(unlabeled_path);
        std::vector<std::size_t> all(extra.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        unlabeled = preprocess_documents(extra, all, spec.features.prep);
      }
      nlohmann::json info = nlohmann::json::object();
      if (cv_folds > 0) {
        CvOptions cv = config.cv;
        cv.k = cv_folds;
        cv.seed = seed;
        const CvReport report = cross_validate(spec, corpus, cv);
        info["cv_f1"] = report.mean.f1;
        info["cv_accuracy"] = report.mean.accuracy;
        info["cv_k"] = cv_folds;
        std::cerr << spec.descriptor() << ": cv accuracy " << report.mean.accuracy << ", f1 " << report.mean.f1 << "\n";
      }
      const auto train_idx = corpus.labeled_indices();
      const FittedPipeline fitted = fit_pipeline(spec, corpus, train_idx, unlabeled);
      info["documents"] = train_idx.size();
      save_pipeline(out_path, fitted, info);
      std::cerr << "wrote " << out_path << "\n";
      if (!register_dir.empty()) {
        nlohmann::json entry{{"id", entry_id.empty() ? spec.descriptor() : entry_id},
                             {"artifact", fs::relative(fs::absolute(out_path), fs::absolute(register_dir)).string()}};
        if (info.contains("cv_f1")) entry["cv_f1"] = info["cv_f1"];
        register_artifact(register_dir, entry);
      }
      return 0;
    }

    if (*evaluate) {
      const Corpus corpus = load_corpus(corpus_path);
      CvOptions cv = config.cv;
      cv.k = k;
      cv.seed = seed;
      std::vector<CvReport> reports;
      if (!grid_path.empty()) {
        std::ifstream in(grid_path);
        if (!in) throw ConfigError("cannot read grid '" + grid_path + "'");
        const auto g = nlohmann::json::parse(in);
        PipelineSpec spec;
        spec.features = config.feature(parse_feature_kind(g.value("features", features)));
        spec.family = parse_model_family(g.value("model", family));
        spec.params = parse_param_list(params);
        spec.seed = seed;
        ParamGrid grid;
        for (const auto& [key, values] : g.at("grid").items()) {
          for (const auto& v : values) grid[key].push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
        reports = grid_search(grid, spec, corpus, cv);
      } else if (one) {
        PipelineSpec spec;
        spec.features = config.feature(parse_feature_kind(features));
        spec.family = parse_model_family(family);
        spec.params = parse_param_list(params);
        spec.seed = seed;
        reports.push_back(cross_validate(spec, corpus, cv));
      } else {
        for (auto spec : comparison_preset()) {
          spec.features = config.feature(spec.features.kind);
          spec.seed = seed;
          std::cerr << "evaluating " << spec.descriptor() << "\n";
          reports.push_back(cross_validate(spec, corpus, cv));
        }
      }
      write_output(report_kind == "json" ? to_json(std::span<const CvReport>(reports)).dump(2) + "\n"
                                         : format_table(reports),
                   report_out);
      return 0;
    }

    if (*ingest) {
      const SourceRegistry reg = load_source_registry(registry_file);
      NewsBank bank = NewsBank::open(bank_path);
      Fetcher fetcher(reg.fetch);
      const IngestReport r = ingest_source(reg.find(source_name), bank, limit, fetcher);
      std::cout << "fetched " << r.fetched << ", stored " << r.stored << ", duplicates " << r.duplicates
                << ", failures " << r.failures << (r.aborted ? " (aborted)" : "") << "\n";
      for (const auto& e : r.errors) std::cerr << "  " << e << "\n";
      return r.aborted ? 1 : 0;
    }

    if (*serve) {
      auto registry = std::make_shared<const ModelRegistry>(load_registry(registry_dir));
      ServerOptions options;
      if (!static_dir.empty()) options.static_dir = static_dir;
      Server server(registry, options);
      const auto [host, port] = parse_bind_address(bind);
      const int bound = server.bind(host, port);
      std::cerr << "serving " << registry->entries.size() << " models on http://" << host << ":" << bound << "\n";
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      g_server = nullptr;
      return 0;
    }

    if (*predict) {
      const ModelRegistry registry = load_registry(registry_dir);
      const VerifyResponse r = verify(read_text_arg(text_arg), registry);
      std::cout << (as_json ? to_json(r).dump(2) + "\n" : format_verify_table(r));
      return 0;
    }

    if (*score) {
      const ModelRegistry registry = load_registry(registry_dir);
      const Corpus bank = load_jsonl(bank_path);
      std::vector<NamedPipeline> bundle;
      for (const auto& e : registry.entries) bundle.push_back({e.id, e.pipeline.get()});
      const auto scores = score_sources(bundle, bank);
      std::cout << (report_kind == "json" ? to_json(std::span<const SourceScore>(scores)).dump(2) + "\n"
                                          : format_source_table(scores));
      return 0;
    }

    if (*synth) {
      SyntheticOptions o;
      o.n_docs = n_docs;
      o.seed = seed;
      save_jsonl(make_synthetic_corpus(o), out_path);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
