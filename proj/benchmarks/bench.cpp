#include <benchmark/benchmark.h>

#include "newscheck/classifiers.hpp"
#include "newscheck/pipeline.hpp"
#include "newscheck/random.hpp"
#include "newscheck/service.hpp"
#include "newscheck/stemmer.hpp"
#include "newscheck/synthetic.hpp"
#include "newscheck/textprep.hpp"
#include "newscheck/vectorizer.hpp"

using namespace newscheck;

namespace {

const Corpus& corpus() {
  static const Corpus c = make_synthetic_corpus();
  return c;
}

const std::vector<TokenStream>& streams() {
  static const std::vector<TokenStream> s =
      preprocess_documents(corpus(), corpus().labeled_indices(), PrepConfig::for_tfidf());
  return s;
}

const std::string kText =
    "O governo anunciou nesta quarta-feira que as vacinas chegarão aos estados na próxima semana, "
    "segundo informações divulgadas pelo ministério. <b>Especialistas</b> questionam o prazo: "
    "http://exemplo.com.br/noticia";

void BM_Preprocess(benchmark::State& state) {
  const PrepConfig config = PrepConfig::for_tfidf();
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(kText, config));
}
BENCHMARK(BM_Preprocess);

void BM_Stem(benchmark::State& state) {
  const std::vector<std::string> words{"governamentais", "anunciou", "informações", "especialistas", "chegarão"};
  for (auto _ : state) {
    for (const auto& w : words) benchmark::DoNotOptimize(stem_portuguese(w));
  }
}
BENCHMARK(BM_Stem);

void BM_TfidfFit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fit_tfidf(streams(), {}));
}
BENCHMARK(BM_TfidfFit)->Unit(benchmark::kMillisecond);

void BM_TfidfTransform(benchmark::State& state) {
  const TfidfModel m = fit_tfidf(streams(), {});
  for (auto _ : state) benchmark::DoNotOptimize(transform(m, streams()));
}
BENCHMARK(BM_TfidfTransform)->Unit(benchmark::kMillisecond);

LabeledMatrix training_matrix() {
  const TfidfModel m = fit_tfidf(streams(), {});
  std::vector<int> y;
  for (auto i : corpus().labeled_indices()) y.push_back(corpus()[i].label == Label::Fake ? 1 : 0);
  return {transform(m, streams()), y};
}

void BM_TrainFamily(benchmark::State& state) {
  const LabeledMatrix data = training_matrix();
  const auto family = static_cast<ModelFamily>(state.range(0));
  state.SetLabel(std::string(to_string(family)));
  for (auto _ : state) benchmark::DoNotOptimize(train_model(family, data, {}));
}
BENCHMARK(BM_TrainFamily)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_Verify(benchmark::State& state) {
  ModelRegistry registry;
  for (auto family : {ModelFamily::LogReg, ModelFamily::RandomForest, ModelFamily::AdaBoost, ModelFamily::Gbdt}) {
    PipelineSpec spec;
    spec.family = family;
    RegistryEntry e;
    e.id = std::string(to_string(family));
    e.family = family;
    e.weight = 1.0;
    e.pipeline = std::make_shared<FittedPipeline>(fit_pipeline(spec, corpus(), corpus().labeled_indices()));
    registry.entries.push_back(e);
  }
  for (auto _ : state) benchmark::DoNotOptimize(verify(kText, registry));
}
BENCHMARK(BM_Verify)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
