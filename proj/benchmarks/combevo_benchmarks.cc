#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "combevo/alphabet.h"
#include "combevo/classifier.h"
#include "combevo/combinator.h"
#include "combevo/engine.h"
#include "combevo/regex.h"
#include "combevo/repository.h"

namespace combevo {
namespace {

void BM_EngineStep(benchmark::State& state) {
  RunConfig config;
  config.rng_seed = 1;
  config.max_iterations = ~std::uint64_t{0} >> 1;
  config.alphabet_path = state.range(0) == 0 ? "builtin" : "minimal";
  Engine engine = Engine::FromConfig(config);
  for (auto _ : state) benchmark::DoNotOptimize(engine.StepOnce());
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(state.range(0) == 0 ? "default alphabet" : "minimal alphabet");
}
BENCHMARK(BM_EngineStep)->Arg(0)->Arg(1);

void BM_ClassifyNoise(benchmark::State& state) {
  const Classifier classifier(PatternSet::Builtin());
  const std::string text = "; ; & int } while NAME ( PLACEHOLDER";
  for (auto _ : state) benchmark::DoNotOptimize(classifier.Score(text));
}
BENCHMARK(BM_ClassifyNoise);

void BM_ClassifyComposite(benchmark::State& state) {
  const Classifier classifier(PatternSet::Builtin());
  const std::string text =
      "protected class NAME { boolean NAME ; public void NAME ( ) { PLACEHOLDER } }";
  for (auto _ : state) benchmark::DoNotOptimize(classifier.Score(text));
}
BENCHMARK(BM_ClassifyComposite);

void BM_RegexFullMatch(benchmark::State& state) {
  const Regex re = Regex::Compile(
      "^(PLACEHOLDER(?! PLACEHOLDER) )?(boolean|byte|char|double|float|int|long|short) NAME ;"
      "( PLACEHOLDER(?! PLACEHOLDER))?$");
  const std::string text = "PLACEHOLDER short NAME ; PLACEHOLDER";
  for (auto _ : state) benchmark::DoNotOptimize(re.FullMatch(text));
}
BENCHMARK(BM_RegexFullMatch);

void BM_Combine(benchmark::State& state) {
  const Alphabet alphabet = Alphabet::Default();
  const std::vector<std::vector<TokenId>> parts = {
      alphabet.Tokenize("public class NAME { PLACEHOLDER }"), alphabet.Tokenize("short NAME ;"),
      alphabet.Tokenize("{ PLACEHOLDER }"), alphabet.Tokenize("int"),
      alphabet.Tokenize("( PLACEHOLDER )")};
  std::vector<std::span<const TokenId>> views(parts.begin(), parts.end());
  const CombineOptions options{alphabet.placeholder(), kDefaultNestProbability};
  Rng rng(1);
  std::vector<TokenId> out;
  for (auto _ : state) {
    Combine(views, options, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Combine);

void BM_WeightedSample(benchmark::State& state) {
  const Alphabet alphabet = Alphabet::Default();
  Repository repo(alphabet);
  std::vector<TokenId> tokens;
  const std::vector<BlockId> parents{0, 1};
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    tokens = {static_cast<TokenId>(i % 74), static_cast<TokenId>((i / 74) % 74),
              static_cast<TokenId>(i / (74 * 74))};
    repo.Insert(tokens, 1 + static_cast<std::uint32_t>(i % 6), parents, 1);
  }
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(repo.SampleOne(rng));
}
BENCHMARK(BM_WeightedSample)->Arg(100)->Arg(10000)->Arg(100000);

}  // namespace
}  // namespace combevo

BENCHMARK_MAIN();
