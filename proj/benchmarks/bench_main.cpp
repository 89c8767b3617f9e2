#include <benchmark/benchmark.h>

#include "mtn/corpus.hpp"
#include "mtn/frontend.hpp"
#include "mtn/model.hpp"
#include "mtn/training.hpp"

namespace {

using namespace mtn;

std::string sample_program() { return corpus::generate_program(corpus::Task::Classify, 3, 17, {}); }

model::ParamStore store_for(model::Variant v, std::size_t d) {
    model::ModelConfig c;
    c.variant = v;
    c.hidden = d;
    c.vocab = model::Vocabulary::build({}, ast::IdentifierMode::TypesOnly);
    c.num_classes = 10;
    return model::ParamStore(c);
}

void BM_Parse(benchmark::State& state) {
    const std::string source = sample_program();
    for (auto _ : state) benchmark::DoNotOptimize(ast::parse_source(source));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * source.size()));
}
BENCHMARK(BM_Parse);

void BM_Encode(benchmark::State& state) {
    const ast::AstNode tree = ast::parse_source(sample_program());
    auto store = store_for(static_cast<model::Variant>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(model::embed(tree, store));
    state.counters["nodes"] = static_cast<double>(tree.size());
}
BENCHMARK(BM_Encode)
    ->ArgsProduct({{static_cast<int>(model::Variant::MtnA), static_cast<int>(model::Variant::MtnB),
                    static_cast<int>(model::Variant::TreeLstm), static_cast<int>(model::Variant::SeqLstm)},
                   {32, 100}})
    ->Unit(benchmark::kMicrosecond);

// Forward and backward for one classification example.
void BM_TrainExample(benchmark::State& state) {
    const ast::AstNode tree = ast::parse_source(sample_program());
    auto store = store_for(model::Variant::MtnB, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        ad::Tape tape;
        tape.backward(train::classification_loss(tape, tree, 3, store));
    }
    store.zero_grad();
}
BENCHMARK(BM_TrainExample)->Arg(32)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_AdamStep(benchmark::State& state) {
    auto store = store_for(model::Variant::MtnB, static_cast<std::size_t>(state.range(0)));
    train::AdamState adam(store);
    for (auto _ : state) train::adam_step(store, adam);
}
BENCHMARK(BM_AdamStep)->Arg(32)->Arg(200)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
