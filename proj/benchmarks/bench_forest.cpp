#include "billprep/analytics/forest.hpp"
#include "billprep/random.hpp"

#include <benchmark/benchmark.h>

namespace {

billprep::analytics::Dataset make_data(std::size_t rows)
{
    auto eng = billprep::rng::make_engine(1);
    billprep::analytics::Dataset d;
    d.rows = rows;
    d.cols = 8;
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0;
        for (std::size_t c = 0; c < d.cols; ++c) {
            const double v = billprep::rng::normal(eng);
            d.x.push_back(v);
            s += c < 3 ? v : 0;
        }
        d.y.push_back(s + billprep::rng::normal(eng) > 1.5 ? 1 : 0);
    }
    return d;
}

void BM_TrainForest(benchmark::State& state)
{
    const auto d = make_data(static_cast<std::size_t>(state.range(0)));
    billprep::analytics::ForestParams p;
    p.trees = 20;
    for (auto _ : state) benchmark::DoNotOptimize(billprep::analytics::train_random_forest(d, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainForest)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
