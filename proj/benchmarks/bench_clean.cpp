#include "billprep/clean.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

void BM_CleanDecimal(benchmark::State& state)
{
    const std::vector<std::string> inputs = {"1.000,00 \xE2\x82\xAC", "0,00 kWh", "-12.345,67 \xE2\x82\xAC",
                                             "1234.56 EUR", "150 kWh"};
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(billprep::clean_decimal(inputs[i++ % inputs.size()]));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CleanDecimal);

void BM_CleanDate(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(billprep::clean_date("10 January 2021", billprep::MonthLocale::english));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CleanDate);

void BM_HashValue(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(billprep::hash_value("Mario Rossi", "salt"));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashValue);

}  // namespace
