#include "billprep/extract.hpp"

#include <benchmark/benchmark.h>

namespace {

const char* bill = R"({"document":{"issue_date":"10 January 2021","number":"F1-0000001"},
  "summary":{"total":"1.000,00 €","light_total":"800,00 €"},
  "lines":[{"kind":"energy","amount":"800,00 €","consumption":"312 kWh"},{"kind":"fees","amount":"200,00 €"}],
  "customer":{"id":"U1","name":"Mario Rossi","age":44}})";

void BM_ResolvePath(benchmark::State& state)
{
    const auto doc = billprep::parse_document(bill);
    const auto path = billprep::parse_json_path("lines[*].consumption");
    for (auto _ : state) benchmark::DoNotOptimize(billprep::resolve_path(doc, path));
}
BENCHMARK(BM_ResolvePath);

void BM_ParseDocument(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(billprep::parse_document(bill));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * std::char_traits<char>::length(bill)));
}
BENCHMARK(BM_ParseDocument);

}  // namespace
