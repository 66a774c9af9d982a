#pragma once

#include "billprep/analytics/features.hpp"
#include "billprep/fuse.hpp"
#include "billprep/mapping.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace billprep {

// Synthetic corpus parameters. All draws come from one engine seeded with
// `seed`, so equal configs give byte-identical corpora.
struct SynthConfig
{
    std::size_t users = 100;
    std::size_t min_pods_per_user = 1;
    std::size_t max_pods_per_user = 3;
    int start_year = 2021;  // holders are 18..86 years old at the start
    unsigned start_month = 1;
    std::size_t months = 24;
    std::size_t cadence_months = 2;     // one bill every two months
    double churn_prevalence = 0.018;    // target fraction of churn=1 vectors
    double inconsistency_probability = 0.2;  // per bill: sex or age missing
    double billed_days_dependence = 0.5;     // 0 disables the days/churn link
    double late_start_probability = 0.25;    // POD activated mid-span
    double layout_v2_probability = 0.5;
    MonthLocale locale = MonthLocale::english;
    std::string salt;  // must match the pipeline salt for hashed truth values
    std::uint64_t seed = 0;

    void validate() const;  // throws ValidationError
    nlohmann::json to_json() const;
    static SynthConfig from_json(const nlohmann::json& j);
};

struct GroundTruth
{
    EntityTables tables;
    analytics::FeatureSet features;
    std::size_t bill_count = 0;
};

// The mapping that matches the generator's documents.
MappingSpec default_mapping_spec(MonthLocale locale = MonthLocale::english);

// Writes <out>/corpus/YYYY-MM/bill_NNNNNN.json, <out>/mapping.csv,
// <out>/synth.json and the expected pipeline outputs under <out>/truth/.
// Throws IoError when `out` cannot be written.
GroundTruth generate_corpus(const SynthConfig& config, const std::filesystem::path& out);

// Same world as generate_corpus, without touching the filesystem.
GroundTruth simulate_corpus(const SynthConfig& config);

// Feature vectors only, aggregated while simulating; suited to sets far too
// large to materialize as documents. Equals simulate_corpus(config).features.
analytics::FeatureSet synthesize_feature_set(const SynthConfig& config);

}  // namespace billprep
