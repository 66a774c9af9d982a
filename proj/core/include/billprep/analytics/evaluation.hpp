#pragma once

#include "billprep/analytics/features.hpp"
#include "billprep/analytics/forest.hpp"
#include "billprep/analytics/logistic.hpp"

#include "json.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace billprep::analytics {

enum class ModelKind { random_forest, logistic_regression, majority };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct ClassMetrics
{
    double precision = 0;  // 0 when the class is never predicted
    double recall = 0;     // 0 when the class never occurs
    double f1 = 0;
};

struct EvalMetrics
{
    double accuracy = 0;
    std::array<ClassMetrics, 2> classes{};
    std::array<std::array<std::size_t, 2>, 2> confusion{};  // [actual][predicted]
    std::size_t folds = 0;

    static EvalMetrics from_predictions(std::span<const int> actual, std::span<const int> predicted,
                                        std::size_t folds);
    nlohmann::json to_json() const;
};

// Predicts the majority class of its training labels (ties go to 0).
struct MajorityModel
{
    int label = 0;
    friend bool operator==(const MajorityModel&, const MajorityModel&) = default;
};

class Classifier
{
public:
    using Model = std::variant<RandomForest, LogisticModel, MajorityModel>;

    explicit Classifier(Model m)
        : model_(std::move(m))
    {
    }

    ModelKind kind() const;
    std::vector<int> predict(const Dataset& data) const;
    const Model& model() const { return model_; }

    nlohmann::json to_json() const;
    static Classifier from_json(const nlohmann::json& j);

private:
    Model model_;
};

struct TrainParams
{
    ModelKind kind = ModelKind::random_forest;
    ForestParams forest;
    LogisticParams logistic;
};

Classifier train_classifier(const Dataset& train, const TrainParams& params, unsigned workers = 1);

// Fold index per sample. Stratified: each class is shuffled and dealt out
// round-robin, so per-fold class counts differ by at most one. Throws
// ValidationError if k < 2 or (stratified) a class has fewer than k members.
std::vector<std::size_t> assign_folds(std::span<const int> labels, std::size_t k, bool stratified,
                                      std::uint64_t seed);

// Indices kept after randomly dropping majority-class samples until
// majority <= ratio * minority. Indices are returned in ascending order.
std::vector<std::size_t> undersample_majority(std::span<const int> labels, double ratio, std::uint64_t seed);
std::vector<FeatureVector> undersample_majority(const std::vector<FeatureVector>& vectors, double ratio,
                                                std::uint64_t seed);

struct CrossValidationParams
{
    TrainParams train;
    std::size_t folds = 5;
    bool stratified = true;
    std::optional<double> undersample_ratio;  // applied to training folds only
    std::uint64_t seed = 0;
};

struct CrossValidationResult
{
    EvalMetrics pooled;
    std::vector<EvalMetrics> per_fold;
    std::vector<int> predictions;  // out-of-fold, per input row

    nlohmann::json to_json() const;
};

// Seeds: folds from derive_seed(seed, 0); fold f undersamples with
// derive_seed(seed, 1 + 2f) and trains its forest with derive_seed(seed, 2 + 2f).
CrossValidationResult cross_validate(const Dataset& data, const CrossValidationParams& params, unsigned workers = 1);

}  // namespace billprep::analytics
