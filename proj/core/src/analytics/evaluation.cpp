#include "billprep/analytics/evaluation.hpp"

#include "billprep/error.hpp"
#include "billprep/random.hpp"

#include <algorithm>
#include <cmath>

namespace billprep::analytics {

std::string_view to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::logistic_regression: return "logistic_regression";
    case ModelKind::majority: return "majority";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view s)
{
    if (s == "random_forest") return ModelKind::random_forest;
    if (s == "logistic_regression") return ModelKind::logistic_regression;
    if (s == "majority") return ModelKind::majority;
    throw ValidationError("unknown model kind '" + std::string(s) + "'");
}

EvalMetrics EvalMetrics::from_predictions(std::span<const int> actual, std::span<const int> predicted,
                                          std::size_t folds)
{
    if (actual.size() != predicted.size()) throw ValidationError("metrics: label counts differ");
    EvalMetrics m;
    m.folds = folds;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if ((actual[i] != 0 && actual[i] != 1) || (predicted[i] != 0 && predicted[i] != 1))
            throw ValidationError("metrics: labels must be 0 or 1");
        ++m.confusion[static_cast<std::size_t>(actual[i])][static_cast<std::size_t>(predicted[i])];
    }
    const auto total = actual.size();
    m.accuracy = total ? static_cast<double>(m.confusion[0][0] + m.confusion[1][1]) / static_cast<double>(total) : 0;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto tp = m.confusion[c][c];
        const auto predicted_c = m.confusion[0][c] + m.confusion[1][c];
        const auto actual_c = m.confusion[c][0] + m.confusion[c][1];
        auto& cm = m.classes[c];
        cm.precision = predicted_c ? static_cast<double>(tp) / static_cast<double>(predicted_c) : 0;
        cm.recall = actual_c ? static_cast<double>(tp) / static_cast<double>(actual_c) : 0;
        cm.f1 = cm.precision + cm.recall > 0 ? 2 * cm.precision * cm.recall / (cm.precision + cm.recall) : 0;
    }
    return m;
}

nlohmann::json EvalMetrics::to_json() const
{
    nlohmann::json classes_json = nlohmann::json::object();
    for (std::size_t c = 0; c < 2; ++c)
        classes_json[std::to_string(c)] = {
            {"precision", classes[c].precision}, {"recall", classes[c].recall}, {"f1", classes[c].f1}};
    return {{"accuracy", accuracy},
            {"classes", std::move(classes_json)},
            {"confusion", {{confusion[0][0], confusion[0][1]}, {confusion[1][0], confusion[1][1]}}},
            {"folds", folds}};
}

ModelKind Classifier::kind() const
{
    switch (model_.index()) {
    case 0: return ModelKind::random_forest;
    case 1: return ModelKind::logistic_regression;
    default: return ModelKind::majority;
    }
}

std::vector<int> Classifier::predict(const Dataset& data) const
{
    if (const auto* f = std::get_if<RandomForest>(&model_)) return f->predict(data);
    if (const auto* l = std::get_if<LogisticModel>(&model_)) return l->predict(data);
    return std::vector<int>(data.rows, std::get<MajorityModel>(model_).label);
}

nlohmann::json Classifier::to_json() const
{
    if (const auto* f = std::get_if<RandomForest>(&model_)) return f->to_json();
    if (const auto* l = std::get_if<LogisticModel>(&model_)) return l->to_json();
    return {{"model", "majority"}, {"label", std::get<MajorityModel>(model_).label}};
}

Classifier Classifier::from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        throw ParseError("model: missing \"model\" field");
    switch (parse_model_kind(j["model"].get<std::string>())) {
    case ModelKind::random_forest: return Classifier(RandomForest::from_json(j));
    case ModelKind::logistic_regression: return Classifier(LogisticModel::from_json(j));
    case ModelKind::majority: break;
    }
    const auto label = j.value("label", -1);
    if (label != 0 && label != 1) throw ParseError("model: majority label must be 0 or 1");
    return Classifier(MajorityModel{label});
}

Classifier train_classifier(const Dataset& train, const TrainParams& params, unsigned workers)
{
    switch (params.kind) {
    case ModelKind::random_forest: return Classifier(train_random_forest(train, params.forest, workers));
    case ModelKind::logistic_regression: return Classifier(train_logistic_regression(train, params.logistic));
    case ModelKind::majority: break;
    }
    if (train.rows == 0) throw ValidationError("majority: empty training set");
    const auto pos = static_cast<std::size_t>(std::count(train.y.begin(), train.y.end(), 1));
    return Classifier(MajorityModel{pos > train.rows - pos ? 1 : 0});
}

std::vector<std::size_t> assign_folds(std::span<const int> labels, std::size_t k, bool stratified,
                                      std::uint64_t seed)
{
    if (k < 2) throw ValidationError("folds: k must be >= 2");
    if (labels.size() < k) throw ValidationError("folds: fewer samples than folds");
    auto eng = rng::make_engine(seed);
    std::vector<std::size_t> fold(labels.size());
    if (!stratified) {
        std::vector<std::size_t> order(labels.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng::shuffle(eng, std::span(order));
        for (std::size_t p = 0; p < order.size(); ++p) fold[order[p]] = p % k;
        return fold;
    }
    // Dealing continues from the fold where the previous class stopped so
    // fold sizes also stay within one of each other.
    std::size_t offset = 0;
    for (int c : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        if (members.size() < k)
            throw ValidationError("folds: class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                                  " members, fewer than k=" + std::to_string(k));
        rng::shuffle(eng, std::span(members));
        for (std::size_t p = 0; p < members.size(); ++p) fold[members[p]] = (offset + p) % k;
        offset = (offset + members.size()) % k;
    }
    return fold;
}

std::vector<std::size_t> undersample_majority(std::span<const int> labels, double ratio, std::uint64_t seed)
{
    if (!(ratio >= 1.0)) throw ValidationError("undersample: ratio must be >= 1");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
    if (by_class[0].empty() || by_class[1].empty())
        throw ValidationError("undersample: both classes must be present");

    const std::size_t major = by_class[1].size() > by_class[0].size() ? 1 : 0;
    const double limit = std::floor(ratio * static_cast<double>(by_class[1 - major].size()));
    std::vector<std::size_t> kept = by_class[1 - major];
    auto& majority = by_class[major];
    if (static_cast<double>(majority.size()) > limit) {
        auto eng = rng::make_engine(seed);
        rng::shuffle(eng, std::span(majority));
        majority.resize(static_cast<std::size_t>(limit));
    }
    kept.insert(kept.end(), majority.begin(), majority.end());
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<FeatureVector> undersample_majority(const std::vector<FeatureVector>& vectors, double ratio,
                                                std::uint64_t seed)
{
    std::vector<int> labels;
    labels.reserve(vectors.size());
    for (const auto& v : vectors) labels.push_back(v.churn);
    std::vector<FeatureVector> out;
    for (auto i : undersample_majority(labels, ratio, seed)) out.push_back(vectors[i]);
    return out;
}

CrossValidationResult cross_validate(const Dataset& data, const CrossValidationParams& params, unsigned workers)
{
    const auto fold = assign_folds(data.y, params.folds, params.stratified, rng::derive_seed(params.seed, 0));
    CrossValidationResult result;
    result.predictions.assign(data.rows, 0);

    for (std::size_t f = 0; f < params.folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < data.rows; ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
        Dataset train = subset(data, train_rows);
        if (params.undersample_ratio) {
            const auto kept = undersample_majority(train.y, *params.undersample_ratio, rng::derive_seed(params.seed, 1 + 2 * f));
            train = subset(train, kept);
        }
        TrainParams tp = params.train;
        tp.forest.seed = rng::derive_seed(params.seed, 2 + 2 * f);
        const Classifier model = train_classifier(train, tp, workers);

        const Dataset test = subset(data, test_rows);
        const auto predicted = model.predict(test);
        for (std::size_t i = 0; i < test_rows.size(); ++i) result.predictions[test_rows[i]] = predicted[i];
        result.per_fold.push_back(EvalMetrics::from_predictions(test.y, predicted, 1));
    }
    result.pooled = EvalMetrics::from_predictions(data.y, result.predictions, params.folds);
    return result;
}

nlohmann::json CrossValidationResult::to_json() const
{
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& m : per_fold) folds.push_back(m.to_json());
    return {{"pooled", pooled.to_json()}, {"per_fold", std::move(folds)}};
}

}  // namespace billprep::analytics
