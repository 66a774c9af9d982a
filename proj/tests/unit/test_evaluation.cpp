#include "billprep/analytics/evaluation.hpp"
#include "billprep/error.hpp"

#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

using namespace billprep;
using namespace billprep::analytics;

namespace {

Dataset imbalanced(std::size_t n, double prevalence, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    std::bernoulli_distribution pos(prevalence);
    Dataset d;
    d.rows = n;
    d.cols = 3;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = pos(gen);
        d.x.insert(d.x.end(), {g(gen) + 2.0 * y, g(gen), g(gen) - 1.5 * y});
        d.y.push_back(y);
    }
    return d;
}

}  // namespace

TEST_CASE("stratified folds partition the data with balanced class counts")
{
    std::vector<int> labels(1000, 0);
    for (std::size_t i = 0; i < 37; ++i) labels[i * 27] = 1;
    const auto folds = assign_folds(labels, 5, true, 3);
    REQUIRE(folds.size() == labels.size());
    std::array<std::array<std::size_t, 2>, 5> count{};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        REQUIRE(folds[i] < 5);
        ++count[folds[i]][labels[i]];
    }
    for (int c = 0; c < 2; ++c) {
        std::size_t lo = SIZE_MAX, hi = 0, total = 0;
        for (const auto& f : count) {
            lo = std::min(lo, f[c]);
            hi = std::max(hi, f[c]);
            total += f[c];
        }
        CHECK(hi - lo <= 1);
    }
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& f : count) {
        lo = std::min(lo, f[0] + f[1]);
        hi = std::max(hi, f[0] + f[1]);
    }
    CHECK(hi - lo <= 1);
    CHECK(assign_folds(labels, 5, true, 3) == folds);

    CHECK_THROWS_AS(assign_folds(labels, 1, true, 0), ValidationError);
    std::vector<int> few(100, 0);
    few[0] = few[1] = 1;
    CHECK_THROWS_AS(assign_folds(few, 5, true, 0), ValidationError);
    CHECK_NOTHROW(assign_folds(few, 5, false, 0));
}

TEST_CASE("undersampling")
{
    std::vector<int> labels(100, 0);
    labels[10] = labels[50] = 1;
    const auto kept = undersample_majority(labels, 1.0, 4);
    CHECK(kept.size() == 4);
    CHECK(std::is_sorted(kept.begin(), kept.end()));
    CHECK(std::count_if(kept.begin(), kept.end(), [&](std::size_t i) { return labels[i] == 1; }) == 2);
    CHECK(undersample_majority(labels, 3.0, 4).size() == 8);
    CHECK(undersample_majority(labels, 1.0, 4) == kept);

    const std::vector<int> balanced = {0, 1, 1, 0, 1, 0};
    CHECK(undersample_majority(balanced, 1.0, 9) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    CHECK_THROWS_AS(undersample_majority(labels, 0.5, 4), ValidationError);
}

TEST_CASE("metrics from predictions")
{
    const std::vector<int> actual = {0, 0, 0, 1, 1};
    const auto perfect = EvalMetrics::from_predictions(actual, actual, 1);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.classes[1].precision == 1.0);
    CHECK(perfect.classes[1].f1 == 1.0);

    const std::vector<int> zeros(5, 0);
    const auto m = EvalMetrics::from_predictions(actual, zeros, 1);
    CHECK(m.accuracy == doctest::Approx(0.6));
    CHECK(m.classes[1].precision == 0.0);
    CHECK(m.classes[1].recall == 0.0);
    CHECK(m.classes[0].recall == 1.0);
    CHECK(m.confusion[1][0] == 2);

    const std::vector<int> mixed = {0, 1, 0, 1, 0};
    const auto k = EvalMetrics::from_predictions(actual, mixed, 1);
    CHECK(k.classes[1].precision == doctest::Approx(0.5));
    CHECK(k.classes[1].recall == doctest::Approx(0.5));
    CHECK(k.classes[0].precision == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("majority baseline on rare positives")
{
    const auto d = imbalanced(5000, 0.018, 12);
    CrossValidationParams p;
    p.train.kind = ModelKind::majority;
    const auto r = cross_validate(d, p);
    const double prevalence = std::count(d.y.begin(), d.y.end(), 1) / 5000.0;
    CHECK(r.pooled.accuracy == doctest::Approx(1.0 - prevalence));
    CHECK(r.pooled.classes[1].recall == 0.0);
    CHECK(r.per_fold.size() == 5);
}

TEST_CASE("cross validation: determinism, undersampling, model kinds")
{
    const auto d = imbalanced(3000, 0.05, 13);
    CrossValidationParams p;
    p.train.forest.trees = 20;
    p.seed = 21;
    const auto a = cross_validate(d, p, 1);
    const auto b = cross_validate(d, p, 3);
    CHECK(a.predictions == b.predictions);
    CHECK(a.to_json() == b.to_json());

    p.undersample_ratio = 1.0;
    const auto u = cross_validate(d, p);
    CHECK(u.pooled.classes[1].recall >= a.pooled.classes[1].recall);

    p.train.kind = ModelKind::logistic_regression;
    const auto l = cross_validate(d, p);
    CHECK(l.pooled.accuracy > 0.7);

    for (auto kind : {ModelKind::random_forest, ModelKind::logistic_regression, ModelKind::majority}) {
        TrainParams t;
        t.kind = kind;
        t.forest.trees = 5;
        const auto c = train_classifier(d, t);
        CHECK(c.kind() == kind);
        CHECK(parse_model_kind(to_string(kind)) == kind);
        const auto back = Classifier::from_json(c.to_json());
        CHECK(back.predict(d) == c.predict(d));
    }
    CHECK_THROWS_AS(parse_model_kind("svm"), ValidationError);
}
