#include "billprep/analytics/forest.hpp"
#include "billprep/error.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace billprep;
using namespace billprep::analytics;

namespace {

Dataset make(std::size_t cols, std::vector<double> x, std::vector<int> y)
{
    Dataset d;
    d.cols = cols;
    d.rows = y.size();
    d.x = std::move(x);
    d.y = std::move(y);
    return d;
}

Dataset noisy(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    std::vector<double> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = g(gen), b = g(gen), c = g(gen);
        x.insert(x.end(), {a, b, c, std::round(g(gen) * 3)});
        y.push_back(a + 0.5 * b * b + 0.3 * g(gen) > 0.6 ? 1 : 0);
    }
    return make(4, std::move(x), std::move(y));
}

double accuracy(const std::vector<int>& p, const std::vector<int>& y)
{
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) ok += p[i] == y[i];
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("separable data is fit exactly")
{
    const auto d = make(2, {0, 5, 1, 3, 2, 9, 3, 1, 10, 4, 11, 0, 12, 7, 13, 2}, {0, 0, 0, 0, 1, 1, 1, 1});
    ForestParams p;
    p.trees = 20;
    p.seed = 1;
    const auto f = train_random_forest(d, p);
    CHECK(accuracy(f.predict(d), d.y) == 1.0);
    CHECK(f.trees().size() == 20);
}

TEST_CASE("a single depth-1 stump cannot learn XOR")
{
    const auto d = make(2, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 1, 1, 0});
    ForestParams p;
    p.trees = 1;
    p.max_depth = 1;
    p.bootstrap = false;
    p.features_per_split = 2;
    const auto f = train_random_forest(d, p);
    CHECK(accuracy(f.predict(d), d.y) <= 0.75);
    CHECK(f.trees()[0].depth() <= 1);
}

TEST_CASE("training is deterministic and worker independent")
{
    const auto d = noisy(600, 3);
    ForestParams p;
    p.trees = 15;
    p.seed = 99;
    const auto a = train_random_forest(d, p, 1);
    CHECK(a == train_random_forest(d, p, 1));
    CHECK(a == train_random_forest(d, p, 4));
    p.seed = 100;
    CHECK_FALSE(a == train_random_forest(d, p, 1));
    CHECK(accuracy(a.predict(d), d.y) > 0.9);
}

TEST_CASE("predictions are invariant under strictly increasing feature transforms")
{
    const auto d = noisy(400, 5);
    const auto test = noisy(300, 6);
    auto transform = [](Dataset x) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            x.x[r * x.cols + 0] = std::exp(x.x[r * x.cols + 0]);
            x.x[r * x.cols + 1] = 3 * x.x[r * x.cols + 1] + 1;
            x.x[r * x.cols + 2] = std::cbrt(x.x[r * x.cols + 2]);
        }
        return x;
    };
    ForestParams p;
    p.trees = 10;
    p.seed = 7;
    const auto f = train_random_forest(d, p);
    const auto g = train_random_forest(transform(d), p);
    CHECK(f.predict(test) == g.predict(transform(test)));
}

TEST_CASE("min_samples_leaf and max_depth are honoured")
{
    const auto d = noisy(300, 8);
    ForestParams p;
    p.trees = 3;
    p.max_depth = 3;
    p.min_samples_leaf = 5;
    const auto f = train_random_forest(d, p);
    for (const auto& t : f.trees()) CHECK(t.depth() <= 3);
}

TEST_CASE("JSON round trip and validation")
{
    const auto d = noisy(200, 9);
    ForestParams p;
    p.trees = 4;
    const auto f = train_random_forest(d, p);
    CHECK(RandomForest::from_json(f.to_json()) == f);
    CHECK(RandomForest::from_json(nlohmann::json::parse(f.to_json().dump())) == f);
    CHECK(ForestParams::from_json(p.to_json()).trees == 4);

    auto bad = f.to_json();
    bad["trees"][0]["nodes"][0][2] = 100000;
    CHECK_THROWS_AS(RandomForest::from_json(bad), ParseError);

    auto one_class = d;
    std::fill(one_class.y.begin(), one_class.y.end(), 0);
    CHECK_THROWS_AS(train_random_forest(one_class, p), ValidationError);
    p.trees = 0;
    CHECK_THROWS_AS(train_random_forest(d, p), ValidationError);
}
