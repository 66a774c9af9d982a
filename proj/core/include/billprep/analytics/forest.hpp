#pragma once

#include "billprep/analytics/features.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace billprep::analytics {

struct ForestParams
{
    std::size_t trees = 100;
    std::size_t max_depth = 0;          // 0 = unlimited
    std::size_t min_samples_leaf = 1;
    std::size_t features_per_split = 0;  // 0 = floor(sqrt(feature count))
    bool bootstrap = true;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static ForestParams from_json(const nlohmann::json& j);
};

// Split nodes send x[feature] <= threshold left. Thresholds are always
// observed training values, so a strictly increasing transform of a feature
// applied to both training and test data leaves predictions unchanged.
struct TreeNode
{
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree
{
public:
    int predict(const double* row) const;

    std::vector<TreeNode>& nodes() { return nodes_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t depth() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

class RandomForest
{
public:
    RandomForest() = default;
    RandomForest(std::vector<DecisionTree> trees, std::size_t features)
        : trees_(std::move(trees))
        , features_(features)
    {
    }

    // Majority vote; a tie goes to class 0.
    int predict(const double* row) const;
    std::vector<int> predict(const Dataset& data) const;

    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::size_t feature_count() const { return features_; }

    nlohmann::json to_json() const;
    static RandomForest from_json(const nlohmann::json& j);

    friend bool operator==(const RandomForest&, const RandomForest&) = default;

private:
    std::vector<DecisionTree> trees_;
    std::size_t features_ = 0;
};

// CART trees with Gini splits. Tree t is grown from seed derive_seed(params.seed, t),
// so the forest is identical for any worker count. Throws ValidationError
// unless both classes are present.
RandomForest train_random_forest(const Dataset& train, const ForestParams& params, unsigned workers = 1);

}  // namespace billprep::analytics
