#include "billprep/analytics/forest.hpp"

#include "billprep/error.hpp"
#include "billprep/parallel.hpp"
#include "billprep/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace billprep::analytics {

namespace {

// Column-major copy of the training matrix plus, per feature, the row
// indices sorted by value. Shared read-only by all trees.
struct Presorted
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;          // values[f * rows + r]
    std::vector<std::uint32_t> order;    // order[f * rows + i]

    explicit Presorted(const Dataset& data)
        : rows(data.rows)
        , cols(data.cols)
        , values(data.rows * data.cols)
        , order(data.rows * data.cols)
    {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t f = 0; f < cols; ++f) values[f * rows + r] = data.at(r, f);
        for (std::size_t f = 0; f < cols; ++f) {
            auto first = order.begin() + static_cast<std::ptrdiff_t>(f * rows);
            std::iota(first, first + static_cast<std::ptrdiff_t>(rows), 0u);
            const double* col = &values[f * rows];
            std::stable_sort(first, first + static_cast<std::ptrdiff_t>(rows),
                             [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        }
    }
};

class TreeBuilder
{
public:
    TreeBuilder(const Presorted& data, const std::vector<int>& labels, const ForestParams& params, std::size_t mtry,
                std::uint64_t seed)
        : data_(data)
        , labels_(labels)
        , params_(params)
        , mtry_(mtry)
        , rng_(rng::make_engine(seed))
    {
    }

    DecisionTree build()
    {
        draw_weights();
        fill_root_lists();

        DecisionTree tree;
        auto& nodes = tree.nodes();
        nodes.emplace_back();
        struct Task
        {
            std::size_t begin, end, depth;
            int node;
        };
        std::vector<Task> stack{{0, active_, 0, 0}};
        std::vector<std::size_t> features(data_.cols);

        while (!stack.empty()) {
            const Task task = stack.back();
            stack.pop_back();

            double pos = 0, neg = 0;
            const std::uint32_t* any_list = lists_.data();
            for (std::size_t i = task.begin; i < task.end; ++i) {
                const auto r = any_list[i];
                (labels_[r] ? pos : neg) += weights_[r];
            }
            nodes[static_cast<std::size_t>(task.node)].label = pos > neg ? 1 : 0;

            const double min_leaf = static_cast<double>(params_.min_samples_leaf);
            if (pos == 0 || neg == 0) continue;
            if (params_.max_depth && task.depth >= params_.max_depth) continue;
            if (pos + neg < 2 * min_leaf) continue;

            // Features are drawn without replacement; more than mtry are
            // examined only while no valid split has been found.
            std::iota(features.begin(), features.end(), std::size_t{0});
            Split best;
            for (std::size_t k = 0; k < features.size(); ++k) {
                const auto j = k + static_cast<std::size_t>(rng::below(rng_, features.size() - k));
                std::swap(features[k], features[j]);
                evaluate(features[k], task.begin, task.end, pos, neg, best);
                if (k + 1 >= mtry_ && best.feature >= 0) break;
            }
            if (best.feature < 0) continue;

            const std::size_t mid = partition(task.begin, task.end, static_cast<std::size_t>(best.feature),
                                              best.threshold);
            const int left = static_cast<int>(nodes.size());
            nodes.emplace_back();
            nodes.emplace_back();
            TreeNode& node = nodes[static_cast<std::size_t>(task.node)];
            node.feature = best.feature;
            node.threshold = best.threshold;
            node.left = left;
            node.right = left + 1;
            stack.push_back({mid, task.end, task.depth + 1, left + 1});
            stack.push_back({task.begin, mid, task.depth + 1, left});
        }
        return tree;
    }

private:
    struct Split
    {
        int feature = -1;
        double threshold = 0;
        double score = -std::numeric_limits<double>::infinity();
    };

    void draw_weights()
    {
        weights_.assign(data_.rows, 0);
        if (params_.bootstrap) {
            for (std::size_t i = 0; i < data_.rows; ++i) ++weights_[rng::below(rng_, data_.rows)];
        } else {
            std::fill(weights_.begin(), weights_.end(), 1u);
        }
        active_ = static_cast<std::size_t>(std::count_if(weights_.begin(), weights_.end(), [](auto w) { return w > 0; }));
    }

    void fill_root_lists()
    {
        lists_.resize(active_ * data_.cols);
        scratch_.resize(active_);
        goes_left_.assign(data_.rows, 0);
        for (std::size_t f = 0; f < data_.cols; ++f) {
            std::uint32_t* out = &lists_[f * active_];
            const std::uint32_t* in = &data_.order[f * data_.rows];
            std::size_t j = 0;
            for (std::size_t i = 0; i < data_.rows; ++i)
                if (weights_[in[i]]) out[j++] = in[i];
        }
    }

    // Scores candidate thresholds of one feature; keeps the first maximum of
    // sum over sides of (sum_c count_c^2) / side_weight, i.e. least weighted Gini.
    void evaluate(std::size_t f, std::size_t begin, std::size_t end, double pos, double neg, Split& best) const
    {
        const std::uint32_t* list = &lists_[f * active_];
        const double* col = &data_.values[f * data_.rows];
        const double total = pos + neg;
        const double min_leaf = static_cast<double>(params_.min_samples_leaf);
        double lp = 0, ln = 0;
        for (std::size_t i = begin; i + 1 < end; ++i) {
            const auto r = list[i];
            (labels_[r] ? lp : ln) += weights_[r];
            const double v = col[r];
            if (!(v < col[list[i + 1]])) continue;
            const double lw = lp + ln;
            const double rw = total - lw;
            if (lw < min_leaf || rw < min_leaf) continue;
            const double rp = pos - lp, rn = neg - ln;
            const double score = (lp * lp + ln * ln) / lw + (rp * rp + rn * rn) / rw;
            if (score > best.score) {
                best.score = score;
                best.feature = static_cast<int>(f);
                best.threshold = v;
            }
        }
    }

    // Stable-partitions every feature list of [begin, end) so rows going left
    // come first. Returns the split point.
    std::size_t partition(std::size_t begin, std::size_t end, std::size_t feature, double threshold)
    {
        const double* col = &data_.values[feature * data_.rows];
        const std::uint32_t* split_list = &lists_[feature * active_];
        std::size_t left_count = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = split_list[i];
            const bool left = col[r] <= threshold;
            goes_left_[r] = left;
            left_count += left;
        }
        for (std::size_t f = 0; f < data_.cols; ++f) {
            std::uint32_t* list = &lists_[f * active_];
            std::size_t l = begin, rr = 0;
            for (std::size_t i = begin; i < end; ++i) {
                const auto r = list[i];
                if (goes_left_[r]) list[l++] = r;
                else scratch_[rr++] = r;
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(rr), list + l);
        }
        return begin + left_count;
    }

    const Presorted& data_;
    const std::vector<int>& labels_;
    const ForestParams& params_;
    std::size_t mtry_;
    rng::Engine rng_;

    std::vector<std::uint32_t> weights_;
    std::size_t active_ = 0;
    std::vector<std::uint32_t> lists_;
    std::vector<std::uint32_t> scratch_;
    std::vector<char> goes_left_;
};

}  // namespace

int DecisionTree::predict(const double* row) const
{
    std::size_t i = 0;
    for (;;) {
        const TreeNode& n = nodes_[i];
        if (n.feature < 0) return n.label;
        i = static_cast<std::size_t>(row[n.feature] <= n.threshold ? n.left : n.right);
    }
}

std::size_t DecisionTree::depth() const
{
    if (nodes_.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
        if (n.feature >= 0) {
            stack.emplace_back(n.left, d + 1);
            stack.emplace_back(n.right, d + 1);
        }
    }
    return deepest;
}

int RandomForest::predict(const double* row) const
{
    std::size_t votes = 0;
    for (const auto& t : trees_) votes += static_cast<std::size_t>(t.predict(row));
    return 2 * votes > trees_.size() ? 1 : 0;
}

std::vector<int> RandomForest::predict(const Dataset& data) const
{
    if (data.cols != features_) throw ValidationError("forest: feature count mismatch");
    std::vector<int> out(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) out[r] = predict(data.row(r));
    return out;
}

RandomForest train_random_forest(const Dataset& train, const ForestParams& params, unsigned workers)
{
    if (params.trees == 0) throw ValidationError("forest: tree count must be >= 1");
    if (params.min_samples_leaf == 0) throw ValidationError("forest: min_samples_leaf must be >= 1");
    if (train.cols == 0) throw ValidationError("forest: no features");
    if (train.rows > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("forest: too many rows");
    if (params.features_per_split > train.cols)
        throw ValidationError("forest: features_per_split exceeds feature count");
    const bool has_pos = std::find(train.y.begin(), train.y.end(), 1) != train.y.end();
    const bool has_neg = std::find(train.y.begin(), train.y.end(), 0) != train.y.end();
    if (!has_pos || !has_neg) throw ValidationError("forest: training data must contain both classes");

    const std::size_t mtry = params.features_per_split
                                 ? params.features_per_split
                                 : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                                std::floor(std::sqrt(static_cast<double>(train.cols)))));
    const Presorted presorted(train);
    std::vector<DecisionTree> trees(params.trees);
    parallel_for(params.trees, workers, [&](std::size_t t) {
        TreeBuilder builder(presorted, train.y, params, mtry, rng::derive_seed(params.seed, t));
        trees[t] = builder.build();
    });
    return RandomForest(std::move(trees), train.cols);
}

nlohmann::json ForestParams::to_json() const
{
    return {{"trees", trees},
            {"max_depth", max_depth},
            {"min_samples_leaf", min_samples_leaf},
            {"features_per_split", features_per_split},
            {"bootstrap", bootstrap},
            {"seed", seed}};
}

ForestParams ForestParams::from_json(const nlohmann::json& j)
{
    ForestParams p;
    p.trees = j.value("trees", p.trees);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
    p.features_per_split = j.value("features_per_split", p.features_per_split);
    p.bootstrap = j.value("bootstrap", p.bootstrap);
    p.seed = j.value("seed", p.seed);
    return p;
}

nlohmann::json RandomForest::to_json() const
{
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : t.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    return {{"model", "random_forest"}, {"features", features_}, {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j)
{
    try {
        std::vector<DecisionTree> trees;
        for (const auto& jt : j.at("trees")) {
            DecisionTree t;
            for (const auto& jn : jt.at("nodes")) {
                TreeNode n;
                n.feature = jn.at(0).get<int>();
                n.threshold = jn.at(1).get<double>();
                n.left = jn.at(2).get<int>();
                n.right = jn.at(3).get<int>();
                n.label = jn.at(4).get<int>();
                t.nodes().push_back(n);
            }
            const auto count = static_cast<int>(t.nodes().size());
            for (const auto& n : t.nodes())
                if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count))
                    throw ParseError("forest: child index out of range");
            trees.push_back(std::move(t));
        }
        return RandomForest(std::move(trees), j.at("features").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("forest: ") + e.what());
    }
}

}  // namespace billprep::analytics
