#pragma once

#include "billprep/analytics/features.hpp"
#include "billprep/error.hpp"

#include "json.hpp"

#include <span>
#include <vector>

namespace billprep::analytics {

struct LogisticParams
{
    double l2 = 1e-3;  // penalty (l2/2)*|w|^2, bias excluded
    double tolerance = 1e-6;  // on the max-norm of the gradient
    std::size_t max_iterations = 20000;

    nlohmann::json to_json() const;
    static LogisticParams from_json(const nlohmann::json& j);
};

struct NonConvergence : Error
{
    NonConvergence(const std::string& what, double loss)
        : Error(what)
        , final_loss(loss)
    {
    }
    double final_loss;
};

// Mean log-loss plus L2 penalty over an already standardized matrix.
// theta = [w_0 .. w_{d-1}, b].
double logistic_loss(const Dataset& z, std::span<const double> theta, double l2);
std::vector<double> logistic_gradient(const Dataset& z, std::span<const double> theta, double l2);

class LogisticModel
{
public:
    LogisticModel() = default;
    LogisticModel(std::vector<double> mean, std::vector<double> scale, std::vector<double> weights, double bias)
        : mean_(std::move(mean))
        , scale_(std::move(scale))
        , weights_(std::move(weights))
        , bias_(bias)
    {
    }

    double probability(const double* row) const;
    int predict(const double* row) const { return probability(row) > 0.5 ? 1 : 0; }
    std::vector<int> predict(const Dataset& data) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& scale() const { return scale_; }
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

    nlohmann::json to_json() const;
    static LogisticModel from_json(const nlohmann::json& j);

    friend bool operator==(const LogisticModel&, const LogisticModel&) = default;

private:
    std::vector<double> mean_, scale_, weights_;
    double bias_ = 0.0;
};

// Training statistics used for z-scoring; constant columns get scale 1.
void standardization(const Dataset& data, std::vector<double>& mean, std::vector<double>& scale);
Dataset standardize(const Dataset& data, const std::vector<double>& mean, const std::vector<double>& scale);

// Full-batch gradient descent with backtracking line search. Deterministic
// (no sampling). Throws NonConvergence if the tolerance is not reached.
LogisticModel train_logistic_regression(const Dataset& train, const LogisticParams& params = {});

}  // namespace billprep::analytics
