#include "billprep/analytics/logistic.hpp"

#include <algorithm>
#include <cmath>

namespace billprep::analytics {

namespace {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t)
{
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double margin(const double* row, std::span<const double> theta, std::size_t d)
{
    double t = theta[d];
    for (std::size_t j = 0; j < d; ++j) t += theta[j] * row[j];
    return t;
}

double max_abs(const std::vector<double>& v)
{
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double logistic_loss(const Dataset& z, std::span<const double> theta, double l2)
{
    const std::size_t d = z.cols;
    if (theta.size() != d + 1) throw ValidationError("logistic: parameter vector has wrong length");
    double sum = 0;
    for (std::size_t r = 0; r < z.rows; ++r) {
        const double t = margin(z.row(r), theta, d);
        sum += softplus(t) - (z.y[r] ? t : 0.0);
    }
    double penalty = 0;
    for (std::size_t j = 0; j < d; ++j) penalty += theta[j] * theta[j];
    return sum / static_cast<double>(z.rows) + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(const Dataset& z, std::span<const double> theta, double l2)
{
    const std::size_t d = z.cols;
    if (theta.size() != d + 1) throw ValidationError("logistic: parameter vector has wrong length");
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t r = 0; r < z.rows; ++r) {
        const double* row = z.row(r);
        const double residual = sigmoid(margin(row, theta, d)) - z.y[r];
        for (std::size_t j = 0; j < d; ++j) g[j] += residual * row[j];
        g[d] += residual;
    }
    const double n = static_cast<double>(z.rows);
    for (std::size_t j = 0; j < d; ++j) g[j] = g[j] / n + l2 * theta[j];
    g[d] /= n;
    return g;
}

void standardization(const Dataset& data, std::vector<double>& mean, std::vector<double>& scale)
{
    mean.assign(data.cols, 0.0);
    scale.assign(data.cols, 1.0);
    if (data.rows == 0) return;
    const double n = static_cast<double>(data.rows);
    for (std::size_t c = 0; c < data.cols; ++c) {
        double m = 0;
        for (std::size_t r = 0; r < data.rows; ++r) m += data.at(r, c);
        m /= n;
        double ss = 0;
        for (std::size_t r = 0; r < data.rows; ++r) ss += (data.at(r, c) - m) * (data.at(r, c) - m);
        const double sd = std::sqrt(ss / n);
        mean[c] = m;
        scale[c] = sd > 0 ? sd : 1.0;
    }
}

Dataset standardize(const Dataset& data, const std::vector<double>& mean, const std::vector<double>& scale)
{
    Dataset z = data;
    for (std::size_t r = 0; r < z.rows; ++r)
        for (std::size_t c = 0; c < z.cols; ++c) z.x[r * z.cols + c] = (data.at(r, c) - mean[c]) / scale[c];
    return z;
}

LogisticModel train_logistic_regression(const Dataset& train, const LogisticParams& params)
{
    if (train.rows == 0) throw ValidationError("logistic: empty training set");
    if (!(params.l2 >= 0) || !(params.tolerance > 0)) throw ValidationError("logistic: bad parameters");
    const bool has_pos = std::find(train.y.begin(), train.y.end(), 1) != train.y.end();
    const bool has_neg = std::find(train.y.begin(), train.y.end(), 0) != train.y.end();
    if (!has_pos || !has_neg) throw ValidationError("logistic: training data must contain both classes");

    std::vector<double> mean, scale;
    standardization(train, mean, scale);
    const Dataset z = standardize(train, mean, scale);
    const std::size_t d = z.cols;

    std::vector<double> theta(d + 1, 0.0), trial(d + 1);
    double loss = logistic_loss(z, theta, params.l2);
    double step = 1.0;
    bool converged = false;
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
        const auto g = logistic_gradient(z, theta, params.l2);
        if (max_abs(g) < params.tolerance) {
            converged = true;
            break;
        }
        double g2 = 0;
        for (double v : g) g2 += v * v;
        step = std::min(step * 2.0, 1e6);
        double trial_loss;
        for (;;) {
            for (std::size_t j = 0; j <= d; ++j) trial[j] = theta[j] - step * g[j];
            trial_loss = logistic_loss(z, trial, params.l2);
            if (trial_loss <= loss - 0.5 * step * g2 || step < 1e-12) break;
            step *= 0.5;
        }
        if (!(trial_loss < loss)) break;  // no further progress possible
        theta.swap(trial);
        loss = trial_loss;
    }
    if (!converged) {
        const auto g = logistic_gradient(z, theta, params.l2);
        if (!(max_abs(g) < params.tolerance))
            throw NonConvergence("logistic: gradient norm " + std::to_string(max_abs(g)) + " above tolerance after " +
                                     std::to_string(params.max_iterations) + " iterations",
                                 loss);
    }

    std::vector<double> weights(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
    return LogisticModel(std::move(mean), std::move(scale), std::move(weights), theta[d]);
}

double LogisticModel::probability(const double* row) const
{
    double t = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) t += weights_[j] * (row[j] - mean_[j]) / scale_[j];
    return sigmoid(t);
}

std::vector<int> LogisticModel::predict(const Dataset& data) const
{
    if (data.cols != weights_.size()) throw ValidationError("logistic: feature count mismatch");
    std::vector<int> out(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) out[r] = predict(data.row(r));
    return out;
}

nlohmann::json LogisticParams::to_json() const
{
    return {{"l2", l2}, {"tolerance", tolerance}, {"max_iterations", max_iterations}};
}

LogisticParams LogisticParams::from_json(const nlohmann::json& j)
{
    LogisticParams p;
    p.l2 = j.value("l2", p.l2);
    p.tolerance = j.value("tolerance", p.tolerance);
    p.max_iterations = j.value("max_iterations", p.max_iterations);
    return p;
}

nlohmann::json LogisticModel::to_json() const
{
    return {{"model", "logistic_regression"}, {"mean", mean_}, {"scale", scale_}, {"weights", weights_}, {"bias", bias_}};
}

LogisticModel LogisticModel::from_json(const nlohmann::json& j)
{
    try {
        LogisticModel m(j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>(),
                        j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>());
        if (m.mean_.size() != m.weights_.size() || m.scale_.size() != m.weights_.size())
            throw ParseError("logistic: inconsistent vector lengths");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("logistic: ") + e.what());
    }
}

}  // namespace billprep::analytics
