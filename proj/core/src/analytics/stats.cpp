#include "billprep/analytics/stats.hpp"

#include "billprep/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace billprep::analytics {

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw ValidationError("pearson: columns differ in length");
    if (x.size() < 2) throw ValidationError("pearson: need at least two points");

    // Two passes; the mean gets one correction step so that data far from
    // the origin keep their precision.
    auto mean_of = [](std::span<const double> v) {
        double sum = 0;
        for (double a : v) sum += a;
        double mean = sum / static_cast<double>(v.size());
        double residual = 0;
        for (double a : v) residual += a - mean;
        return mean + residual / static_cast<double>(v.size());
    };
    const double mean_x = mean_of(x), mean_y = mean_of(y);
    double m2x = 0, m2y = 0, cxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        m2x += dx * dx;
        m2y += dy * dy;
        cxy += dx * dy;
    }
    if (!(m2x > 0) || !(m2y > 0)) throw UndefinedCorrelation("pearson: zero variance");
    const double r = cxy / std::sqrt(m2x * m2y);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<CorrelationEntry> correlation_report(const Dataset& data)
{
    if (data.rows < 2) throw ValidationError("correlation_report: need at least two vectors");
    std::vector<double> target(data.y.begin(), data.y.end());
    std::vector<double> column(data.rows);
    std::vector<CorrelationEntry> out;
    for (std::size_t c = 0; c < data.cols; ++c) {
        for (std::size_t r = 0; r < data.rows; ++r) column[r] = data.at(r, c);
        CorrelationEntry e{data.names[c], std::nullopt};
        try {
            e.r = pearson(column, target);
        } catch (const UndefinedCorrelation&) {
        }
        out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(), [](const CorrelationEntry& a, const CorrelationEntry& b) {
        if (a.r.has_value() != b.r.has_value()) return a.r.has_value();
        if (!a.r) return a.feature < b.feature;
        const double ma = std::abs(*a.r), mb = std::abs(*b.r);
        if (ma != mb) return ma > mb;
        return a.feature < b.feature;
    });
    return out;
}

void write_correlations_csv(std::ostream& out, const std::vector<CorrelationEntry>& entries)
{
    static const std::vector<std::string> header = {"feature", "r"};
    csv::write_header(out, header);
    for (const auto& e : entries) {
        csv::Field r;
        if (e.r) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", *e.r);
            r = buf;
        } else {
            r = "undefined";
        }
        const csv::Row row{e.feature, r};
        csv::write_row(out, row);
    }
}

}  // namespace billprep::analytics
