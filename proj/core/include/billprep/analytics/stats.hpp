#pragma once

#include "billprep/analytics/features.hpp"
#include "billprep/error.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace billprep::analytics {

struct UndefinedCorrelation : Error
{
    using Error::Error;
};

// Sample Pearson correlation. Throws UndefinedCorrelation when either column
// has zero variance, ValidationError on size mismatch or fewer than 2 points.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationEntry
{
    std::string feature;
    std::optional<double> r;  // nullopt when undefined (constant column)
};

// Pearson r of every feature column against churn, sorted by |r| descending
// (ties by name); undefined entries go last.
std::vector<CorrelationEntry> correlation_report(const Dataset& data);

void write_correlations_csv(std::ostream& out, const std::vector<CorrelationEntry>& entries);

}  // namespace billprep::analytics
