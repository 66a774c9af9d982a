#pragma once

#include "billprep/analytics/evaluation.hpp"
#include "billprep/mapping.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace billprep::cli {

enum ExitCode : int { ok = 0, invalid = 1, fatal = 2 };

struct StageToggles
{
    bool features = true;
    bool correlate = true;
    bool evaluate = true;
    bool train = true;
};

// Everything a run needs. Relative paths in a config file are resolved
// against the file's directory.
struct PipelineConfig
{
    std::filesystem::path corpus;
    std::filesystem::path mapping;
    std::filesystem::path out = ".";
    std::string salt;
    MonthLocale locale = MonthLocale::english;
    unsigned workers = 1;
    std::optional<std::uint64_t> seed;
    bool sql_dump = false;
    analytics::CrossValidationParams analytics;
    StageToggles stages;

    static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    nlohmann::json to_json() const;
};

// Entry point of the `billprep` tool. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace billprep::cli
