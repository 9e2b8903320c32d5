#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "strokefusion/fusion.hpp"
#include "strokefusion/harness.hpp"
#include "strokefusion/synth.hpp"

namespace strokefusion {

using Json = nlohmann::ordered_json;

/// Contents of a run configuration file. Unknown keys are rejected.
struct RunConfig {
    std::optional<std::string> cohort;
    std::optional<std::string> out;
    std::optional<std::string> format;
    FusionConfig fusion;
    CvPlan plan;
};

/// Overlays the keys present in `doc` onto `config`. Throws ConfigError.
void merge_run_config(RunConfig& config, const Json& doc);
Json to_json(const RunConfig& config);

Json to_json(const FusionConfig& config);
Json to_json(const CvPlan& plan);
Json to_json(const MetricReport& report);
Json to_json(const RunSummary& summary);
Json to_json(const CvReport& report);
Json to_json(const TestResult& result);

/// Reads a summary written by to_json(RunSummary). Only the parts needed for
/// comparison are restored.
RunSummary summary_from_json(const Json& doc);

/// Picks one model out of a cv report, or returns a bare summary as is.
/// An empty `model` selects the weighted ensemble, else the only model.
RunSummary select_summary(const Json& doc, const std::string& model);

/// Throws ConfigError on unknown keys or bad values.
SyntheticSpec synthetic_spec_from_json(const Json& doc);
Json to_json(const SyntheticSpec& spec);

/// Parses JSON text, turning syntax errors into ConfigError.
Json parse_json(const std::string& text, const std::string& what);

} // namespace strokefusion
