#pragma once

#include "ammknn/evaluation.hpp"
#include "ammknn/knn.hpp"
#include "ammknn/synth.hpp"
#include "ammknn/tabular.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ammknn {

using ordered_json = nlohmann::ordered_json;

/// Every tunable of the workflow. Defaults:
/// (maxK 20, outlier cutoff -2, pass mark 350, bands 350/375, cohort
/// predicted upper band 385, sweep 349..420, year cutoff 2019).
struct PipelineConfig {
    std::string target_name = "score";
    std::optional<std::string> id_column = "id";
    std::optional<std::string> cohort_column = "cohort";
    double year_cutoff = 2019.0;

    std::vector<AggregationSpec> aggregations;
    bool drop_aggregated_members = true;
    /// Candidate predictors before the correlation filter; empty means all.
    std::vector<std::string> include_columns;
    std::vector<std::string> exclude_columns;
    double correlation_threshold = 0.1;

    /// outlier_feature unset means "strongest |r| on the training frame".
    AmmknnConfig ammknn;
    std::size_t fixed_k = 12;

    double pass_at = 350.0;
    TierBoundaries actual_tiers{350.0, 375.0};
    TierBoundaries loocv_predicted_tiers{350.0, 375.0};
    TierBoundaries validation_predicted_tiers{350.0, 385.0};
    std::vector<double> sweep_cutoffs = kDefaultSweepCutoffs;

    std::uint64_t seed = 7;

    /// Throws InvalidConfig for out-of-range values.
    void validate() const;
};

/// Strict parse: unknown keys are rejected so typos do not pass silently.
PipelineConfig config_from_json(const nlohmann::json& j);
ordered_json config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const PipelineConfig& config);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
ordered_json synth_spec_to_json(const SynthSpec& spec);

/// Read a CSV with the configured target, attaching the id column only when
/// the header has it.
Frame load_frame(const std::filesystem::path& path, const PipelineConfig& config, bool allow_missing_target = false);

/// Pick the outlier feature for a training frame: the configured one, or
/// the feature most correlated (in absolute value) with the target.
std::optional<std::string> resolve_outlier_feature(const PipelineConfig& config, const Frame& training);

} // namespace ammknn
