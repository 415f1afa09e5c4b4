#pragma once

#include "ammknn/config.hpp"
#include "ammknn/evaluation.hpp"
#include "ammknn/knn.hpp"
#include "ammknn/preprocess.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ammknn {

inline constexpr const char* kToolVersion = "ammknn 1.0.0";

/// Everything needed to score one model's predictions against the truth.
struct ModelEvaluation {
    std::string name;
    ordered_json parameters = ordered_json::object();
    std::vector<std::optional<std::string>> ids;
    std::vector<double> actual;
    std::vector<double> predicted;
    /// Adaptive-model internals, parallel to `predicted`; empty for fixed-k.
    std::vector<PredictionRecord> records;
    double pass_at = 350.0;
    TierBoundaries actual_tiers;
    TierBoundaries predicted_tiers;
    std::vector<double> sweep_cutoffs = kDefaultSweepCutoffs;
};

/// Per-subject rows, both matrices, metrics, 3x3 accuracy, sweep table and
/// the predicted-vs-actual correlation. Keys are emitted in a fixed order.
ordered_json evaluate_model(const ModelEvaluation& model);

ordered_json matrix_to_json(const ConfusionMatrix2& cm);
ordered_json matrix_to_json(const ConfusionMatrix3& cm);
/// Undefined values are written as the string "undefined".
ordered_json metrics_to_json(const std::optional<Metrics>& m);
ordered_json selection_to_json(const SelectionResult& s);

/// One JSON-lines record: ranking (with training ids when known),
/// cumulative means, both minima, outlier flag, prediction and tier.
ordered_json prediction_record_to_json(const PredictionRecord& rec,
                                       const TierBoundaries& predicted_tiers,
                                       const std::vector<std::optional<std::string>>& training_ids = {});

/// Report envelope: kind, provenance (tool, seed, config hash), config echo.
ordered_json report_header(const std::string& kind, const PipelineConfig& config);

/// Human-readable rendering of a report produced by the loocv/validate commands.
std::string format_report_table(const ordered_json& report);

/// Fixed-precision text for tables; "undefined" for nullopt.
std::string format_fraction(const std::optional<double>& v, int digits = 4);

} // namespace ammknn
