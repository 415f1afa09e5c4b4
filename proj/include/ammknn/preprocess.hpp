#pragma once

#include "ammknn/frame.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ammknn {

/// Per-column z-score parameters shared by every frame they were fitted on.
struct StandardizationStats {
    std::vector<std::string> standardized_columns;
    std::vector<double> means; ///< parallel to standardized_columns
    std::vector<double> sds;   ///< sample (n - 1) standard deviations, all > 0
    std::vector<std::string> excluded_columns;
};

struct StandardizedFrames {
    Frame train;
    std::optional<Frame> extra;
    StandardizationStats stats;
};

/// Z-score every non-excluded column using statistics computed over the
/// rows of `train` and `extra` together. The target is always excluded and
/// passes through untouched; `exclude` adds bookkeeping columns.
StandardizedFrames standardize_joint(const Frame& train,
                                     const std::optional<Frame>& extra = std::nullopt,
                                     const std::vector<std::string>& exclude = {});

/// Sample Pearson correlation. Throws LengthMismatch, EmptyInput (< 2
/// points) or ConstantInput.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct ColumnCorrelation {
    std::string label;
    double correlation = 0.0;
    double sd = 0.0;
};

struct SelectionResult {
    std::vector<std::string> kept_columns;
    std::vector<std::pair<std::string, double>> dropped_columns;
    double threshold = 0.0;
    /// Every non-target column in frame order, with its correlation to the target.
    std::vector<ColumnCorrelation> correlations;
    /// One line per column (target included last), numbered like an R printout.
    std::vector<std::string> audit_log;

    /// Non-target column with the largest |r|; ties go to the earlier column.
    std::optional<std::string> strongest_feature() const;
};

struct Selection {
    Frame frame;
    SelectionResult result;
};

/// Remove non-target columns whose |r| with the target is below `threshold`.
/// Retained columns keep their order and values.
Selection select_by_correlation(const Frame& frame, double threshold);

} // namespace ammknn
