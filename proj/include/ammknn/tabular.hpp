#pragma once

#include "ammknn/frame.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ammknn {

struct CsvOptions {
    std::string target_name;
    std::optional<std::string> id_column;
    /// When the target is absent from the header, add it as an all-missing
    /// column instead of failing. Used for cohorts that have no outcome yet.
    bool allow_missing_target = false;
};

/// Parse CSV text (header row, `.` decimals, empty cell = missing).
Frame read_csv(std::string_view text, const CsvOptions& options);
Frame load_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Serialize with the original header order (id column restored in place).
std::string to_csv(const Frame& frame);
void write_csv(const Frame& frame, const std::filesystem::path& path);

enum class Keep { Below, AtOrAbove };

/// Keep rows whose `key_column` is below / at-or-above `cutoff`. Rows with a
/// missing key are never kept.
Frame filter_by_cutoff(const Frame& frame, const std::string& key_column, double cutoff, Keep keep);

/// Keep rows whose `key_column` equals `value` exactly.
Frame filter_equal(const Frame& frame, const std::string& key_column, double value);

struct DropResult {
    Frame frame;
    std::size_t dropped_count = 0;
};

DropResult drop_missing_target(const Frame& frame);

/// Complete-case filter over all numeric columns.
DropResult drop_incomplete(const Frame& frame);

/// Complete-case filter restricted to `columns`.
DropResult drop_incomplete(const Frame& frame, const std::vector<std::string>& columns);

struct AggregationSpec {
    std::string group_name;
    std::vector<std::string> member_columns;
};

/// Append one row-wise mean column per spec. A missing member makes the
/// group value missing.
Frame aggregate_means(const Frame& frame, const std::vector<AggregationSpec>& specs, bool drop_members);

struct CohortSummary {
    double cohort_key = 0.0;
    std::size_t count = 0;
    /// Undefined (NaN) when the cohort has no observed targets; sd also needs two.
    double mean_target = kMissing;
    double sd_target = kMissing;
    std::size_t pass_count = 0;
    std::size_t fail_count = 0;
};

/// One summary per distinct cohort value, ascending. A target passes when
/// it is strictly greater than `pass_threshold - 1`.
std::vector<CohortSummary> summarize_cohorts(const Frame& frame,
                                             const std::string& cohort_column,
                                             double pass_threshold);

} // namespace ammknn
