#pragma once

#include "ammknn/config.hpp"
#include "ammknn/preprocess.hpp"
#include "ammknn/svg_plot.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ammknn {

enum class OutputFormat { Json, Table };

struct CommandContext {
    std::ostream& out;
    OutputFormat format = OutputFormat::Table;
    unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// In-memory stages (no file I/O); the cmd_* wrappers below add files.
// ---------------------------------------------------------------------------

struct PreparedData {
    /// Alumni standardized on their own and correlation-selected (LOOCV input).
    Frame alumni;
    SelectionResult selection;
    /// Alumni and current cohort standardized together, selected columns only.
    /// Absent when no cohort column is configured.
    std::optional<Frame> train;
    std::optional<Frame> cohort;

    std::size_t input_rows = 0;
    std::size_t alumni_rows = 0;
    std::size_t alumni_missing_target = 0;
    std::size_t alumni_incomplete = 0;
    std::size_t cohort_rows = 0;
    std::size_t cohort_missing_target = 0;
    std::size_t cohort_incomplete = 0;
    std::size_t train_incomplete = 0;
    std::size_t candidate_columns = 0;
};

PreparedData prepare_data(const PipelineConfig& config, const Frame& input);

/// LOOCV report for the adaptive model and fixed-k KNN over `frame`.
ordered_json run_loocv(const PipelineConfig& config, const Frame& frame, unsigned threads = 1);

/// Cohort validation report (adaptive model only) plus worst-first roster.
ordered_json run_validate(const PipelineConfig& config, const Frame& train, const Frame& cohort, unsigned threads = 1);

/// JSON lines, one PredictionRecord per cohort row.
std::string run_predict(const PipelineConfig& config, const Frame& train, const Frame& cohort, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Command-line entry points. Each writes its artifacts under `out_dir`.
// ---------------------------------------------------------------------------

/// Writes alumni.csv, selection.json and, with a cohort column, train.csv
/// and cohort.csv.
void cmd_prepare(const PipelineConfig& config, const std::filesystem::path& input,
                 const std::filesystem::path& out_dir, const CommandContext& ctx);

/// Writes loocv_report.json.
void cmd_loocv(const PipelineConfig& config, const std::filesystem::path& prepared,
               const std::filesystem::path& out_dir, const CommandContext& ctx);

/// Writes validate_report.json.
void cmd_validate(const PipelineConfig& config, const std::filesystem::path& train,
                  const std::filesystem::path& cohort, const std::filesystem::path& out_dir,
                  const CommandContext& ctx);

/// Writes predictions.jsonl.
void cmd_predict(const PipelineConfig& config, const std::filesystem::path& train,
                 const std::filesystem::path& cohort, const std::filesystem::path& out_dir,
                 const CommandContext& ctx);

/// Writes the generated cohort CSV to `out_file`.
void cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_file, const CommandContext& ctx);

/// Writes an SVG figure for `model` in the given report.
void cmd_plot(const std::filesystem::path& report, PlotKind kind, const std::string& model,
              const std::filesystem::path& out_file, const CommandContext& ctx);

} // namespace ammknn
