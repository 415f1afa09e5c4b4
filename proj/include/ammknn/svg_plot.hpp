#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace ammknn {

enum class PlotKind {
    Scatter,        ///< predicted (x) vs actual (y), tier lines on both axes
    OutlierScatter, ///< outlier feature (x) vs actual (y), one fail line
};

/// Parses "scatter" / "packrat_scatter"; throws InvalidConfig otherwise.
PlotKind parse_plot_kind(std::string_view name);

struct ReferenceLine {
    enum class Axis { Vertical, Horizontal };
    Axis axis = Axis::Vertical;
    double value = 0.0;
    std::string color;
};

struct ScatterData {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string caption;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<ReferenceLine> lines;
};

/// Standalone SVG document. Points are `<circle class="point">`, reference
/// lines are `<line class="ref-line">`; output is byte-stable.
std::string render_scatter_svg(const ScatterData& data);

/// Build plot data from a loocv/validate report. Throws MalformedReport when
/// the report lacks the model or the per-subject fields the kind needs.
ScatterData scatter_from_report(const nlohmann::ordered_json& report, PlotKind kind, const std::string& model);

} // namespace ammknn
