#include "ammknn/svg_plot.hpp"

#include "ammknn/error.hpp"
#include "ammknn/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace ammknn {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 80.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded_range(std::vector<double> values, Range fallback) {
    if (values.empty()) return fallback;
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = *mn, hi = *mx;
    if (hi - lo < 1e-9) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

double tick_step(const Range& r) {
    const double raw = (r.hi - r.lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double nice = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::optional<double> correlation_or_none(const std::vector<double>& x, const std::vector<double>& y) {
    try {
        return pearson_correlation(x, y);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConstantInput || e.code() == ErrorCode::EmptyInput) return std::nullopt;
        throw;
    }
}

std::string correlation_caption(const std::vector<double>& x, const std::vector<double>& y) {
    const auto r = correlation_or_none(x, y);
    if (!r) return "n = " + std::to_string(x.size()) + ", correlation undefined";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "n = %zu, correlation = %.7g", x.size(), *r);
    return buf;
}

[[noreturn]] void malformed(const std::string& why) {
    throw Error(ErrorCode::MalformedReport, why);
}

double require_number(const nlohmann::ordered_json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) malformed(where + " lacks numeric '" + key + "'");
    return j.at(key).get<double>();
}

} // namespace

PlotKind parse_plot_kind(std::string_view name) {
    if (name == "scatter") return PlotKind::Scatter;
    if (name == "packrat_scatter") return PlotKind::OutlierScatter;
    throw Error(ErrorCode::InvalidConfig, "unknown plot kind '" + std::string(name) + "'");
}

std::string render_scatter_svg(const ScatterData& d) {
    std::vector<double> xs = d.x, ys = d.y;
    for (const auto& l : d.lines) (l.axis == ReferenceLine::Axis::Vertical ? xs : ys).push_back(l.value);
    const Range xr = padded_range(xs, {200.0, 800.0});
    const Range yr = padded_range(ys, {200.0, 800.0});

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double v) { return kTop + plot_h - (v - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\" font-family=\"sans-serif\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight) << "\" fill=\"white\"/>\n";
    s << "<text class=\"title\" x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(d.title) << "</text>\n";

    // Axes and ticks.
    const double x0 = kLeft, x1 = kLeft + plot_w, y0 = kTop + plot_h, y1 = kTop;
    s << "<line class=\"axis\" x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\""
      << num(y0) << "\" stroke=\"black\"/>\n";
    s << "<line class=\"axis\" x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
      << num(y1) << "\" stroke=\"black\"/>\n";
    const double xstep = tick_step(xr);
    for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + 1e-9; t += xstep) {
        s << "<line class=\"tick\" x1=\"" << num(px(t)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px(t))
          << "\" y2=\"" << num(y0 + 5) << "\" stroke=\"black\"/>\n";
        s << "<text class=\"tick-label\" x=\"" << num(px(t)) << "\" y=\"" << num(y0 + 18)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
    }
    const double ystep = tick_step(yr);
    for (double t = std::ceil(yr.lo / ystep) * ystep; t <= yr.hi + 1e-9; t += ystep) {
        s << "<line class=\"tick\" x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(x0)
          << "\" y2=\"" << num(py(t)) << "\" stroke=\"black\"/>\n";
        s << "<text class=\"tick-label\" x=\"" << num(x0 - 8) << "\" y=\"" << num(py(t) + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
    }
    s << "<text class=\"axis-label\" x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(y0 + 38)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(d.x_label) << "</text>\n";
    s << "<text class=\"axis-label\" x=\"18\" y=\"" << num(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " << num(kTop + plot_h / 2) << ")\">"
      << xml_escape(d.y_label) << "</text>\n";

    for (const auto& l : d.lines) {
        const bool v = l.axis == ReferenceLine::Axis::Vertical;
        s << "<line class=\"ref-line\" x1=\"" << num(v ? px(l.value) : x0) << "\" y1=\"" << num(v ? y0 : py(l.value))
          << "\" x2=\"" << num(v ? px(l.value) : x1) << "\" y2=\"" << num(v ? y1 : py(l.value)) << "\" stroke=\""
          << xml_escape(l.color) << "\" stroke-width=\"1.5\"/>\n";
    }

    for (std::size_t i = 0; i < d.x.size(); ++i)
        s << "<circle class=\"point\" cx=\"" << num(px(d.x[i])) << "\" cy=\"" << num(py(d.y[i]))
          << "\" r=\"3.5\" fill=\"none\" stroke=\"#1f3b73\"/>\n";

    s << "<text class=\"caption\" x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 14)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(d.caption) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

ScatterData scatter_from_report(const nlohmann::ordered_json& report, PlotKind kind, const std::string& model) {
    if (!report.is_object() || !report.contains("models") || !report["models"].is_object())
        malformed("report has no 'models' object");
    if (!report["models"].contains(model)) malformed("report has no model '" + model + "'");
    const auto& m = report["models"][model];
    if (!m.contains("subjects") || !m["subjects"].is_array()) malformed("model '" + model + "' has no subjects");
    if (!m.contains("actual_tiers") || !m["actual_tiers"].is_object())
        malformed("model '" + model + "' has no actual_tiers");
    const double fail_below = require_number(m["actual_tiers"], "fail_below", "actual_tiers");
    const double at_risk_upper = require_number(m["actual_tiers"], "at_risk_upper", "actual_tiers");

    ScatterData d;
    const auto& subjects = m["subjects"];
    d.y_label = "Actual score";
    if (kind == PlotKind::Scatter) {
        d.title = "Predicted vs actual (" + model + ")";
        d.x_label = "Predicted score";
        for (const auto& s : subjects) {
            d.x.push_back(require_number(s, "predicted", "subject"));
            d.y.push_back(require_number(s, "actual", "subject"));
        }
        d.lines = {{ReferenceLine::Axis::Vertical, fail_below, "red"},
                   {ReferenceLine::Axis::Horizontal, fail_below, "red"},
                   {ReferenceLine::Axis::Vertical, at_risk_upper, "green"},
                   {ReferenceLine::Axis::Horizontal, at_risk_upper, "green"}};
    } else {
        std::string feature = "outlier feature";
        if (m.contains("parameters") && m["parameters"].contains("outlier_feature") &&
            m["parameters"]["outlier_feature"].is_string())
            feature = m["parameters"]["outlier_feature"].get<std::string>();
        d.title = feature + " vs actual (" + model + ")";
        d.x_label = feature + " (standardized)";
        for (const auto& s : subjects) {
            if (!s.contains("outlier_value")) malformed("subjects lack 'outlier_value'");
            if (s["outlier_value"].is_null()) continue;
            d.x.push_back(require_number(s, "outlier_value", "subject"));
            d.y.push_back(require_number(s, "actual", "subject"));
        }
        d.lines = {{ReferenceLine::Axis::Horizontal, fail_below, "red"}};
    }
    d.caption = correlation_caption(d.x, d.y);
    return d;
}

} // namespace ammknn
