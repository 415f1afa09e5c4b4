#include "ammknn/preprocess.hpp"

#include "ammknn/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ammknn {

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments sample_moments(std::span<const double> v) {
    Moments m;
    if (v.empty()) return m;
    double sum = 0.0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return m;
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return m;
}

void require_complete(std::span<const double> v, const std::string& label) {
    if (std::any_of(v.begin(), v.end(), [](double x) { return is_missing(x); }))
        throw Error(ErrorCode::MissingValue, "column '" + label + "' has missing cells");
}

std::string format_sig(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.7g", v);
    return buf;
}

} // namespace

StandardizedFrames standardize_joint(const Frame& train,
                                     const std::optional<Frame>& extra,
                                     const std::vector<std::string>& exclude) {
    if (extra && extra->column_names() != train.column_names())
        throw Error(ErrorCode::ColumnMismatch, "frames to standardize jointly have different columns");

    StandardizationStats stats;
    stats.excluded_columns.push_back(train.target_name());
    for (const auto& e : exclude) {
        train.column_index(e);
        if (std::find(stats.excluded_columns.begin(), stats.excluded_columns.end(), e) ==
            stats.excluded_columns.end())
            stats.excluded_columns.push_back(e);
    }

    std::vector<std::size_t> targets_idx;
    for (std::size_t j = 0; j < train.num_columns(); ++j) {
        const auto& label = train.column_names()[j];
        if (std::find(stats.excluded_columns.begin(), stats.excluded_columns.end(), label) !=
            stats.excluded_columns.end())
            continue;

        auto pooled = train.column(j);
        if (extra) {
            auto more = extra->column(j);
            pooled.insert(pooled.end(), more.begin(), more.end());
        }
        require_complete(pooled, label);
        const auto m = sample_moments(pooled);
        if (!(m.sd > 0.0))
            throw Error(ErrorCode::ZeroVarianceColumn, "column '" + label + "' has zero variance");

        stats.standardized_columns.push_back(label);
        stats.means.push_back(m.mean);
        stats.sds.push_back(m.sd);
        targets_idx.push_back(j);
    }

    auto transform = [&](const Frame& f) {
        auto rows = f.rows();
        for (auto& row : rows)
            for (std::size_t s = 0; s < targets_idx.size(); ++s) {
                auto& cell = row[targets_idx[s]];
                cell = (cell - stats.means[s]) / stats.sds[s];
            }
        return f.with_rows(std::move(rows));
    };

    std::optional<Frame> extra_out;
    if (extra) extra_out = transform(*extra);
    return {transform(train), std::move(extra_out), std::move(stats)};
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch,
                    "lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    if (x.size() < 2) throw Error(ErrorCode::EmptyInput, "correlation needs at least two points");

    const auto mx = sample_moments(x).mean;
    const auto my = sample_moments(y).mean;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (std::isnan(sxy)) throw Error(ErrorCode::MissingValue, "correlation input has missing cells");
    if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorCode::ConstantInput, "correlation input is constant");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<std::string> SelectionResult::strongest_feature() const {
    const ColumnCorrelation* best = nullptr;
    for (const auto& c : correlations)
        if (!best || std::abs(c.correlation) > std::abs(best->correlation)) best = &c;
    if (!best) return std::nullopt;
    return best->label;
}

Selection select_by_correlation(const Frame& frame, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::InvalidConfig, "correlation threshold must be in [0, 1]");

    const auto y = frame.targets();
    const auto& target = frame.target_name();
    SelectionResult result;
    result.threshold = threshold;

    std::size_t line_no = 0;
    for (std::size_t j = 0; j < frame.num_columns(); ++j) {
        if (j == frame.target_index()) continue;
        const auto& label = frame.column_names()[j];
        const auto x = frame.column(j);
        double r = 0.0;
        try {
            r = pearson_correlation(x, y);
        } catch (const Error& e) {
            throw e.with_context("column '" + label + "'");
        }
        const double sd = sample_moments(x).sd;
        result.correlations.push_back({label, r, sd});
        result.audit_log.push_back(std::to_string(++line_no) + ". Correlation between " + label +
                                   " (SD = " + format_sig(sd) + ") and " + target + " = " + format_sig(r) +
                                   ".");
        if (std::abs(r) >= threshold)
            result.kept_columns.push_back(label);
        else
            result.dropped_columns.emplace_back(label, r);
    }
    result.audit_log.push_back(std::to_string(++line_no) + ". Correlation between " + target +
                               " (SD = " + format_sig(sample_moments(y).sd) + ") and " + target + " = 1.");

    // Target keeps its original position among the survivors.
    std::vector<std::string> keep;
    for (const auto& label : frame.column_names())
        if (label == target ||
            std::find(result.kept_columns.begin(), result.kept_columns.end(), label) != result.kept_columns.end())
            keep.push_back(label);
    result.kept_columns = keep;

    return {frame.select_columns(keep), std::move(result)};
}

} // namespace ammknn
