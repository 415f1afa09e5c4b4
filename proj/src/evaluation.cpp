#include "ammknn/evaluation.hpp"

#include "ammknn/error.hpp"

#include <algorithm>
#include <numeric>

namespace ammknn {

void TierBoundaries::validate() const {
    auto in_range = [](double v) { return v >= 200.0 && v <= 800.0; };
    if (!(fail_below < at_risk_upper) || !in_range(fail_below) || !in_range(at_risk_upper))
        throw Error(ErrorCode::InvalidConfig, "tier boundaries must satisfy 200 <= fail_below < at_risk_upper <= 800");
}

std::string_view to_string(Outcome o) noexcept {
    return o == Outcome::Pass ? "pass" : "fail";
}

std::string_view to_string(Tier t) noexcept {
    switch (t) {
    case Tier::Fail: return "fail";
    case Tier::AtRisk: return "at_risk";
    case Tier::Pass: return "pass";
    }
    return "unknown";
}

Outcome classify_binary(double score, double pass_at) {
    return score >= pass_at ? Outcome::Pass : Outcome::Fail;
}

Tier classify_tier(double score, const TierBoundaries& bounds) {
    if (score < bounds.fail_below) return Tier::Fail;
    if (score <= bounds.at_risk_upper) return Tier::AtRisk;
    return Tier::Pass;
}

std::size_t ConfusionMatrix3::total() const noexcept {
    std::size_t n = 0;
    for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
    return n;
}

std::size_t ConfusionMatrix3::trace() const noexcept {
    return counts[0][0] + counts[1][1] + counts[2][2];
}

std::size_t ConfusionMatrix3::actual_count(Tier t) const noexcept {
    const auto& row = counts[static_cast<std::size_t>(t)];
    return row[0] + row[1] + row[2];
}

std::size_t ConfusionMatrix3::predicted_count(Tier t) const noexcept {
    const auto j = static_cast<std::size_t>(t);
    return counts[0][j] + counts[1][j] + counts[2][j];
}

namespace {

void require_paired(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(actual.size()) + " actual vs " +
                                                   std::to_string(predicted.size()) + " predicted scores");
    auto missing = [](double v) { return is_missing(v); };
    if (std::any_of(actual.begin(), actual.end(), missing) ||
        std::any_of(predicted.begin(), predicted.end(), missing))
        throw Error(ErrorCode::MissingValue, "scores to compare contain missing values");
}

void tally(ConfusionMatrix2& cm, bool actual_fail, bool predicted_fail) {
    if (actual_fail)
        ++(predicted_fail ? cm.tp : cm.fn);
    else
        ++(predicted_fail ? cm.fp : cm.tn);
}

} // namespace

ConfusionMatrix2 confusion_2x2(std::span<const double> actual, std::span<const double> predicted, double pass_at) {
    require_paired(actual, predicted);
    ConfusionMatrix2 cm;
    for (std::size_t i = 0; i < actual.size(); ++i)
        tally(cm, classify_binary(actual[i], pass_at) == Outcome::Fail,
              classify_binary(predicted[i], pass_at) == Outcome::Fail);
    return cm;
}

ConfusionMatrix3 confusion_3x3(std::span<const double> actual,
                               std::span<const double> predicted,
                               const TierBoundaries& actual_bounds,
                               const TierBoundaries& predicted_bounds) {
    require_paired(actual, predicted);
    ConfusionMatrix3 cm;
    for (std::size_t i = 0; i < actual.size(); ++i)
        ++cm.at(classify_tier(actual[i], actual_bounds), classify_tier(predicted[i], predicted_bounds));
    return cm;
}

Metrics metrics_from_cm(const ConfusionMatrix2& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no subjects");
    Metrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fn > 0) m.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (cm.tn + cm.fp > 0) m.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    return m;
}

double accuracy_3x3(const ConfusionMatrix3& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no subjects");
    return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

std::vector<SweepRow> threshold_sweep(std::span<const double> actual,
                                      std::span<const double> predicted,
                                      const std::vector<double>& cutoffs,
                                      double pass_at) {
    require_paired(actual, predicted);
    if (cutoffs.empty()) throw Error(ErrorCode::EmptyInput, "threshold sweep needs at least one cutoff");

    std::vector<SweepRow> out;
    out.reserve(cutoffs.size());
    for (double c : cutoffs) {
        SweepRow row;
        row.cutoff = c;
        for (std::size_t i = 0; i < actual.size(); ++i)
            tally(row.matrix, classify_binary(actual[i], pass_at) == Outcome::Fail, !(predicted[i] > c));
        if (row.matrix.total() > 0) row.metrics = metrics_from_cm(row.matrix);
        out.push_back(row);
    }
    return out;
}

bool sweep_sensitivity_monotone_check(const std::vector<SweepRow>& sweep) {
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (sweep[i].cutoff < sweep[i - 1].cutoff)
            throw Error(ErrorCode::UnsortedCutoffs, "sweep cutoffs are not in ascending order");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (sweep[i].matrix.tp < sweep[i - 1].matrix.tp) return false;
    return true;
}

std::pair<Frame, Frame> loocv_fold(const Frame& frame, std::size_t i) {
    std::vector<std::size_t> rest;
    rest.reserve(frame.num_rows() - 1);
    for (std::size_t r = 0; r < frame.num_rows(); ++r)
        if (r != i) rest.push_back(r);

    const std::size_t one[] = {i};
    auto held = frame.select_rows(one);
    auto rows = held.rows();
    rows[0][frame.target_index()] = kMissing;
    return {frame.select_rows(rest), held.with_rows(std::move(rows))};
}

std::vector<double> loocv(const Frame& frame, const FoldFunction<double>& model, unsigned threads) {
    return loocv_map<double>(frame, model, threads);
}

} // namespace ammknn
