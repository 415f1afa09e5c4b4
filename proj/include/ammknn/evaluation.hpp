#pragma once

#include "ammknn/frame.hpp"
#include "ammknn/parallel.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ammknn {

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Score bands for the three-tier ("traffic signal") classification:
/// fail below `fail_below`, at risk on [fail_below, at_risk_upper], pass above.
struct TierBoundaries {
    double fail_below = 350.0;
    double at_risk_upper = 375.0;

    /// Throws InvalidConfig unless fail_below < at_risk_upper, both in [200, 800].
    void validate() const;
    bool operator==(const TierBoundaries&) const = default;
};

enum class Outcome { Fail, Pass };
enum class Tier { Fail = 0, AtRisk = 1, Pass = 2 };

std::string_view to_string(Outcome o) noexcept;
std::string_view to_string(Tier t) noexcept;

/// Pass iff score >= pass_at.
Outcome classify_binary(double score, double pass_at);
Tier classify_tier(double score, const TierBoundaries& bounds);

// ---------------------------------------------------------------------------
// Confusion matrices
// ---------------------------------------------------------------------------

/// Binary cross-tabulation. "Positive" means an actual (or predicted) fail.
struct ConfusionMatrix2 {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix2&) const = default;
};

/// counts[actual][predicted], indexed by Tier.
struct ConfusionMatrix3 {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t& at(Tier actual, Tier predicted) {
        return counts[static_cast<std::size_t>(actual)][static_cast<std::size_t>(predicted)];
    }
    std::size_t at(Tier actual, Tier predicted) const {
        return counts[static_cast<std::size_t>(actual)][static_cast<std::size_t>(predicted)];
    }
    std::size_t total() const noexcept;
    std::size_t trace() const noexcept;
    std::size_t actual_count(Tier t) const noexcept;
    std::size_t predicted_count(Tier t) const noexcept;
    bool operator==(const ConfusionMatrix3&) const = default;
};

ConfusionMatrix2 confusion_2x2(std::span<const double> actual, std::span<const double> predicted, double pass_at);

/// Actual and predicted axes may use different boundaries.
ConfusionMatrix3 confusion_3x3(std::span<const double> actual,
                               std::span<const double> predicted,
                               const TierBoundaries& actual_bounds,
                               const TierBoundaries& predicted_bounds);

/// Sensitivity and specificity are nullopt ("undefined") when their
/// denominator is zero.
struct Metrics {
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};

/// Throws EmptyMatrix for a matrix with no subjects.
Metrics metrics_from_cm(const ConfusionMatrix2& cm);

/// Trace over total. Throws EmptyMatrix.
double accuracy_3x3(const ConfusionMatrix3& cm);

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

inline const std::vector<double> kDefaultSweepCutoffs = {349.0, 390.0, 400.0, 410.0, 420.0};

struct SweepRow {
    double cutoff = 0.0;
    ConfusionMatrix2 matrix;
    std::optional<Metrics> metrics; ///< nullopt for an empty evaluation
};

/// For each cutoff c a subject is predicted to pass iff predicted > c.
/// Actual outcomes always use `pass_at` (actual >= pass_at passes).
std::vector<SweepRow> threshold_sweep(std::span<const double> actual,
                                      std::span<const double> predicted,
                                      const std::vector<double>& cutoffs,
                                      double pass_at = 350.0);

/// True iff tp never decreases as the cutoff rises. Throws UnsortedCutoffs
/// when the rows are not in ascending cutoff order.
bool sweep_sensitivity_monotone_check(const std::vector<SweepRow>& sweep);

// ---------------------------------------------------------------------------
// Leave-one-out cross-validation
// ---------------------------------------------------------------------------

/// Fold training frame (all other rows) plus the held-out row. Returns the
/// per-fold result.
template <typename T>
using FoldFunction = std::function<T(const Frame& training, const Frame& held_out)>;

/// Build fold `i`: the training frame without row i, and row i alone with
/// its target cell blanked so the model cannot read it.
std::pair<Frame, Frame> loocv_fold(const Frame& frame, std::size_t i);

/// Generic fold loop; results are in row order for any thread count.
/// Errors are rethrown tagged with their fold index.
template <typename T>
std::vector<T> loocv_map(const Frame& frame, const FoldFunction<T>& fn, unsigned threads = 1);

/// One out-of-fold score per row.
std::vector<double> loocv(const Frame& frame, const FoldFunction<double>& model, unsigned threads = 1);

} // namespace ammknn

#include "ammknn/detail/loocv_impl.hpp"
