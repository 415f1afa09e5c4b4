#pragma once

#include "ammknn/frame.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ammknn {

/// Training rows split into a feature matrix and a target vector.
/// Feature order follows Frame::feature_names().
class TrainingSet {
public:
    TrainingSet(std::vector<std::string> feature_names,
                std::vector<std::vector<double>> features,
                std::vector<double> targets);

    /// Throws MissingValue if any feature or target cell is missing.
    static TrainingSet from_frame(const Frame& frame);

    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    const std::vector<std::vector<double>>& features() const noexcept { return features_; }
    const std::vector<double>& targets() const noexcept { return targets_; }
    std::size_t size() const noexcept { return targets_.size(); }
    std::size_t dims() const noexcept { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> features_;
    std::vector<double> targets_;
};

struct Neighbor {
    std::size_t row_index = 0;
    double distance = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// Nearest first; equal distances ordered by ascending row index.
using NeighborRanking = std::vector<Neighbor>;

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// The min(limit, n) training rows closest to `subject`.
NeighborRanking rank_neighbors(std::span<const double> subject,
                               const std::vector<std::vector<double>>& training_features,
                               std::size_t limit);

/// out[k-1] = mean(values[0..k)).
std::vector<double> cumulative_means(std::span<const double> values);

/// Fixed-k KNN regression: mean target of the k nearest rows.
double knn_regress(std::span<const double> subject, const TrainingSet& training, std::size_t k);

struct AmmknnConfig {
    std::size_t max_k = 20;
    /// Feature whose standardized value triggers the minimum-match fallback.
    /// Without one, the fallback never fires.
    std::optional<std::string> outlier_feature;
    double outlier_cutoff = -2.0;
};

struct PredictionRecord {
    std::optional<std::string> subject_id;
    NeighborRanking neighbor_ranking;
    std::vector<double> cumulative_means;
    double min_of_means = 0.0;
    double min_match = 0.0;
    double outlier_value = kMissing;
    bool outlier_triggered = false;
    double prediction = 0.0;
};

/// Adaptive minimum-match prediction for one subject.
///
/// The neighbor ranking is truncated at max_k (or the training size). The
/// prediction is the smallest prefix mean of the ranked targets, unless
/// `subject_outlier_value` is strictly below the configured cutoff, in which
/// case it is the smallest single target in the ranking. A missing
/// outlier value never triggers the fallback.
PredictionRecord ammknn_predict_one(std::span<const double> subject,
                                    double subject_outlier_value,
                                    const TrainingSet& training,
                                    const AmmknnConfig& config);

/// One record per subject row, in row order. Subjects must carry every
/// training feature; other columns (including the target) are ignored.
std::vector<PredictionRecord> ammknn_predict_batch(const Frame& subjects,
                                                   const Frame& training,
                                                   const AmmknnConfig& config,
                                                   unsigned threads = 1);

/// Feature cells of `frame` row `row`, in `feature_names` order.
std::vector<double> extract_features(const Frame& frame,
                                     std::size_t row,
                                     const std::vector<std::string>& feature_names);

} // namespace ammknn
