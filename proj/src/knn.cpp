#include "ammknn/knn.hpp"

#include "ammknn/error.hpp"
#include "ammknn/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace ammknn {

namespace {

std::vector<std::size_t> feature_indices(const Frame& frame, const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        auto j = frame.find_column(n);
        if (!j) throw Error(ErrorCode::ColumnMismatch, "subject frame lacks feature '" + n + "'");
        idx.push_back(*j);
    }
    return idx;
}

std::vector<double> gather(const Frame::Row& row, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto j : idx) out.push_back(row[j]);
    return out;
}

} // namespace

TrainingSet::TrainingSet(std::vector<std::string> feature_names,
                         std::vector<std::vector<double>> features,
                         std::vector<double> targets)
    : names_(std::move(feature_names)), features_(std::move(features)), targets_(std::move(targets)) {
    if (features_.size() != targets_.size())
        throw Error(ErrorCode::LengthMismatch, "feature rows and targets differ in count");
    for (const auto& row : features_)
        if (row.size() != names_.size())
            throw Error(ErrorCode::DimensionMismatch, "training row width differs from feature count");
}

TrainingSet TrainingSet::from_frame(const Frame& frame) {
    auto names = frame.feature_names();
    const auto idx = feature_indices(frame, names);
    std::vector<std::vector<double>> features;
    std::vector<double> targets;
    features.reserve(frame.num_rows());
    targets.reserve(frame.num_rows());
    for (std::size_t i = 0; i < frame.num_rows(); ++i) {
        const auto& row = frame.row(i);
        auto f = gather(row, idx);
        const double y = row[frame.target_index()];
        if (is_missing(y) || std::any_of(f.begin(), f.end(), [](double v) { return is_missing(v); }))
            throw Error(ErrorCode::MissingValue, "training row " + std::to_string(i) + " has missing cells");
        features.push_back(std::move(f));
        targets.push_back(y);
    }
    return TrainingSet(std::move(names), std::move(features), std::move(targets));
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::LengthMismatch,
                    "vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

NeighborRanking rank_neighbors(std::span<const double> subject,
                               const std::vector<std::vector<double>>& training_features,
                               std::size_t limit) {
    if (training_features.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
    if (limit == 0) throw Error(ErrorCode::InvalidConfig, "neighbor limit must be at least 1");

    NeighborRanking all;
    all.reserve(training_features.size());
    for (std::size_t i = 0; i < training_features.size(); ++i) {
        const auto& row = training_features[i];
        if (row.size() != subject.size())
            throw Error(ErrorCode::DimensionMismatch, "subject has " + std::to_string(subject.size()) +
                                                          " features, training has " + std::to_string(row.size()));
        all.push_back({i, euclidean_distance(subject, row)});
    }

    const auto keep = std::min(limit, all.size());
    auto closer = [](const Neighbor& a, const Neighbor& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.row_index < b.row_index);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), closer);
    all.resize(keep);
    return all;
}

std::vector<double> cumulative_means(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "cumulative means of an empty sequence");
    std::vector<double> out;
    out.reserve(values.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        sum += values[k];
        out.push_back(sum / static_cast<double>(k + 1));
    }
    return out;
}

double knn_regress(std::span<const double> subject, const TrainingSet& training, std::size_t k) {
    if (training.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
    if (k > training.size())
        throw Error(ErrorCode::KTooLarge,
                    "k = " + std::to_string(k) + " exceeds " + std::to_string(training.size()) + " training rows");
    const auto ranking = rank_neighbors(subject, training.features(), k);
    double sum = 0.0;
    for (const auto& n : ranking) sum += training.targets()[n.row_index];
    return sum / static_cast<double>(k);
}

PredictionRecord ammknn_predict_one(std::span<const double> subject,
                                    double subject_outlier_value,
                                    const TrainingSet& training,
                                    const AmmknnConfig& config) {
    if (config.max_k == 0) throw Error(ErrorCode::InvalidConfig, "max_k must be at least 1");

    PredictionRecord rec;
    rec.neighbor_ranking = rank_neighbors(subject, training.features(), config.max_k);

    std::vector<double> ranked_targets;
    ranked_targets.reserve(rec.neighbor_ranking.size());
    for (const auto& n : rec.neighbor_ranking) ranked_targets.push_back(training.targets()[n.row_index]);

    rec.cumulative_means = cumulative_means(ranked_targets);
    rec.min_of_means = *std::min_element(rec.cumulative_means.begin(), rec.cumulative_means.end());
    rec.min_match = *std::min_element(ranked_targets.begin(), ranked_targets.end());
    rec.outlier_value = subject_outlier_value;
    rec.outlier_triggered = subject_outlier_value < config.outlier_cutoff;
    rec.prediction = rec.outlier_triggered ? rec.min_match : rec.min_of_means;
    return rec;
}

std::vector<double> extract_features(const Frame& frame,
                                     std::size_t row,
                                     const std::vector<std::string>& feature_names) {
    return gather(frame.row(row), feature_indices(frame, feature_names));
}

std::vector<PredictionRecord> ammknn_predict_batch(const Frame& subjects,
                                                   const Frame& training,
                                                   const AmmknnConfig& config,
                                                   unsigned threads) {
    const auto train = TrainingSet::from_frame(training);
    if (train.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
    const auto idx = feature_indices(subjects, train.feature_names());

    std::optional<std::size_t> outlier_col;
    if (config.outlier_feature) {
        const auto& names = train.feature_names();
        if (std::find(names.begin(), names.end(), *config.outlier_feature) == names.end())
            throw Error(ErrorCode::UnknownColumn,
                        "outlier feature '" + *config.outlier_feature + "' is not a training feature");
        outlier_col = subjects.column_index(*config.outlier_feature);
    }

    std::vector<PredictionRecord> out(subjects.num_rows());
    parallel_for(subjects.num_rows(), threads, [&](std::size_t i) {
        try {
            const auto& row = subjects.row(i);
            auto x = gather(row, idx);
            if (std::any_of(x.begin(), x.end(), [](double v) { return is_missing(v); }))
                throw Error(ErrorCode::MissingValue, "subject has missing feature cells");
            const double outlier = outlier_col ? row[*outlier_col] : kMissing;
            auto rec = ammknn_predict_one(x, outlier, train, config);
            rec.subject_id = subjects.row_id(i);
            out[i] = std::move(rec);
        } catch (const Error& e) {
            throw e.with_context("subject row " + std::to_string(i));
        }
    });
    return out;
}

} // namespace ammknn
