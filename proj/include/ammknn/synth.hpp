#pragma once

#include "ammknn/frame.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ammknn {

/// Parameters of the synthetic cohort generator.
///
/// Each row draws a latent ability a ~ N(0, 1). The first `signal_features`
/// columns are noisy readings of a, the rest are independent noise. The
/// target is an affine map of a, rounded to whole points and clipped to
/// [target_low, target_high]; its intercept is chosen so that a fraction of
/// about `fail_rate_hint` lands below `pass_mark`.
struct SynthSpec {
    std::uint64_t seed = 7;
    std::size_t n_rows = 224;
    std::size_t n_features = 20;
    std::size_t signal_features = 12;
    double noise_sd = 1.0;
    double target_low = 200.0;
    double target_high = 800.0;
    double fail_rate_hint = 0.07;
    double pass_mark = 350.0;
    double first_cohort_year = 2015.0;
    /// Rows per consecutive cohort year; empty puts every row in the first
    /// year. Must sum to n_rows when given.
    std::vector<std::size_t> cohort_sizes;

    /// Throws InvalidSpec.
    void validate() const;
};

/// Columns: id (text), cohort, f01..fNN, score. Deterministic in `spec`.
Frame generate_cohort(const SynthSpec& spec);

/// Deterministic random partition into (train, validation); each part keeps
/// the input row order. Throws InvalidFraction unless both parts are
/// non-empty.
std::pair<Frame, Frame> split_cohorts(const Frame& frame, double train_fraction, std::uint64_t seed);

} // namespace ammknn
