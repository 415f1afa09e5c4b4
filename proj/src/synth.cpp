#include "ammknn/synth.hpp"

#include "ammknn/error.hpp"
#include "ammknn/random.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

namespace ammknn {

namespace {

// Raw feature scale: a grade-like percentage around 80 with sd 6.
constexpr double kFeatureCenter = 80.0;
constexpr double kFeatureScale = 6.0;

// Dividing the rounded integer gives the double nearest to the two-decimal
// value, so it prints back as exactly two decimals.
double round_cents(double v) {
    return std::round(v * 100.0) / 100.0;
}

std::string padded(const char* prefix, std::size_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, value);
    return buf;
}

} // namespace

void SynthSpec::validate() const {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
    if (n_rows == 0) fail("n_rows must be positive");
    if (n_features == 0) fail("n_features must be positive");
    if (signal_features < 1 || signal_features > n_features) fail("signal_features must be in [1, n_features]");
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) fail("noise_sd must be positive");
    if (!(target_low < target_high)) fail("target_range low must be below high");
    if (!(fail_rate_hint > 0.0 && fail_rate_hint < 1.0)) fail("fail_rate_hint must be in (0, 1)");
    if (!(pass_mark > target_low && pass_mark < target_high)) fail("pass_mark must lie inside target_range");
    if (!cohort_sizes.empty() &&
        std::accumulate(cohort_sizes.begin(), cohort_sizes.end(), std::size_t{0}) != n_rows)
        fail("cohort_sizes must sum to n_rows");
}

Frame generate_cohort(const SynthSpec& spec) {
    spec.validate();

    const double spread = (spec.target_high - spec.target_low) / 10.0;
    const double z_fail = boost::math::quantile(boost::math::normal(), spec.fail_rate_hint);
    const double intercept = spec.pass_mark - spread * z_fail;
    const double signal_norm = std::sqrt(1.0 + spec.noise_sd * spec.noise_sd);

    const int width = spec.n_features >= 100 ? 3 : 2;
    std::vector<std::string> columns{"cohort"};
    for (std::size_t j = 1; j <= spec.n_features; ++j) columns.push_back(padded("f", j, width));
    columns.push_back("score");

    std::vector<double> years;
    years.reserve(spec.n_rows);
    if (spec.cohort_sizes.empty()) {
        years.assign(spec.n_rows, spec.first_cohort_year);
    } else {
        for (std::size_t c = 0; c < spec.cohort_sizes.size(); ++c)
            years.insert(years.end(), spec.cohort_sizes[c], spec.first_cohort_year + static_cast<double>(c));
    }

    Xoshiro256 rng(spec.seed);
    std::vector<Frame::Row> rows;
    std::vector<std::string> ids;
    rows.reserve(spec.n_rows);
    for (std::size_t i = 0; i < spec.n_rows; ++i) {
        Frame::Row row;
        row.reserve(columns.size());
        row.push_back(years[i]);

        const double ability = rng.normal();
        for (std::size_t j = 0; j < spec.n_features; ++j) {
            const double e = rng.normal();
            const double z = j < spec.signal_features ? (ability + spec.noise_sd * e) / signal_norm : e;
            row.push_back(round_cents(kFeatureCenter + kFeatureScale * z));
        }

        const double score = std::round(intercept + spread * ability);
        row.push_back(std::clamp(score, spec.target_low, spec.target_high));

        rows.push_back(std::move(row));
        ids.push_back(padded("S", i + 1, 4));
    }

    return Frame(std::move(columns), std::move(rows), "score", IdColumn{"id", 0, std::move(ids)});
}

std::pair<Frame, Frame> split_cohorts(const Frame& frame, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorCode::InvalidFraction, "train_fraction must be in (0, 1)");
    const auto n = frame.num_rows();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n)
        throw Error(ErrorCode::InvalidFraction,
                    "fraction leaves an empty part (" + std::to_string(n_train) + " of " + std::to_string(n) + ")");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Xoshiro256 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> valid(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train.begin(), train.end());
    std::sort(valid.begin(), valid.end());
    return {frame.select_rows(train), frame.select_rows(valid)};
}

} // namespace ammknn
