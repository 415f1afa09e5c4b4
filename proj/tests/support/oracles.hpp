#pragma once

// Independent reference implementations used only by tests. They share no
// code with the library so that agreement is meaningful.

#include "ammknn/frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Sorted (distance, index) pairs by a full stable sort of all rows.
inline std::vector<std::size_t> brute_ranking(const std::vector<double>& subject,
                                              const std::vector<std::vector<double>>& rows) {
    std::vector<double> dist(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double ss = 0.0;
        for (std::size_t j = 0; j < subject.size(); ++j) ss += (subject[j] - rows[i][j]) * (subject[j] - rows[i][j]);
        dist[i] = std::sqrt(ss);
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    return order;
}

/// min over k = 1..min(max_k, n) of the mean of the k nearest targets.
inline double min_prefix_mean(const std::vector<double>& subject,
                              const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& targets,
                              std::size_t max_k) {
    const auto order = brute_ranking(subject, rows);
    const std::size_t kmax = std::min(max_k, rows.size());
    double best = INFINITY;
    for (std::size_t k = 1; k <= kmax; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < k; ++r) s += targets[order[r]];
        best = std::min(best, s / static_cast<double>(k));
    }
    return best;
}

inline double mean(const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    return static_cast<double>(s / v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = mean(v);
    long double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(static_cast<double>(ss / (v.size() - 1)));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean(x), my = mean(y);
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// Orthonormal, zero-mean basis vectors of length n (Gram-Schmidt against
/// the constant vector and each other).
inline std::vector<std::vector<double>> centered_orthonormal(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> basis;
    std::vector<double> ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    basis.push_back(ones);
    while (basis.size() < count + 1) {
        std::vector<double> v(n);
        for (auto& x : v) x = normal(rng);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                double dot = 0;
                for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
            }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (auto& x : v) x /= norm;
        basis.push_back(std::move(v));
    }
    basis.erase(basis.begin());
    return basis;
}

/// Frame whose feature columns have exactly the requested Pearson
/// correlations with the target (up to rounding). The target is
/// 400 + 50 * e0; feature j is r_j * e0 + sqrt(1 - r_j^2) * e_{j+1}.
inline ammknn::Frame designed_correlation_frame(const std::vector<std::string>& labels,
                                                const std::vector<double>& correlations,
                                                const std::string& target,
                                                std::size_t n,
                                                std::uint64_t seed = 1) {
    const auto basis = centered_orthonormal(n, labels.size() + 1, seed);
    std::vector<std::string> names = labels;
    names.push_back(target);
    std::vector<ammknn::Frame::Row> rows(n, ammknn::Frame::Row(names.size()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            const double r = correlations[j];
            rows[i][j] = 10.0 * (r * basis[0][i] + std::sqrt(1.0 - r * r) * basis[j + 1][i]);
        }
        rows[i][labels.size()] = 400.0 + 50.0 * std::sqrt(static_cast<double>(n)) * basis[0][i];
    }
    return ammknn::Frame(names, rows, target);
}

} // namespace oracle
