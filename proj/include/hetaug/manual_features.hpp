#pragma once

#include "hetaug/feature_matrix.hpp"
#include "hetaug/graph_store.hpp"

#include <array>
#include <span>

namespace hetaug {

inline constexpr std::size_t kNumManualFeatures = 15;

// Fixed column order of the manual feature vector.
enum class Feature : std::size_t {
    income_total,
    income_avg,
    income_max,
    income_var,
    expense_total,
    expense_avg,
    expense_max,
    expense_var,
    expense_income_ratio,
    balance,
    n_sent,
    n_received,
    gini_invest,
    gini_return,
    lifecycle,
};

using FeatureVector = std::array<double, kNumManualFeatures>;

inline double get(const FeatureVector& x, Feature f) { return x[static_cast<std::size_t>(f)]; }

/// Mean-absolute-difference Gini coefficient,
/// sum_ij |x_i - x_j| / (2 n^2 mean). Returns 0 for empty input or zero mean.
/// Throws std::domain_error on negative amounts.
double gini(std::span<const double> amounts);

/// Per-account transaction statistics. Monetary features and the send/receive
/// counts use trans edges only; lifecycle spans all incident edges of either
/// kind. Variances are population variances. Throws NotFoundError.
FeatureVector compute_features(const HeterogeneousGraph& g, NodeId account);
FeatureVector compute_features(const HeterogeneousGraph& g, std::string_view account);

/// Row i holds the features of accounts[i]. `threads` = 0 uses hardware concurrency.
FeatureMatrix feature_matrix(const HeterogeneousGraph& g, std::span<const NodeId> accounts,
                             unsigned threads = 1);

} // namespace hetaug
