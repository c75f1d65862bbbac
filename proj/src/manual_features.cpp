#include "hetaug/manual_features.hpp"

#include "hetaug/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hetaug {

namespace {

struct Moments {
    double total = 0, avg = 0, max = 0, var = 0;
};

Moments moments(std::span<const double> xs) {
    Moments m;
    if (xs.empty()) return m;
    const auto n = static_cast<double>(xs.size());
    m.total = std::accumulate(xs.begin(), xs.end(), 0.0);
    m.avg = m.total / n;
    m.max = *std::max_element(xs.begin(), xs.end());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - m.avg) * (x - m.avg);
        m.var = ss / n;
    }
    return m;
}

void set(FeatureVector& x, Feature f, double v) { x[static_cast<std::size_t>(f)] = v; }

} // namespace

double gini(std::span<const double> amounts) {
    for (double a : amounts)
        if (!(a >= 0.0)) throw std::domain_error("gini: amounts must be non-negative");
    if (amounts.empty()) return 0.0;
    std::vector<double> sorted(amounts.begin(), amounts.end());
    std::sort(sorted.begin(), sorted.end());
    const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    if (sum <= 0.0) return 0.0;
    // sum_ij |x_i - x_j| = 2 * sum_i (2i - n + 1) x_(i) over ascending order.
    const auto n = static_cast<double>(sorted.size());
    double weighted = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        weighted += (2.0 * static_cast<double>(i) - n + 1.0) * sorted[i];
    return std::clamp(weighted / (n * sum), 0.0, 1.0 - 1.0 / n);
}

FeatureVector compute_features(const HeterogeneousGraph& g, NodeId account) {
    const auto in_trans = g.adjacency(account, Direction::in, EdgeKind::trans);
    const auto out_trans = g.adjacency(account, Direction::out, EdgeKind::trans);

    std::vector<double> income, expense;
    income.reserve(in_trans.size());
    expense.reserve(out_trans.size());
    for (const auto& e : in_trans) income.push_back(e.value);
    for (const auto& e : out_trans) expense.push_back(e.value);

    const Moments in = moments(income);
    const Moments out = moments(expense);

    FeatureVector x{};
    set(x, Feature::income_total, in.total);
    set(x, Feature::income_avg, in.avg);
    set(x, Feature::income_max, in.max);
    set(x, Feature::income_var, in.var);
    set(x, Feature::expense_total, out.total);
    set(x, Feature::expense_avg, out.avg);
    set(x, Feature::expense_max, out.max);
    set(x, Feature::expense_var, out.var);
    set(x, Feature::expense_income_ratio, in.total > 0 ? out.total / in.total : 0.0);
    set(x, Feature::balance, in.total - out.total);
    set(x, Feature::n_sent, static_cast<double>(expense.size()));
    set(x, Feature::n_received, static_cast<double>(income.size()));
    set(x, Feature::gini_invest, gini(income));
    set(x, Feature::gini_return, gini(expense));

    std::int64_t first = std::numeric_limits<std::int64_t>::max();
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    std::size_t incident = 0;
    for (auto dir : {Direction::in, Direction::out}) {
        for (auto kind : {EdgeKind::trans, EdgeKind::call}) {
            const auto adj = g.adjacency(account, dir, kind);
            if (adj.empty()) continue;
            incident += adj.size();
            first = std::min(first, adj.front().timestamp);
            last = std::max(last, adj.back().timestamp);
        }
    }
    set(x, Feature::lifecycle, incident >= 2 ? static_cast<double>(last - first) : 0.0);
    return x;
}

FeatureVector compute_features(const HeterogeneousGraph& g, std::string_view account) {
    return compute_features(g, g.id_of(account));
}

FeatureMatrix feature_matrix(const HeterogeneousGraph& g, std::span<const NodeId> accounts,
                             unsigned threads) {
    std::vector<FeatureVector> rows(accounts.size());
    parallel_for(accounts.size(), threads,
                 [&](std::size_t i) { rows[i] = compute_features(g, accounts[i]); });
    FeatureMatrix m(kNumManualFeatures);
    for (std::size_t i = 0; i < accounts.size(); ++i) m.append(accounts[i], rows[i]);
    return m;
}

} // namespace hetaug
