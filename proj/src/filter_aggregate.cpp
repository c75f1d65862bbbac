#include "hetaug/filter_aggregate.hpp"

#include "hetaug/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace hetaug {

void TopKConfig::validate() const {
    if (!(k_percent > 0.0 && k_percent <= 100.0))
        throw ConfigError("k_percent must be in (0, 100], got " + std::to_string(k_percent));
}

std::size_t retained_count(double k_percent, std::size_t group_size) {
    if (group_size == 0) return 0;
    // The epsilon keeps exact products such as 7% of 100 from rounding up.
    const double raw = k_percent * static_cast<double>(group_size) / 100.0;
    const auto keep = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::clamp<std::size_t>(keep, 1, group_size);
}

std::vector<SuperMetapath> top_k_filter(std::span<const SuperMetapath> supers, const TopKConfig& cfg,
                                        bool use_refinement) {
    cfg.validate();
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < supers.size(); ++i) {
        const int key = use_refinement ? static_cast<int>(supers[i].refined_class)
                                       : static_cast<int>(supers[i].pattern);
        groups[key].push_back(i);
    }

    std::vector<char> keep(supers.size(), 0);
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (supers[a].omega != supers[b].omega) return supers[a].omega > supers[b].omega;
            return canonical_less(supers[a], supers[b]);
        });
        const std::size_t n = retained_count(cfg.k_percent, members.size());
        for (std::size_t j = 0; j < n; ++j) keep[members[j]] = 1;
    }

    std::vector<SuperMetapath> out;
    for (std::size_t i = 0; i < supers.size(); ++i)
        if (keep[i]) out.push_back(supers[i]);
    return out;
}

std::vector<NormalizedSuper> normalize(std::span<const SuperMetapath> retained, Pattern pattern) {
    std::map<NodeId, long double> totals;
    for (const auto& sm : retained)
        if (sm.pattern == pattern) totals[sm.head()] += static_cast<long double>(sm.omega);

    std::vector<NormalizedSuper> out;
    for (const auto& sm : retained) {
        if (sm.pattern != pattern) continue;
        const long double total = totals[sm.head()];
        out.push_back({sm, static_cast<double>(static_cast<long double>(sm.omega) / total)});
    }
    return out;
}

FeatureMatrix aggregate(const HeterogeneousGraph& g, std::span<const NormalizedSuper> normalized,
                        const FeatureMatrix& base, Pattern pattern) {
    const auto cas = g.nodes_of_type(NodeType::ca);
    FeatureMatrix out(base.cols());
    std::vector<std::size_t> row_of(g.num_nodes(), static_cast<std::size_t>(-1));
    for (NodeId ca : cas) row_of[ca] = out.append(ca);

    std::vector<double> path_sum(base.cols());
    for (const auto& ns : normalized) {
        const auto& sm = ns.super;
        if (sm.pattern != pattern) continue;
        std::fill(path_sum.begin(), path_sum.end(), 0.0);
        for (NodeId v : sm.node_sequence()) {
            const auto r = base.find(v);
            if (!r) throw ConfigError("no base feature row for account '" + g.name(v) + "'");
            const auto x = base.row(*r);
            for (std::size_t c = 0; c < x.size(); ++c) path_sum[c] += x[c];
        }
        const std::size_t target = row_of.at(sm.target());
        if (target == static_cast<std::size_t>(-1))
            throw ConfigError("metapath target '" + g.name(sm.target()) + "' is not a contract account");
        auto dst = out.row(target);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += ns.omega_hat * path_sum[c];
    }
    return out;
}

std::string_view to_string(CombineMode m) {
    switch (m) {
    case CombineMode::replace: return "replace";
    case CombineMode::sum: return "sum";
    case CombineMode::concat: return "concat";
    }
    return "?";
}

std::string_view to_string(PatternSet p) {
    switch (p) {
    case PatternSet::p1: return "p1";
    case PatternSet::p2: return "p2";
    case PatternSet::p1p2: return "p1p2";
    }
    return "?";
}

CombineMode parse_combine_mode(std::string_view text) {
    if (text == "replace") return CombineMode::replace;
    if (text == "sum") return CombineMode::sum;
    if (text == "concat") return CombineMode::concat;
    throw ConfigError("unknown combine mode '" + std::string(text) + "'");
}

PatternSet parse_pattern_set(std::string_view text) {
    if (text == "p1" || text == "P1") return PatternSet::p1;
    if (text == "p2" || text == "P2") return PatternSet::p2;
    if (text == "p1p2" || text == "P1+P2" || text == "p1+p2") return PatternSet::p1p2;
    throw ConfigError("unknown pattern '" + std::string(text) + "'");
}

FeatureMatrix combine(const FeatureMatrix& base, const AugmentedFeatures& aug, CombineMode mode,
                      PatternSet patterns) {
    std::vector<const FeatureMatrix*> parts;
    for (Pattern p : {Pattern::p1, Pattern::p2}) {
        if (!includes(patterns, p)) continue;
        const auto& m = p == Pattern::p1 ? aug.p1 : aug.p2;
        if (!m) throw ConfigError("no augmented features for pattern " + std::string(to_string(p)));
        if (m->cols() != base.cols())
            throw ConfigError("dimension mismatch: base has " + std::to_string(base.cols()) +
                              " columns, augmentation has " + std::to_string(m->cols()));
        parts.push_back(&*m);
    }

    const std::size_t d = base.cols();
    const std::size_t out_cols = mode == CombineMode::concat ? d * (1 + parts.size()) : d;
    FeatureMatrix out(out_cols);
    std::vector<double> row(out_cols);
    for (std::size_t r = 0; r < base.rows(); ++r) {
        const NodeId v = base.id(r);
        const auto x = base.row(r);
        std::fill(row.begin(), row.end(), 0.0);
        if (mode != CombineMode::replace) std::copy(x.begin(), x.end(), row.begin());
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const auto ar = parts[p]->find(v);
            if (!ar) continue;
            const auto xh = parts[p]->row(*ar);
            const std::size_t offset = mode == CombineMode::concat ? d * (p + 1) : 0;
            for (std::size_t c = 0; c < d; ++c) row[offset + c] += xh[c];
        }
        out.append(v, row);
    }
    return out;
}

} // namespace hetaug
