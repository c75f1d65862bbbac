#pragma once

#include "hetaug/feature_matrix.hpp"
#include "hetaug/graph_store.hpp"
#include "hetaug/metapath.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hetaug {

// Top-K keeps the highest-omega supers of each group; ties go to the
// canonically smaller node sequence.
struct TopKConfig {
    double k_percent = 10.0;  // in (0, 100]

    void validate() const;
};

// ceil(k% of group_size), at least 1 for a non-empty group.
std::size_t retained_count(double k_percent, std::size_t group_size);

// Groups by refined class when use_refinement is set, otherwise by coarse
// pattern. The result keeps the input order and omega values.
std::vector<SuperMetapath> top_k_filter(std::span<const SuperMetapath> supers, const TopKConfig& cfg,
                                        bool use_refinement);

struct NormalizedSuper {
    SuperMetapath super;
    double omega_hat = 0.0;
};

// Supers of `pattern` only, grouped by head account; each omega is divided by
// its group's total so every group sums to one.
std::vector<NormalizedSuper> normalize(std::span<const SuperMetapath> retained, Pattern pattern);

// Row per CA of g (ascending id): sum over the supers targeting that CA of
// omega_hat times the summed base features of every node on the path, the
// target included. CAs with no super get a zero row. Throws ConfigError when a
// path node has no base row.
FeatureMatrix aggregate(const HeterogeneousGraph& g, std::span<const NormalizedSuper> normalized,
                        const FeatureMatrix& base, Pattern pattern);

struct AugmentedFeatures {
    std::optional<FeatureMatrix> p1;
    std::optional<FeatureMatrix> p2;
};

enum class CombineMode : std::uint8_t { replace, sum, concat };
enum class PatternSet : std::uint8_t { p1, p2, p1p2 };

std::string_view to_string(CombineMode m);
std::string_view to_string(PatternSet p);
CombineMode parse_combine_mode(std::string_view text);
PatternSet parse_pattern_set(std::string_view text);

inline bool includes(PatternSet set, Pattern p) {
    return set == PatternSet::p1p2 || (set == PatternSet::p1) == (p == Pattern::p1);
}

// Output rows follow `base`. Accounts without an augmented row (EOAs) get a
// zero augmentation: zeros under replace, their base row under sum, and the
// base row padded with zeros under concat. concat with both patterns keeps
// them side by side; replace and sum add them.
FeatureMatrix combine(const FeatureMatrix& base, const AugmentedFeatures& aug, CombineMode mode,
                      PatternSet patterns);

} // namespace hetaug
