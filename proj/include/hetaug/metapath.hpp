#pragma once

// Time-aware metapath counting over the heterogeneous graph.
//
// Two coarse patterns are supported, typed at every position:
//
//   P1: EOA --call@t1--> CA* --trans@t2--> EOA
//   P2: EOA --call@t1--> CA* --call@t2--> CA --trans@t3--> EOA
//
// Instances sharing a node sequence are merged into one SuperMetapath whose
// omega is the instance count. In time-aware mode only instances with
// strictly increasing timestamps count; in timeless mode every combination
// of edges does. Counts are computed from sorted timestamp lists and prefix
// counts, never by listing instances.

#include "hetaug/graph_store.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace hetaug {

enum class Pattern : std::uint8_t { p1 = 0, p2 = 1 };
enum class RefinedClass : std::uint8_t { p11 = 0, p12, p21, p22, p23, p24 };
enum class TimeMode : std::uint8_t { time_aware, timeless };

inline constexpr std::size_t kNumRefinedClasses = 6;

std::string_view to_string(Pattern p);
std::string_view to_string(RefinedClass c);
std::string_view to_string(TimeMode m);
TimeMode parse_time_mode(std::string_view text);

inline Pattern pattern_of(RefinedClass c) {
    return c <= RefinedClass::p12 ? Pattern::p1 : Pattern::p2;
}

std::span<const EdgeKind> relation_sequence(Pattern p);

struct SuperMetapath {
    Pattern pattern = Pattern::p1;
    RefinedClass refined_class = RefinedClass::p11;
    // nodes[3] is kNoNode for P1.
    std::array<NodeId, 4> nodes{kNoNode, kNoNode, kNoNode, kNoNode};
    std::uint64_t omega = 0;

    std::size_t length() const { return pattern == Pattern::p1 ? 3 : 4; }
    std::span<const NodeId> node_sequence() const { return {nodes.data(), length()}; }
    NodeId head() const { return nodes[0]; }
    NodeId target() const { return nodes[1]; }
    NodeId tail() const { return nodes[length() - 1]; }

    bool operator==(const SuperMetapath&) const = default;
};

// Canonical order: pattern, then node sequence lexicographically.
bool canonical_less(const SuperMetapath& a, const SuperMetapath& b);

// Head/tail identity and contract self-call decide the refined class.
RefinedClass refine(const SuperMetapath& sm);

// #{(i, j) : a[i] < b[j]} for ascending a and b. Linear merge.
std::uint64_t count_increasing_pairs(std::span<const std::int64_t> a,
                                     std::span<const std::int64_t> b);

// #{(i, j, k) : a[i] < mid[j] < c[k]} for ascending inputs.
std::uint64_t count_increasing_triples(std::span<const std::int64_t> a,
                                       std::span<const std::int64_t> mid,
                                       std::span<const std::int64_t> c);

// Results are canonically sorted and independent of `threads` (0 = all cores).
std::vector<SuperMetapath> enumerate_p1(const HeterogeneousGraph& g, TimeMode mode,
                                        unsigned threads = 1);
std::vector<SuperMetapath> enumerate_p2(const HeterogeneousGraph& g, TimeMode mode,
                                        unsigned threads = 1);
std::vector<SuperMetapath> enumerate(const HeterogeneousGraph& g, Pattern pattern, TimeMode mode,
                                     unsigned threads = 1);

// Reference implementation for tests: lists every instance with nested loops
// over the raw edge list and groups them by node sequence. Cubic in the
// number of edges for P2; keep inputs small.
std::vector<SuperMetapath> brute_force_supers(const HeterogeneousGraph& g, Pattern pattern,
                                              TimeMode mode);

struct MetapathStats {
    std::array<std::uint64_t, kNumRefinedClasses> omega_sum{};
    std::array<std::uint64_t, kNumRefinedClasses> super_count{};

    std::uint64_t omega(RefinedClass c) const { return omega_sum[static_cast<std::size_t>(c)]; }
    std::uint64_t supers(RefinedClass c) const { return super_count[static_cast<std::size_t>(c)]; }
    std::uint64_t omega_total(Pattern p) const;
    std::uint64_t super_total(Pattern p) const;

    bool operator==(const MetapathStats&) const = default;
};

MetapathStats metapath_stats(std::span<const SuperMetapath> supers);

// `pattern,refined_class,node_sequence,omega` with `|`-joined account ids.
void write_super_dump(std::ostream& out, std::span<const SuperMetapath> supers,
                      const HeterogeneousGraph& g);

// Instance totals per refined class with a Sum column, one row per coarse
// pattern, followed by the matching super-metapath counts.
void write_metapath_stats_csv(std::ostream& out, const MetapathStats& stats);

} // namespace hetaug
