#include "hetaug/metapath.hpp"

#include "hetaug/parallel.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hetaug {

namespace {

constexpr std::array<EdgeKind, 2> kP1Relations{EdgeKind::call, EdgeKind::trans};
constexpr std::array<EdgeKind, 3> kP2Relations{EdgeKind::call, EdgeKind::call, EdgeKind::trans};

// Timestamps of one node's edges, bucketed by the peer at the other end.
// Peers ascend; each bucket's timestamps ascend.
struct PeerTimes {
    std::vector<NodeId> peers;
    std::vector<std::size_t> offsets{0};
    std::vector<std::int64_t> times;

    std::size_t size() const { return peers.size(); }
    std::span<const std::int64_t> at(std::size_t i) const {
        return std::span<const std::int64_t>(times).subspan(offsets[i], offsets[i + 1] - offsets[i]);
    }
};

template <typename Keep>
PeerTimes group_by_peer(std::span<const TemporalEdge> adj, Direction dir, Keep keep) {
    std::vector<std::pair<NodeId, std::int64_t>> items;
    items.reserve(adj.size());
    for (const auto& e : adj) {
        const NodeId peer = dir == Direction::in ? e.src : e.dst;
        if (keep(peer)) items.emplace_back(peer, e.timestamp);
    }
    std::sort(items.begin(), items.end());
    PeerTimes out;
    out.times.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i == 0 || items[i].first != items[i - 1].first) {
            if (i) out.offsets.push_back(out.times.size());
            out.peers.push_back(items[i].first);
        }
        out.times.push_back(items[i].second);
    }
    if (!items.empty()) out.offsets.push_back(out.times.size());
    return out;
}

PeerTimes eoa_callers(const HeterogeneousGraph& g, NodeId ca) {
    return group_by_peer(g.adjacency(ca, Direction::in, EdgeKind::call), Direction::in,
                         [&](NodeId v) { return g.is_eoa(v); });
}

PeerTimes eoa_payees(const HeterogeneousGraph& g, NodeId ca) {
    return group_by_peer(g.adjacency(ca, Direction::out, EdgeKind::trans), Direction::out,
                         [&](NodeId v) { return g.is_eoa(v); });
}

PeerTimes ca_callees(const HeterogeneousGraph& g, NodeId ca) {
    return group_by_peer(g.adjacency(ca, Direction::out, EdgeKind::call), Direction::out,
                         [&](NodeId v) { return g.is_ca(v); });
}

void supers_p1_for(const HeterogeneousGraph& g, NodeId ca, TimeMode mode,
                   std::vector<SuperMetapath>& out) {
    const PeerTimes callers = eoa_callers(g, ca);
    if (callers.size() == 0) return;
    const PeerTimes payees = eoa_payees(g, ca);
    for (std::size_t i = 0; i < callers.size(); ++i) {
        const auto t1 = callers.at(i);
        for (std::size_t j = 0; j < payees.size(); ++j) {
            const auto t2 = payees.at(j);
            const std::uint64_t omega = mode == TimeMode::timeless
                                            ? std::uint64_t{t1.size()} * t2.size()
                                            : count_increasing_pairs(t1, t2);
            if (omega == 0) continue;
            SuperMetapath sm;
            sm.pattern = Pattern::p1;
            sm.nodes = {callers.peers[i], ca, payees.peers[j], kNoNode};
            sm.omega = omega;
            sm.refined_class = refine(sm);
            out.push_back(sm);
        }
    }
}

void supers_p2_for(const HeterogeneousGraph& g, NodeId ca, TimeMode mode,
                   std::vector<SuperMetapath>& out) {
    const PeerTimes callers = eoa_callers(g, ca);
    if (callers.size() == 0) return;
    const PeerTimes callees = ca_callees(g, ca);

    // before[i][j] = #(caller i's call times < mid[j]); after likewise for payees.
    std::vector<std::uint64_t> before, after;
    for (std::size_t c = 0; c < callees.size(); ++c) {
        const NodeId next = callees.peers[c];
        const auto mid = callees.at(c);
        const PeerTimes payees = eoa_payees(g, next);
        if (payees.size() == 0) continue;

        if (mode == TimeMode::time_aware) {
            const std::size_t m = mid.size();
            before.assign(callers.size() * m, 0);
            after.assign(payees.size() * m, 0);
            for (std::size_t i = 0; i < callers.size(); ++i) {
                const auto t1 = callers.at(i);
                std::size_t p = 0;
                for (std::size_t j = 0; j < m; ++j) {
                    while (p < t1.size() && t1[p] < mid[j]) ++p;
                    before[i * m + j] = p;
                }
            }
            for (std::size_t k = 0; k < payees.size(); ++k) {
                const auto t3 = payees.at(k);
                std::size_t p = 0;
                for (std::size_t j = 0; j < m; ++j) {
                    while (p < t3.size() && t3[p] <= mid[j]) ++p;
                    after[k * m + j] = t3.size() - p;
                }
            }
            for (std::size_t i = 0; i < callers.size(); ++i) {
                for (std::size_t k = 0; k < payees.size(); ++k) {
                    std::uint64_t omega = 0;
                    for (std::size_t j = 0; j < m; ++j) omega += before[i * m + j] * after[k * m + j];
                    if (omega == 0) continue;
                    SuperMetapath sm;
                    sm.pattern = Pattern::p2;
                    sm.nodes = {callers.peers[i], ca, next, payees.peers[k]};
                    sm.omega = omega;
                    sm.refined_class = refine(sm);
                    out.push_back(sm);
                }
            }
        } else {
            for (std::size_t i = 0; i < callers.size(); ++i) {
                for (std::size_t k = 0; k < payees.size(); ++k) {
                    SuperMetapath sm;
                    sm.pattern = Pattern::p2;
                    sm.nodes = {callers.peers[i], ca, next, payees.peers[k]};
                    sm.omega = std::uint64_t{callers.at(i).size()} * mid.size() * payees.at(k).size();
                    sm.refined_class = refine(sm);
                    out.push_back(sm);
                }
            }
        }
    }
}

template <typename PerCa>
std::vector<SuperMetapath> enumerate_by_ca(const HeterogeneousGraph& g, TimeMode mode,
                                           unsigned threads, PerCa per_ca) {
    const auto cas = g.nodes_of_type(NodeType::ca);
    std::vector<std::vector<SuperMetapath>> parts(cas.size());
    parallel_for(cas.size(), threads, [&](std::size_t i) { per_ca(g, cas[i], mode, parts[i]); });

    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<SuperMetapath> out;
    out.reserve(total);
    for (auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
        std::vector<SuperMetapath>().swap(p);
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

} // namespace

std::string_view to_string(Pattern p) { return p == Pattern::p1 ? "P1" : "P2"; }

std::string_view to_string(RefinedClass c) {
    static constexpr std::array<std::string_view, kNumRefinedClasses> names{"P11", "P12", "P21",
                                                                           "P22", "P23", "P24"};
    return names[static_cast<std::size_t>(c)];
}

std::string_view to_string(TimeMode m) { return m == TimeMode::time_aware ? "time_aware" : "timeless"; }

TimeMode parse_time_mode(std::string_view text) {
    if (text == "time_aware" || text == "time-aware") return TimeMode::time_aware;
    if (text == "timeless") return TimeMode::timeless;
    throw std::invalid_argument("unknown time mode '" + std::string(text) + "'");
}

std::span<const EdgeKind> relation_sequence(Pattern p) {
    if (p == Pattern::p1) return kP1Relations;
    return kP2Relations;
}

bool canonical_less(const SuperMetapath& a, const SuperMetapath& b) {
    if (a.pattern != b.pattern) return a.pattern < b.pattern;
    return a.nodes < b.nodes;
}

RefinedClass refine(const SuperMetapath& sm) {
    const bool round_trip = sm.head() == sm.tail();
    if (sm.pattern == Pattern::p1) return round_trip ? RefinedClass::p12 : RefinedClass::p11;
    const bool self_call = sm.nodes[2] == sm.nodes[1];
    if (self_call) return round_trip ? RefinedClass::p24 : RefinedClass::p23;
    return round_trip ? RefinedClass::p22 : RefinedClass::p21;
}

std::uint64_t count_increasing_pairs(std::span<const std::int64_t> a,
                                     std::span<const std::int64_t> b) {
    std::uint64_t count = 0;
    std::size_t p = 0;
    for (const auto t : b) {
        while (p < a.size() && a[p] < t) ++p;
        count += p;
    }
    return count;
}

std::uint64_t count_increasing_triples(std::span<const std::int64_t> a,
                                       std::span<const std::int64_t> mid,
                                       std::span<const std::int64_t> c) {
    std::uint64_t count = 0;
    std::size_t pa = 0, pc = 0;
    for (const auto t : mid) {
        while (pa < a.size() && a[pa] < t) ++pa;
        while (pc < c.size() && c[pc] <= t) ++pc;
        count += std::uint64_t{pa} * (c.size() - pc);
    }
    return count;
}

std::vector<SuperMetapath> enumerate_p1(const HeterogeneousGraph& g, TimeMode mode, unsigned threads) {
    return enumerate_by_ca(g, mode, threads, supers_p1_for);
}

std::vector<SuperMetapath> enumerate_p2(const HeterogeneousGraph& g, TimeMode mode, unsigned threads) {
    return enumerate_by_ca(g, mode, threads, supers_p2_for);
}

std::vector<SuperMetapath> enumerate(const HeterogeneousGraph& g, Pattern pattern, TimeMode mode,
                                     unsigned threads) {
    return pattern == Pattern::p1 ? enumerate_p1(g, mode, threads) : enumerate_p2(g, mode, threads);
}

std::uint64_t MetapathStats::omega_total(Pattern p) const {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < kNumRefinedClasses; ++c)
        if (pattern_of(static_cast<RefinedClass>(c)) == p) s += omega_sum[c];
    return s;
}

std::uint64_t MetapathStats::super_total(Pattern p) const {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < kNumRefinedClasses; ++c)
        if (pattern_of(static_cast<RefinedClass>(c)) == p) s += super_count[c];
    return s;
}

MetapathStats metapath_stats(std::span<const SuperMetapath> supers) {
    MetapathStats s;
    for (const auto& sm : supers) {
        const auto c = static_cast<std::size_t>(sm.refined_class);
        s.omega_sum[c] += sm.omega;
        s.super_count[c] += 1;
    }
    return s;
}

void write_super_dump(std::ostream& out, std::span<const SuperMetapath> supers,
                      const HeterogeneousGraph& g) {
    out << "pattern,refined_class,node_sequence,omega\n";
    for (const auto& sm : supers) {
        out << to_string(sm.pattern) << ',' << to_string(sm.refined_class) << ',';
        const auto seq = sm.node_sequence();
        for (std::size_t i = 0; i < seq.size(); ++i) out << (i ? "|" : "") << g.name(seq[i]);
        out << ',' << sm.omega << '\n';
    }
}

void write_metapath_stats_csv(std::ostream& out, const MetapathStats& stats) {
    out << "metapath";
    for (std::size_t c = 0; c < kNumRefinedClasses; ++c)
        out << ',' << to_string(static_cast<RefinedClass>(c));
    out << ",Sum\n";
    const auto row = [&](std::string_view label, Pattern p, const auto& values, std::uint64_t total) {
        out << label;
        for (std::size_t c = 0; c < kNumRefinedClasses; ++c) {
            if (pattern_of(static_cast<RefinedClass>(c)) == p)
                out << ',' << values[c];
            else
                out << ",-";
        }
        out << ',' << total << '\n';
    };
    row("P1", Pattern::p1, stats.omega_sum, stats.omega_total(Pattern::p1));
    row("P2", Pattern::p2, stats.omega_sum, stats.omega_total(Pattern::p2));
    row("P1_supers", Pattern::p1, stats.super_count, stats.super_total(Pattern::p1));
    row("P2_supers", Pattern::p2, stats.super_count, stats.super_total(Pattern::p2));
}

} // namespace hetaug
