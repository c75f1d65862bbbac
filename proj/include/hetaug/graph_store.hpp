#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hetaug {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

enum class EdgeKind : std::uint8_t { trans = 0, call = 1 };
enum class NodeType : std::uint8_t { eoa = 0, ca = 1 };
enum class Direction : std::uint8_t { in = 0, out = 1 };

std::string_view to_string(EdgeKind kind);
std::string_view to_string(NodeType type);
EdgeKind parse_edge_kind(std::string_view text);
NodeType parse_node_type(std::string_view text);

struct TemporalEdge {
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    EdgeKind kind = EdgeKind::trans;
    std::int64_t timestamp = 0;
    double value = 0.0;

    bool operator==(const TemporalEdge&) const = default;
};

// Node-typed temporal multigraph. Immutable once built; every adjacency list
// is sorted by (timestamp, dst, src, value) with input order as the last key.
class HeterogeneousGraph {
public:
    HeterogeneousGraph() = default;

    std::size_t num_nodes() const { return names_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::string& name(NodeId v) const { return names_.at(v); }
    NodeType type(NodeId v) const { return types_.at(v); }
    bool is_ca(NodeId v) const { return types_[v] == NodeType::ca; }
    bool is_eoa(NodeId v) const { return types_[v] == NodeType::eoa; }

    std::optional<NodeId> find(std::string_view account) const;
    // Throws NotFoundError.
    NodeId id_of(std::string_view account) const;

    // Edges in ingestion order.
    std::span<const TemporalEdge> edges() const { return edges_; }

    std::span<const TemporalEdge> adjacency(NodeId v, Direction dir, EdgeKind kind) const;
    // Throws NotFoundError for unknown accounts.
    std::span<const TemporalEdge> adjacency(std::string_view account, Direction dir,
                                            EdgeKind kind) const;

    // Node ids of the given type, ascending.
    std::vector<NodeId> nodes_of_type(NodeType type) const;

    bool operator==(const HeterogeneousGraph& other) const;

private:
    friend class GraphBuilder;

    struct Csr {
        std::vector<std::size_t> offsets;  // num_nodes + 1
        std::vector<TemporalEdge> edges;
    };
    const Csr& csr(Direction dir, EdgeKind kind) const {
        return adj_[static_cast<int>(dir) * 2 + static_cast<int>(kind)];
    }

    std::vector<std::string> names_;
    std::vector<NodeType> types_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<TemporalEdge> edges_;
    std::array<Csr, 4> adj_;
};

// How node types are decided when building a graph.
//   infer:    an account is a CA iff it is the destination of at least one
//             call edge (only contracts can be called); otherwise EOA.
//   explicit: every account needs a declared type or the declared default.
enum class TypeSource { infer, explicit_types };

class GraphBuilder {
public:
    // Declares an account. Ids are dense and assigned in first-seen order,
    // counting declarations before edges.
    NodeId add_node(std::string_view account);
    // Declares an account with a type. Throws ConflictError if the account was
    // already declared with the other type.
    NodeId add_node(std::string_view account, NodeType type);
    void set_default_type(NodeType type) { default_type_ = type; }

    // Throws std::invalid_argument for negative timestamp or value.
    void add_edge(std::string_view src, std::string_view dst, EdgeKind kind,
                  std::int64_t timestamp, double value);

    bool has_declared_types() const { return declared_count_ > 0 || default_type_.has_value(); }

    // Throws ConfigError when explicit typing leaves an account untyped.
    HeterogeneousGraph build(TypeSource source) &&;

private:
    std::vector<std::string> names_;
    std::vector<std::optional<NodeType>> declared_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<TemporalEdge> edges_;
    std::optional<NodeType> default_type_;
    std::size_t declared_count_ = 0;
};

// Merged, timestamp-free projection. Edges are unique ordered pairs, sorted.
struct HomogeneousGraph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;
};

struct LabelSet {
    std::vector<NodeId> ponzi_accounts;  // ascending, unique
    std::string source;

    bool contains(NodeId v) const;
};

struct GraphStats {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    std::size_t n_ca = 0;
    std::size_t n_eoa = 0;
    std::size_t n_call_edges = 0;
    std::size_t n_trans_edges = 0;
    std::size_t n_labels = 0;
    std::size_t n_hom_edges = 0;

    bool operator==(const GraphStats&) const = default;
};

// Edge CSV with header `src,dst,kind,timestamp,value`. When `types` is given
// it must have header `account,type`; an account of `*` sets the default type.
HeterogeneousGraph ingest_edges(std::istream& edges, std::istream* types = nullptr);
HeterogeneousGraph ingest_edges(const std::filesystem::path& edges,
                                const std::optional<std::filesystem::path>& types = std::nullopt);

// One account per line; blank lines and `#` comments are skipped. Every
// account must exist in `g` and be a CA.
LabelSet read_labels(std::istream& in, const HeterogeneousGraph& g, std::string source = {});
LabelSet read_labels(const std::filesystem::path& path, const HeterogeneousGraph& g);

void write_edges_csv(std::ostream& out, const HeterogeneousGraph& g);
void write_types_csv(std::ostream& out, const HeterogeneousGraph& g);
void write_labels(std::ostream& out, const LabelSet& labels, const HeterogeneousGraph& g);

// Snapshot as a CSV pair (edges.csv, types.csv). Reading it back with
// ingest_edges reproduces node ids, edge order and adjacency exactly.
void write_snapshot(const std::filesystem::path& dir, const HeterogeneousGraph& g);
HeterogeneousGraph read_snapshot(const std::filesystem::path& dir);

HomogeneousGraph project_homogeneous(const HeterogeneousGraph& g);

GraphStats stats(const HeterogeneousGraph& g, const LabelSet& labels);

} // namespace hetaug
