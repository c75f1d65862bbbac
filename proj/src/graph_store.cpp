#include "hetaug/graph_store.hpp"

#include "hetaug/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

namespace hetaug {

namespace {

constexpr std::string_view kEdgeHeader = "src,dst,kind,timestamp,value";
constexpr std::string_view kTypeHeader = "account,type";

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool header_matches(std::string_view line, std::string_view expected) {
    const auto got = detail::split(line);
    const auto want = detail::split(expected);
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i)
        if (lower(got[i]) != want[i]) return false;
    return true;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw NotFoundError("cannot open " + p.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + p.string());
    return out;
}

} // namespace

std::string_view to_string(EdgeKind kind) { return kind == EdgeKind::call ? "call" : "trans"; }

std::string_view to_string(NodeType type) { return type == NodeType::ca ? "CA" : "EOA"; }

EdgeKind parse_edge_kind(std::string_view text) {
    const auto t = lower(detail::trim(text));
    if (t == "trans") return EdgeKind::trans;
    if (t == "call") return EdgeKind::call;
    throw std::invalid_argument("unknown edge kind '" + std::string(text) + "'");
}

NodeType parse_node_type(std::string_view text) {
    const auto t = lower(detail::trim(text));
    if (t == "eoa") return NodeType::eoa;
    if (t == "ca") return NodeType::ca;
    throw std::invalid_argument("unknown node type '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// HeterogeneousGraph

std::optional<NodeId> HeterogeneousGraph::find(std::string_view account) const {
    const auto it = index_.find(std::string(account));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeId HeterogeneousGraph::id_of(std::string_view account) const {
    if (auto v = find(account)) return *v;
    throw NotFoundError("unknown account '" + std::string(account) + "'");
}

std::span<const TemporalEdge> HeterogeneousGraph::adjacency(NodeId v, Direction dir,
                                                            EdgeKind kind) const {
    if (v >= num_nodes()) throw NotFoundError("node id " + std::to_string(v) + " out of range");
    const Csr& c = csr(dir, kind);
    return std::span<const TemporalEdge>(c.edges).subspan(c.offsets[v],
                                                           c.offsets[v + 1] - c.offsets[v]);
}

std::span<const TemporalEdge> HeterogeneousGraph::adjacency(std::string_view account,
                                                            Direction dir, EdgeKind kind) const {
    return adjacency(id_of(account), dir, kind);
}

std::vector<NodeId> HeterogeneousGraph::nodes_of_type(NodeType type) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < num_nodes(); ++v)
        if (types_[v] == type) out.push_back(v);
    return out;
}

bool HeterogeneousGraph::operator==(const HeterogeneousGraph& other) const {
    if (names_ != other.names_ || types_ != other.types_ || edges_ != other.edges_) return false;
    for (std::size_t i = 0; i < adj_.size(); ++i)
        if (adj_[i].offsets != other.adj_[i].offsets || adj_[i].edges != other.adj_[i].edges)
            return false;
    return true;
}

bool LabelSet::contains(NodeId v) const {
    return std::binary_search(ponzi_accounts.begin(), ponzi_accounts.end(), v);
}

// ---------------------------------------------------------------------------
// GraphBuilder

NodeId GraphBuilder::add_node(std::string_view account) {
    std::string key(account);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto id = static_cast<NodeId>(names_.size());
    index_.emplace(key, id);
    names_.push_back(std::move(key));
    declared_.emplace_back();
    return id;
}

NodeId GraphBuilder::add_node(std::string_view account, NodeType type) {
    const NodeId id = add_node(account);
    auto& slot = declared_[id];
    if (slot && *slot != type)
        throw ConflictError("account '" + std::string(account) + "' typed both EOA and CA");
    if (!slot) ++declared_count_;
    slot = type;
    return id;
}

void GraphBuilder::add_edge(std::string_view src, std::string_view dst, EdgeKind kind,
                            std::int64_t timestamp, double value) {
    if (timestamp < 0) throw std::invalid_argument("negative timestamp");
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("value must be finite and non-negative");
    const NodeId s = add_node(src);
    const NodeId d = add_node(dst);
    edges_.push_back(TemporalEdge{s, d, kind, timestamp, value});
}

HeterogeneousGraph GraphBuilder::build(TypeSource source) && {
    HeterogeneousGraph g;
    const std::size_t n = names_.size();
    g.types_.assign(n, NodeType::eoa);

    if (source == TypeSource::infer) {
        for (const auto& e : edges_)
            if (e.kind == EdgeKind::call) g.types_[e.dst] = NodeType::ca;
    } else {
        for (std::size_t v = 0; v < n; ++v) {
            if (declared_[v]) {
                g.types_[v] = *declared_[v];
            } else if (default_type_) {
                g.types_[v] = *default_type_;
            } else {
                throw ConfigError("account '" + names_[v] +
                                  "' has no type and the type file declares no default");
            }
        }
    }

    // One global order gives every adjacency list its sort order for free.
    std::vector<std::size_t> order(edges_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = edges_[a];
        const auto& y = edges_[b];
        return std::tie(x.timestamp, x.dst, x.src, x.value) <
               std::tie(y.timestamp, y.dst, y.src, y.value);
    });

    for (int dir = 0; dir < 2; ++dir) {
        for (int kind = 0; kind < 2; ++kind) {
            auto& c = g.adj_[dir * 2 + kind];
            c.offsets.assign(n + 1, 0);
            const auto owner = [dir](const TemporalEdge& e) {
                return dir == static_cast<int>(Direction::out) ? e.src : e.dst;
            };
            for (const auto& e : edges_)
                if (static_cast<int>(e.kind) == kind) ++c.offsets[owner(e) + 1];
            std::partial_sum(c.offsets.begin(), c.offsets.end(), c.offsets.begin());
            c.edges.resize(c.offsets[n]);
            std::vector<std::size_t> cursor(c.offsets.begin(), c.offsets.end() - 1);
            for (std::size_t idx : order) {
                const auto& e = edges_[idx];
                if (static_cast<int>(e.kind) == kind) c.edges[cursor[owner(e)]++] = e;
            }
        }
    }

    g.names_ = std::move(names_);
    g.index_ = std::move(index_);
    g.edges_ = std::move(edges_);
    return g;
}

// ---------------------------------------------------------------------------
// Ingestion

HeterogeneousGraph ingest_edges(std::istream& edges, std::istream* types) {
    GraphBuilder builder;

    if (types) {
        std::string line;
        std::size_t lineno = 0;
        bool header = false;
        while (std::getline(*types, line)) {
            ++lineno;
            if (detail::is_comment_or_blank(line)) continue;
            if (!header) {
                if (!header_matches(line, kTypeHeader))
                    throw ParseError("type file header must be '" + std::string(kTypeHeader) + "'",
                                     lineno);
                header = true;
                continue;
            }
            const auto cols = detail::split(line);
            if (cols.size() != 2 || cols[0].empty()) throw ParseError("expected account,type", lineno);
            NodeType type;
            try {
                type = parse_node_type(cols[1]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), lineno);
            }
            if (cols[0] == "*")
                builder.set_default_type(type);
            else
                builder.add_node(cols[0], type);
        }
    }

    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(edges, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        if (!header) {
            if (!header_matches(line, kEdgeHeader))
                throw ParseError("edge file header must be '" + std::string(kEdgeHeader) + "'",
                                 lineno);
            header = true;
            continue;
        }
        const auto cols = detail::split(line);
        if (cols.size() != 5) throw ParseError("expected 5 columns, got " + std::to_string(cols.size()), lineno);
        if (cols[0].empty() || cols[1].empty()) throw ParseError("empty account id", lineno);
        EdgeKind kind;
        try {
            kind = parse_edge_kind(cols[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), lineno);
        }
        const auto ts = detail::parse_int(cols[3]);
        if (!ts || *ts < 0) throw ParseError("bad timestamp '" + std::string(cols[3]) + "'", lineno);
        const auto value = detail::parse_double(cols[4]);
        if (!value || !std::isfinite(*value) || *value < 0)
            throw ParseError("bad value '" + std::string(cols[4]) + "'", lineno);
        builder.add_edge(cols[0], cols[1], kind, *ts, *value);
    }

    return std::move(builder).build(types ? TypeSource::explicit_types : TypeSource::infer);
}

HeterogeneousGraph ingest_edges(const std::filesystem::path& edges,
                                const std::optional<std::filesystem::path>& types) {
    auto edge_in = open_in(edges);
    if (!types) return ingest_edges(edge_in);
    auto type_in = open_in(*types);
    return ingest_edges(edge_in, &type_in);
}

LabelSet read_labels(std::istream& in, const HeterogeneousGraph& g, std::string source) {
    LabelSet labels;
    labels.source = std::move(source);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        const auto account = detail::trim(line);
        const auto v = g.find(account);
        if (!v) throw NotFoundError("line " + std::to_string(lineno) + ": labeled account '" +
                                    std::string(account) + "' is not in the graph");
        if (!g.is_ca(*v))
            throw ConfigError("line " + std::to_string(lineno) + ": labeled account '" +
                              std::string(account) + "' is not a contract account");
        labels.ponzi_accounts.push_back(*v);
    }
    std::sort(labels.ponzi_accounts.begin(), labels.ponzi_accounts.end());
    labels.ponzi_accounts.erase(
        std::unique(labels.ponzi_accounts.begin(), labels.ponzi_accounts.end()),
        labels.ponzi_accounts.end());
    return labels;
}

LabelSet read_labels(const std::filesystem::path& path, const HeterogeneousGraph& g) {
    auto in = open_in(path);
    return read_labels(in, g, path.string());
}

// ---------------------------------------------------------------------------
// Serialization

void write_edges_csv(std::ostream& out, const HeterogeneousGraph& g) {
    out << kEdgeHeader << '\n';
    for (const auto& e : g.edges()) {
        out << g.name(e.src) << ',' << g.name(e.dst) << ',' << to_string(e.kind) << ','
            << e.timestamp << ',' << detail::format_roundtrip(e.value) << '\n';
    }
}

void write_types_csv(std::ostream& out, const HeterogeneousGraph& g) {
    out << kTypeHeader << '\n';
    for (NodeId v = 0; v < g.num_nodes(); ++v) out << g.name(v) << ',' << to_string(g.type(v)) << '\n';
}

void write_labels(std::ostream& out, const LabelSet& labels, const HeterogeneousGraph& g) {
    for (NodeId v : labels.ponzi_accounts) out << g.name(v) << '\n';
}

void write_snapshot(const std::filesystem::path& dir, const HeterogeneousGraph& g) {
    std::filesystem::create_directories(dir);
    auto edges = open_out(dir / "edges.csv");
    write_edges_csv(edges, g);
    auto types = open_out(dir / "types.csv");
    write_types_csv(types, g);
}

HeterogeneousGraph read_snapshot(const std::filesystem::path& dir) {
    return ingest_edges(dir / "edges.csv", dir / "types.csv");
}

// ---------------------------------------------------------------------------

HomogeneousGraph project_homogeneous(const HeterogeneousGraph& g) {
    HomogeneousGraph h;
    h.num_nodes = g.num_nodes();
    h.edges.reserve(g.num_edges());
    for (const auto& e : g.edges()) h.edges.emplace_back(e.src, e.dst);
    std::sort(h.edges.begin(), h.edges.end());
    h.edges.erase(std::unique(h.edges.begin(), h.edges.end()), h.edges.end());
    return h;
}

GraphStats stats(const HeterogeneousGraph& g, const LabelSet& labels) {
    GraphStats s;
    s.n_nodes = g.num_nodes();
    s.n_edges = g.num_edges();
    for (NodeId v = 0; v < g.num_nodes(); ++v) (g.is_ca(v) ? s.n_ca : s.n_eoa) += 1;
    for (const auto& e : g.edges()) (e.kind == EdgeKind::call ? s.n_call_edges : s.n_trans_edges) += 1;
    s.n_labels = labels.ponzi_accounts.size();
    s.n_hom_edges = project_homogeneous(g).edges.size();
    return s;
}

} // namespace hetaug
