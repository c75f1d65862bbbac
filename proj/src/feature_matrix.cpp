#include "hetaug/feature_matrix.hpp"

#include "hetaug/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace hetaug {

std::size_t FeatureMatrix::append(NodeId id, std::span<const double> values) {
    if (!values.empty() && values.size() != cols_)
        throw ConfigError("row has " + std::to_string(values.size()) + " values, matrix has " +
                          std::to_string(cols_) + " columns");
    const std::size_t r = ids_.size();
    ids_.push_back(id);
    if (values.empty())
        data_.resize(data_.size() + cols_, 0.0);
    else
        data_.insert(data_.end(), values.begin(), values.end());
    index_.try_emplace(id, r);
    return r;
}

std::optional<std::size_t> FeatureMatrix::find(NodeId id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

FeatureMatrix FeatureMatrix::select(std::span<const NodeId> accounts) const {
    FeatureMatrix out(cols_);
    for (NodeId v : accounts) {
        const auto r = find(v);
        if (!r) throw NotFoundError("no feature row for node " + std::to_string(v));
        out.append(v, row(*r));
    }
    return out;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& m, const HeterogeneousGraph& g,
                       const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "account";
    for (std::size_t c = 0; c < m.cols(); ++c) out << ",f" << (c + 1);
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << g.name(m.id(r));
        for (double v : m.row(r)) out << ',' << detail::format_g17(v);
        out << '\n';
    }
}

FeatureMatrix read_feature_csv(std::istream& in, const HeterogeneousGraph& g) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<FeatureMatrix> m;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        const auto cols = detail::split(line);
        if (!m) {
            if (cols.empty() || cols[0] != "account") throw ParseError("expected feature header", lineno);
            m.emplace(cols.size() - 1);
            continue;
        }
        if (cols.size() != m->cols() + 1) throw ParseError("wrong column count", lineno);
        const auto v = g.find(cols[0]);
        if (!v) throw ParseError("unknown account '" + std::string(cols[0]) + "'", lineno);
        values.clear();
        for (std::size_t c = 1; c < cols.size(); ++c) {
            const auto x = detail::parse_double(cols[c]);
            if (!x) throw ParseError("bad number '" + std::string(cols[c]) + "'", lineno);
            values.push_back(*x);
        }
        m->append(*v, values);
    }
    return m ? std::move(*m) : FeatureMatrix(0);
}

} // namespace hetaug
