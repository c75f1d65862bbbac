#pragma once

#include "hetaug/graph_store.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hetaug {

// Dense row-major matrix with one row per account. Duplicate accounts are
// allowed; lookup by account returns the first matching row.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

    std::size_t rows() const { return ids_.size(); }
    std::size_t cols() const { return cols_; }

    NodeId id(std::size_t row) const { return ids_[row]; }
    const std::vector<NodeId>& ids() const { return ids_; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    // Appends a row (zero-filled when `values` is empty). Returns its index.
    std::size_t append(NodeId id, std::span<const double> values = {});

    std::optional<std::size_t> find(NodeId id) const;

    // Rows for `accounts`, in that order. Throws NotFoundError.
    FeatureMatrix select(std::span<const NodeId> accounts) const;

    bool operator==(const FeatureMatrix& other) const {
        return cols_ == other.cols_ && ids_ == other.ids_ && data_ == other.data_;
    }

private:
    std::size_t cols_ = 0;
    std::vector<NodeId> ids_;
    std::vector<double> data_;
    std::unordered_map<NodeId, std::size_t> index_;
};

// CSV with header `account,f1..fN`; values printed with 17 significant
// digits. Non-empty `comment` is written first as a `# ` line.
void write_feature_csv(std::ostream& out, const FeatureMatrix& m, const HeterogeneousGraph& g,
                       const std::string& comment = {});

FeatureMatrix read_feature_csv(std::istream& in, const HeterogeneousGraph& g);

} // namespace hetaug
