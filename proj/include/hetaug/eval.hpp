#pragma once

#include "hetaug/feature_matrix.hpp"
#include "hetaug/graph_store.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hetaug {

// ---------------------------------------------------------------------------
// Sampling and metrics

struct LabeledSample {
    std::vector<NodeId> accounts;  // positives first, then negatives
    std::vector<int> labels;       // 1 = Ponzi
};

// All labeled CAs plus an equally sized uniform sample (without replacement)
// of unlabeled CAs. Throws ConfigError if there are too few unlabeled CAs.
LabeledSample sample_negatives(const HeterogeneousGraph& g, const LabelSet& labels, std::uint64_t seed);

// Micro-averaged F1 over both classes. For single-label binary data this is
// accuracy. Throws std::invalid_argument on length mismatch.
double micro_f1(std::span<const int> predictions, std::span<const int> truth);

// ---------------------------------------------------------------------------
// Built-in classifier: L2-regularized logistic regression

struct LogRegParams {
    double l2 = 1e-2;
    int max_iter = 2000;
    double tol = 1e-6;        // stop when the gradient norm falls below this
    bool log_transform = true; // sign(x) * log1p(|x|) before standardizing
};

// Mean/scale from the training rows only; constant columns keep scale 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;
    bool log_transform = true;

    static Standardizer fit(const FeatureMatrix& x, bool log_transform);
    void apply(std::span<const double> in, std::span<double> out) const;
    FeatureMatrix apply(const FeatureMatrix& x) const;
};

// Mean logistic loss plus (l2 / 2) * |w|^2. `params` holds the weights
// followed by the intercept, which is not penalized. Labels are 0/1.
double logistic_loss(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y,
                     double l2);
std::vector<double> logistic_gradient(std::span<const double> params, const FeatureMatrix& x,
                                      std::span<const int> y, double l2);

struct LogRegModel {
    Standardizer standardizer;
    std::vector<double> params;  // weights..., intercept

    double probability(std::span<const double> raw_row) const;
    std::vector<int> predict(const FeatureMatrix& x) const;  // threshold 0.5
};

// Throws std::invalid_argument on non-finite features.
LogRegModel fit_logreg(const FeatureMatrix& x, std::span<const int> y, const LogRegParams& params);

std::vector<int> train_predict_logreg(const FeatureMatrix& train_x, std::span<const int> train_y,
                                      const FeatureMatrix& test_x, const LogRegParams& params);

// ---------------------------------------------------------------------------
// Repeated stratified cross-validation

enum class ClassifierKind { logreg, external_scores };

struct EvalConfig {
    int n_repeats = 5;
    int n_folds = 5;
    std::uint64_t seed = 42;
    ClassifierKind classifier = ClassifierKind::logreg;
    // Candidate penalties, picked per outer fold by inner stratified CV on the
    // training split. A single entry skips the inner search.
    std::vector<double> l2_grid{1e-3, 1e-2, 1e-1};
    int inner_folds = 3;
    LogRegParams logreg{};
    // Used when classifier == external_scores: predicted positive iff score >= 0.5.
    std::unordered_map<NodeId, double> external_scores;
    unsigned threads = 1;

    void validate() const;
    std::string canonical() const;  // stable text form used for hashing
};

struct FoldResult {
    int repeat = 0;
    int fold = 0;
    std::size_t n_test = 0;
    double micro_f1 = 0.0;

    bool operator==(const FoldResult&) const = default;
};

struct EvalReport {
    std::string config_hash;
    std::uint64_t seed = 0;
    int n_repeats = 0;
    int n_folds = 0;
    std::vector<FoldResult> folds;  // repeat-major
    double mean_f1 = 0.0;
    double std_f1 = 0.0;  // sample standard deviation over folds

    bool operator==(const EvalReport&) const = default;
};

// Fold assignment for one repeat: fold index per sample. Each class is
// shuffled and dealt round-robin, so per-fold class counts differ by <= 1.
std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed);

// Rows of `features` are samples; labels are 0/1. Throws ConfigError when a
// class has fewer than n_folds samples.
EvalReport cross_validate(const FeatureMatrix& features, std::span<const int> labels,
                          const EvalConfig& cfg);

void write_eval_report(std::ostream& out, const EvalReport& report);
EvalReport read_eval_report(std::istream& in);

// `account,score` CSV.
std::unordered_map<NodeId, double> read_scores_csv(std::istream& in, const HeterogeneousGraph& g);

// ---------------------------------------------------------------------------
// Run comparison

struct GainRow {
    std::string label;
    double a = 0.0;
    double b = 0.0;
    double gain = 0.0;  // (b - a) / a
};

struct GainTable {
    std::vector<GainRow> folds;
    GainRow mean;
};

// Throws ConfigError unless both reports share seed and fold structure.
GainTable compare_runs(const EvalReport& a, const EvalReport& b);

// "+5.00%" style.
std::string format_gain(double gain);
void write_gain_table(std::ostream& out, const GainTable& table);

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t v);

} // namespace hetaug
