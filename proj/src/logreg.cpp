#include "hetaug/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetaug {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double linear(std::span<const double> params, std::span<const double> row) {
    double z = params.back();
    for (std::size_t c = 0; c < row.size(); ++c) z += params[c] * row[c];
    return z;
}

void check_shapes(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y) {
    if (params.size() != x.cols() + 1) throw std::invalid_argument("params must have cols + 1 entries");
    if (y.size() != x.rows()) throw std::invalid_argument("label count does not match rows");
}

double signed_log(double v) { return v < 0 ? -std::log1p(-v) : std::log1p(v); }

} // namespace

Standardizer Standardizer::fit(const FeatureMatrix& x, bool log_transform) {
    Standardizer s;
    s.log_transform = log_transform;
    const std::size_t d = x.cols();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    if (x.rows() == 0) return s;
    const auto n = static_cast<double>(x.rows());
    const auto value = [&](std::size_t r, std::size_t c) { return log_transform ? signed_log(x(r, c)) : x(r, c); };
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0;
        for (std::size_t r = 0; r < x.rows(); ++r) sum += value(r, c);
        const double mean = sum / n;
        double ss = 0;
        for (std::size_t r = 0; r < x.rows(); ++r) ss += (value(r, c) - mean) * (value(r, c) - mean);
        const double sd = std::sqrt(ss / n);
        s.mean[c] = mean;
        s.scale[c] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
    }
    return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t c = 0; c < in.size(); ++c) {
        const double v = log_transform ? signed_log(in[c]) : in[c];
        out[c] = (v - mean[c]) / scale[c];
    }
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
    FeatureMatrix out(x.cols());
    std::vector<double> row(x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        apply(x.row(r), row);
        out.append(x.id(r), row);
    }
    return out;
}

double logistic_loss(std::span<const double> params, const FeatureMatrix& x, std::span<const int> y,
                     double l2) {
    check_shapes(params, x, y);
    double loss = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double z = linear(params, x.row(r));
        loss += softplus(z) - (y[r] ? z : 0.0);
    }
    if (x.rows()) loss /= static_cast<double>(x.rows());
    double penalty = 0;
    for (std::size_t c = 0; c + 1 < params.size(); ++c) penalty += params[c] * params[c];
    return loss + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(std::span<const double> params, const FeatureMatrix& x,
                                      std::span<const int> y, double l2) {
    check_shapes(params, x, y);
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        const double err = sigmoid(linear(params, row)) - (y[r] ? 1.0 : 0.0);
        for (std::size_t c = 0; c < row.size(); ++c) grad[c] += err * row[c];
        grad.back() += err;
    }
    if (x.rows())
        for (auto& g : grad) g /= static_cast<double>(x.rows());
    for (std::size_t c = 0; c + 1 < params.size(); ++c) grad[c] += l2 * params[c];
    return grad;
}

double LogRegModel::probability(std::span<const double> raw_row) const {
    std::vector<double> row(raw_row.size());
    standardizer.apply(raw_row, row);
    return sigmoid(linear(params, row));
}

std::vector<int> LogRegModel::predict(const FeatureMatrix& x) const {
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = probability(x.row(r)) >= 0.5 ? 1 : 0;
    return out;
}

LogRegModel fit_logreg(const FeatureMatrix& x, std::span<const int> y, const LogRegParams& hp) {
    if (y.size() != x.rows()) throw std::invalid_argument("label count does not match rows");
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (double v : x.row(r))
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");

    LogRegModel model;
    model.standardizer = Standardizer::fit(x, hp.log_transform);
    const FeatureMatrix xs = model.standardizer.apply(x);
    const std::size_t p = x.cols() + 1;

    // Standardized columns bound the Hessian by (d + 1) / 4 + l2.
    const double step = 1.0 / (0.25 * static_cast<double>(p) + hp.l2);

    // Nesterov-accelerated gradient descent from zero.
    std::vector<double> w(p, 0.0), prev(p, 0.0), look(p, 0.0);
    for (int it = 0; it < hp.max_iter; ++it) {
        const double momentum = static_cast<double>(it) / (it + 3.0);
        for (std::size_t i = 0; i < p; ++i) look[i] = w[i] + momentum * (w[i] - prev[i]);
        const auto grad = logistic_gradient(look, xs, y, hp.l2);
        prev = w;
        double norm = 0;
        for (std::size_t i = 0; i < p; ++i) {
            w[i] = look[i] - step * grad[i];
            norm = std::max(norm, std::abs(grad[i]));
        }
        if (norm < hp.tol) break;
    }
    model.params = std::move(w);
    return model;
}

std::vector<int> train_predict_logreg(const FeatureMatrix& train_x, std::span<const int> train_y,
                                      const FeatureMatrix& test_x, const LogRegParams& params) {
    return fit_logreg(train_x, train_y, params).predict(test_x);
}

} // namespace hetaug
