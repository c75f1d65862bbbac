#include "hetaug/eval.hpp"

#include "hetaug/error.hpp"
#include "hetaug/parallel.hpp"
#include "hetaug/rng.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hetaug {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(a + 1)) ^ splitmix64(b + 0x51ed270b));
}

FeatureMatrix rows_of(const FeatureMatrix& x, std::span<const std::size_t> rows) {
    FeatureMatrix out(x.cols());
    for (auto r : rows) out.append(x.id(r), x.row(r));
    return out;
}

std::vector<int> labels_of(std::span<const int> y, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(y[r]);
    return out;
}

void split_by_fold(std::span<const int> folds, int fold, std::vector<std::size_t>& train,
                   std::vector<std::size_t>& test) {
    train.clear();
    test.clear();
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == fold ? test : train).push_back(i);
}

double select_l2(const FeatureMatrix& x, std::span<const int> y, const EvalConfig& cfg, std::uint64_t seed) {
    if (cfg.l2_grid.size() == 1) return cfg.l2_grid.front();
    const auto folds = stratified_folds(y, cfg.inner_folds, seed);
    double best_l2 = cfg.l2_grid.front();
    double best_score = -1.0;
    std::vector<std::size_t> train, test;
    for (double l2 : cfg.l2_grid) {
        LogRegParams hp = cfg.logreg;
        hp.l2 = l2;
        double score = 0;
        for (int f = 0; f < cfg.inner_folds; ++f) {
            split_by_fold(folds, f, train, test);
            const auto pred = train_predict_logreg(rows_of(x, train), labels_of(y, train), rows_of(x, test), hp);
            score += micro_f1(pred, labels_of(y, test));
        }
        if (score > best_score + 1e-12) {
            best_score = score;
            best_l2 = l2;
        }
    }
    return best_l2;
}

} // namespace

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

LabeledSample sample_negatives(const HeterogeneousGraph& g, const LabelSet& labels, std::uint64_t seed) {
    std::vector<NodeId> unlabeled;
    for (NodeId v : g.nodes_of_type(NodeType::ca))
        if (!labels.contains(v)) unlabeled.push_back(v);
    const std::size_t n_pos = labels.ponzi_accounts.size();
    if (unlabeled.size() < n_pos)
        throw ConfigError("need " + std::to_string(n_pos) + " unlabeled contract accounts, found " +
                          std::to_string(unlabeled.size()));

    Rng rng(seed);
    for (std::size_t i = 0; i < n_pos; ++i) std::swap(unlabeled[i], unlabeled[i + rng.below(unlabeled.size() - i)]);
    unlabeled.resize(n_pos);
    std::sort(unlabeled.begin(), unlabeled.end());

    LabeledSample s;
    s.accounts = labels.ponzi_accounts;
    s.accounts.insert(s.accounts.end(), unlabeled.begin(), unlabeled.end());
    s.labels.assign(n_pos, 1);
    s.labels.resize(2 * n_pos, 0);
    return s;
}

double micro_f1(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("micro_f1: prediction and truth lengths differ");
    // Pool TP/FP/FN over both classes.
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (int cls : {0, 1}) {
            const bool p = (predictions[i] != 0) == (cls == 1);
            const bool t = (truth[i] != 0) == (cls == 1);
            tp += p && t;
            fp += p && !t;
            fn += !p && t;
        }
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2 * precision * recall / (precision + recall);
}

void EvalConfig::validate() const {
    if (n_folds < 2) throw ConfigError("n_folds must be >= 2");
    if (n_repeats < 1) throw ConfigError("n_repeats must be >= 1");
    if (classifier == ClassifierKind::logreg) {
        if (l2_grid.empty()) throw ConfigError("l2_grid must not be empty");
        if (l2_grid.size() > 1 && inner_folds < 2) throw ConfigError("inner_folds must be >= 2");
    }
}

std::string EvalConfig::canonical() const {
    nlohmann::json j;
    j["n_repeats"] = n_repeats;
    j["n_folds"] = n_folds;
    j["seed"] = seed;
    j["classifier"] = classifier == ClassifierKind::logreg ? "logreg" : "external_scores";
    if (classifier == ClassifierKind::logreg) {
        j["l2_grid"] = l2_grid;
        j["inner_folds"] = inner_folds;
        j["max_iter"] = logreg.max_iter;
        j["tol"] = logreg.tol;
        j["log_transform"] = logreg.log_transform;
    } else {
        std::vector<std::pair<NodeId, double>> scores(external_scores.begin(), external_scores.end());
        std::sort(scores.begin(), scores.end());
        j["scores"] = scores;
    }
    return j.dump();
}

std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed) {
    std::vector<int> folds(labels.size(), 0);
    Rng rng(seed);
    int next = 0;
    for (int cls : {1, 0}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if ((labels[i] != 0) == (cls == 1)) members.push_back(i);
        rng.shuffle(std::span<std::size_t>(members));
        // Continue dealing where the previous class stopped so fold sizes stay even.
        for (auto i : members) {
            folds[i] = next;
            next = (next + 1) % n_folds;
        }
    }
    return folds;
}

EvalReport cross_validate(const FeatureMatrix& features, std::span<const int> labels, const EvalConfig& cfg) {
    cfg.validate();
    if (labels.size() != features.rows()) throw ConfigError("label count does not match feature rows");
    const auto n_pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos < static_cast<std::size_t>(cfg.n_folds) || n_neg < static_cast<std::size_t>(cfg.n_folds))
        throw ConfigError("each class needs at least n_folds samples");

    const std::size_t n_tasks = static_cast<std::size_t>(cfg.n_repeats) * cfg.n_folds;
    std::vector<std::vector<int>> assignments(cfg.n_repeats);
    for (int r = 0; r < cfg.n_repeats; ++r) assignments[r] = stratified_folds(labels, cfg.n_folds, derive_seed(cfg.seed, r));

    std::vector<FoldResult> results(n_tasks);
    parallel_for(n_tasks, cfg.threads, [&](std::size_t task) {
        const int r = static_cast<int>(task / cfg.n_folds);
        const int f = static_cast<int>(task % cfg.n_folds);
        std::vector<std::size_t> train, test;
        split_by_fold(assignments[r], f, train, test);
        const auto test_y = labels_of(labels, test);
        std::vector<int> pred;
        if (cfg.classifier == ClassifierKind::external_scores) {
            for (auto i : test) {
                const auto it = cfg.external_scores.find(features.id(i));
                if (it == cfg.external_scores.end())
                    throw ConfigError("no external score for node " + std::to_string(features.id(i)));
                pred.push_back(it->second >= 0.5 ? 1 : 0);
            }
        } else {
            const FeatureMatrix train_x = rows_of(features, train);
            const auto train_y = labels_of(labels, train);
            LogRegParams hp = cfg.logreg;
            hp.l2 = select_l2(train_x, train_y, cfg, derive_seed(cfg.seed, r, f + 1));
            pred = train_predict_logreg(train_x, train_y, rows_of(features, test), hp);
        }
        results[task] = FoldResult{r, f, test.size(), micro_f1(pred, test_y)};
    });

    EvalReport report;
    report.config_hash = hex64(fnv1a64(cfg.canonical()));
    report.seed = cfg.seed;
    report.n_repeats = cfg.n_repeats;
    report.n_folds = cfg.n_folds;
    report.folds = std::move(results);
    double sum = 0;
    for (const auto& f : report.folds) sum += f.micro_f1;
    report.mean_f1 = sum / static_cast<double>(report.folds.size());
    if (report.folds.size() > 1) {
        double ss = 0;
        for (const auto& f : report.folds) ss += (f.micro_f1 - report.mean_f1) * (f.micro_f1 - report.mean_f1);
        report.std_f1 = std::sqrt(ss / static_cast<double>(report.folds.size() - 1));
    }
    return report;
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
    nlohmann::ordered_json j;
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    j["n_repeats"] = report.n_repeats;
    j["n_folds"] = report.n_folds;
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : report.folds)
        folds.push_back({{"repeat", f.repeat}, {"fold", f.fold}, {"n_test", f.n_test}, {"micro_f1", f.micro_f1}});
    j["folds"] = std::move(folds);
    j["mean_f1"] = report.mean_f1;
    j["std_f1"] = report.std_f1;
    out << j.dump(2) << '\n';
}

EvalReport read_eval_report(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
        EvalReport r;
        r.config_hash = j.at("config_hash").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.n_repeats = j.at("n_repeats").get<int>();
        r.n_folds = j.at("n_folds").get<int>();
        for (const auto& f : j.at("folds"))
            r.folds.push_back({f.at("repeat").get<int>(), f.at("fold").get<int>(), f.at("n_test").get<std::size_t>(),
                               f.at("micro_f1").get<double>()});
        r.mean_f1 = j.at("mean_f1").get<double>();
        r.std_f1 = j.at("std_f1").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("eval report: ") + e.what(), 0);
    }
}

std::unordered_map<NodeId, double> read_scores_csv(std::istream& in, const HeterogeneousGraph& g) {
    std::unordered_map<NodeId, double> scores;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_comment_or_blank(line)) continue;
        const auto cols = detail::split(line);
        if (!header) {
            if (cols.size() != 2 || cols[0] != "account" || cols[1] != "score")
                throw ParseError("scores header must be 'account,score'", lineno);
            header = true;
            continue;
        }
        if (cols.size() != 2) throw ParseError("expected account,score", lineno);
        const auto v = g.find(cols[0]);
        if (!v) throw ParseError("unknown account '" + std::string(cols[0]) + "'", lineno);
        const auto s = detail::parse_double(cols[1]);
        if (!s || !std::isfinite(*s)) throw ParseError("bad score '" + std::string(cols[1]) + "'", lineno);
        scores[*v] = *s;
    }
    return scores;
}

GainTable compare_runs(const EvalReport& a, const EvalReport& b) {
    if (a.seed != b.seed || a.n_repeats != b.n_repeats || a.n_folds != b.n_folds || a.folds.size() != b.folds.size())
        throw ConfigError("reports differ in seed or fold structure");
    const auto gain = [](double x, double y) {
        if (x == 0.0) throw ConfigError("baseline score is zero; relative gain undefined");
        return (y - x) / x;
    };
    GainTable t;
    for (std::size_t i = 0; i < a.folds.size(); ++i) {
        const auto& fa = a.folds[i];
        const auto& fb = b.folds[i];
        if (fa.repeat != fb.repeat || fa.fold != fb.fold) throw ConfigError("reports list folds in different order");
        t.folds.push_back({"repeat " + std::to_string(fa.repeat) + " fold " + std::to_string(fa.fold), fa.micro_f1,
                           fb.micro_f1, gain(fa.micro_f1, fb.micro_f1)});
    }
    t.mean = {"mean", a.mean_f1, b.mean_f1, gain(a.mean_f1, b.mean_f1)};
    return t;
}

std::string format_gain(double gain) {
    char buf[32];
    const double pct = gain * 100.0;
    // Round first so tiny negatives print as +0.00%.
    const double rounded = std::round(pct * 100.0) / 100.0;
    std::snprintf(buf, sizeof(buf), "%+.2f%%", rounded == 0.0 ? 0.0 : rounded);
    return buf;
}

void write_gain_table(std::ostream& out, const GainTable& table) {
    out << "run,a_micro_f1,b_micro_f1,gain\n";
    const auto row = [&](const GainRow& r) {
        out << r.label << ',' << detail::format_g17(r.a) << ',' << detail::format_g17(r.b) << ','
            << format_gain(r.gain) << '\n';
    };
    for (const auto& r : table.folds) row(r);
    row(table.mean);
}

} // namespace hetaug
