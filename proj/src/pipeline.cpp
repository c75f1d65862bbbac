#include "hetaug/pipeline.hpp"

#include "hetaug/error.hpp"
#include "hetaug/manual_features.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hetaug {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json synth_to_json(const SynthConfig& s) {
    return {{"n_ponzi_ca", s.n_ponzi_ca},
            {"n_normal_ca", s.n_normal_ca},
            {"n_eoa", s.n_eoa},
            {"investors_per_ca", s.investors_per_ca},
            {"deposits_per_investor", s.deposits_per_investor},
            {"reward_probability", s.reward_probability},
            {"payback_ratio", s.payback_ratio},
            {"normal_payback_ratio", s.normal_payback_ratio},
            {"amount_sigma", s.amount_sigma},
            {"p2_fraction", s.p2_fraction},
            {"self_call_rate_normal", s.self_call_rate_normal},
            {"payout_lag", s.payout_lag},
            {"victim_pool", s.victim_pool},
            {"victim_affinity", s.victim_affinity},
            {"noise_fraction", s.noise_fraction},
            {"time_horizon", s.time_horizon},
            {"seed", s.seed}};
}

SynthConfig synth_from_json(const json& j, SynthConfig s) {
    for (const auto& [key, v] : j.items()) {
        if (key == "n_ponzi_ca") s.n_ponzi_ca = v.get<std::size_t>();
        else if (key == "n_normal_ca") s.n_normal_ca = v.get<std::size_t>();
        else if (key == "n_eoa") s.n_eoa = v.get<std::size_t>();
        else if (key == "investors_per_ca") s.investors_per_ca = v.get<double>();
        else if (key == "deposits_per_investor") s.deposits_per_investor = v.get<double>();
        else if (key == "reward_probability") s.reward_probability = v.get<double>();
        else if (key == "payback_ratio") s.payback_ratio = v.get<double>();
        else if (key == "normal_payback_ratio") s.normal_payback_ratio = v.get<double>();
        else if (key == "amount_sigma") s.amount_sigma = v.get<double>();
        else if (key == "p2_fraction") s.p2_fraction = v.get<double>();
        else if (key == "self_call_rate_normal") s.self_call_rate_normal = v.get<double>();
        else if (key == "payout_lag") s.payout_lag = v.get<double>();
        else if (key == "victim_pool") s.victim_pool = v.get<double>();
        else if (key == "victim_affinity") s.victim_affinity = v.get<double>();
        else if (key == "noise_fraction") s.noise_fraction = v.get<double>();
        else if (key == "time_horizon") s.time_horizon = v.get<std::int64_t>();
        else if (key == "seed") s.seed = v.get<std::uint64_t>();
        else throw ConfigError("unknown synth key '" + key + "'");
    }
    return s;
}

EvalConfig eval_config(const PipelineConfig& cfg, const HeterogeneousGraph* g) {
    EvalConfig e;
    e.n_repeats = cfg.n_repeats;
    e.n_folds = cfg.n_folds;
    e.seed = cfg.seed;
    e.l2_grid = cfg.l2_grid;
    e.threads = cfg.threads;
    if (cfg.scores) {
        e.classifier = ClassifierKind::external_scores;
        if (g) {
            std::ifstream in(*cfg.scores);
            if (!in) throw NotFoundError("cannot open " + cfg.scores->string());
            e.external_scores = read_scores_csv(in, *g);
        }
    }
    return e;
}

// Tracks written files so a failed run can clean up after itself.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

    template <typename Fn>
    void write(const char* name, Fn&& fn) {
        const auto path = dir_ / name;
        written_.push_back(path);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + path.string());
        fn(out);
        out.flush();
        if (!out) throw ConfigError("failed writing " + path.string());
    }

    void remove_all() noexcept {
        for (const auto& p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        written_.clear();
    }

    const std::vector<std::filesystem::path>& written() const { return written_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

class StageTimer {
public:
    StageTimer(std::ostream* log, Stage stage) : log_(log), stage_(stage), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        if (!log_) return;
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
        *log_ << "[hetaug] stage " << to_string(stage_) << ": " << dt.count() << " s\n";
    }

private:
    std::ostream* log_;
    Stage stage_;
    std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
auto in_stage(Stage stage, std::ostream* log, Fn&& fn) {
    StageTimer timer(log, stage);
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

} // namespace

void PipelineConfig::validate() const {
    if (synth && edges) throw ConfigError("give either edges or synth, not both");
    if (!synth && !edges) throw ConfigError("no input: set edges (and labels) or synth");
    if (edges && !labels) throw ConfigError("labels are required with edges");
    if (synth) synth->validate();
    if (use_filtering && !raw_only) TopKConfig{k_percent}.validate();
    eval_config(*this, nullptr).validate();
}

std::string PipelineConfig::canonical() const {
    ordered_json j;
    if (synth) {
        j["synth"] = synth_to_json(*synth);
    } else {
        j["edges"] = edges ? edges->string() : "";
        j["types"] = types ? types->string() : "";
        j["labels"] = labels ? labels->string() : "";
    }
    j["raw_only"] = raw_only;
    if (!raw_only) {
        j["pattern"] = to_string(pattern);
        j["time_mode"] = to_string(time_mode);
        j["combine_mode"] = to_string(combine_mode);
        j["use_filtering"] = use_filtering;
        if (use_filtering) {
            j["k_percent"] = k_percent;
            j["use_refinement"] = use_refinement;
        }
    }
    j["n_repeats"] = n_repeats;
    j["n_folds"] = n_folds;
    if (scores)
        j["scores"] = scores->string();
    else
        j["l2_grid"] = l2_grid;
    j["seed"] = seed;
    return j.dump();
}

std::string PipelineConfig::hash() const { return hex64(fnv1a64(canonical())); }

PipelineConfig config_from_json(const std::string& text, PipelineConfig cfg) {
    json j;
    try {
        j = json::parse(text);
        for (const auto& [key, v] : j.items()) {
            if (key == "edges") cfg.edges = v.get<std::string>();
            else if (key == "types") cfg.types = v.get<std::string>();
            else if (key == "labels") cfg.labels = v.get<std::string>();
            else if (key == "synth") cfg.synth = synth_from_json(v, cfg.synth.value_or(SynthConfig{}));
            else if (key == "pattern") cfg.pattern = parse_pattern_set(v.get<std::string>());
            else if (key == "time_mode") cfg.time_mode = parse_time_mode(v.get<std::string>());
            else if (key == "k_percent") cfg.k_percent = v.get<double>();
            else if (key == "combine_mode") cfg.combine_mode = parse_combine_mode(v.get<std::string>());
            else if (key == "use_refinement") cfg.use_refinement = v.get<bool>();
            else if (key == "use_filtering") cfg.use_filtering = v.get<bool>();
            else if (key == "raw_only") cfg.raw_only = v.get<bool>();
            else if (key == "n_repeats") cfg.n_repeats = v.get<int>();
            else if (key == "n_folds") cfg.n_folds = v.get<int>();
            else if (key == "l2_grid") cfg.l2_grid = v.get<std::vector<double>>();
            else if (key == "scores") cfg.scores = v.get<std::string>();
            else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (key == "output_dir") cfg.output_dir = v.get<std::string>();
            else if (key == "threads") cfg.threads = v.get<unsigned>();
            else if (key == "config_hash") continue;  // written alongside, recomputed on demand
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), std::move(base));
}

std::string config_to_json(const PipelineConfig& cfg) {
    auto j = ordered_json::parse(cfg.canonical());
    j["config_hash"] = cfg.hash();
    return j.dump(2) + "\n";
}

std::string_view to_string(Stage s) {
    switch (s) {
    case Stage::config: return "config";
    case Stage::ingest: return "ingest";
    case Stage::features: return "features";
    case Stage::metapaths: return "metapaths";
    case Stage::aggregate: return "aggregate";
    case Stage::evaluate: return "evaluate";
    case Stage::write: return "write";
    }
    return "?";
}

int exit_code(Stage s) { return 10 + static_cast<int>(s); }

void write_graph_stats_json(std::ostream& out, const GraphStats& s) {
    ordered_json j;
    j["hom"] = {{"n_nodes", s.n_nodes}, {"n_edges", s.n_hom_edges}, {"n_labels", s.n_labels}};
    j["het"] = {{"n_nodes", s.n_nodes},         {"n_edges", s.n_edges},
                {"n_ca", s.n_ca},               {"n_eoa", s.n_eoa},
                {"n_call_edges", s.n_call_edges}, {"n_trans_edges", s.n_trans_edges},
                {"n_labels", s.n_labels}};
    out << j.dump(2) << '\n';
}

PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
    in_stage(Stage::config, log, [&] {
        cfg.validate();
        std::filesystem::create_directories(cfg.output_dir);
        return 0;
    });

    ArtifactWriter writer(cfg.output_dir);
    PipelineResult result;
    try {
        const SyntheticData data = in_stage(Stage::ingest, log, [&] {
            if (cfg.synth) return generate(*cfg.synth);
            SyntheticData d;
            d.graph = ingest_edges(*cfg.edges, cfg.types);
            d.labels = read_labels(*cfg.labels, d.graph);
            return d;
        });
        const HeterogeneousGraph& g = data.graph;
        const LabelSet& labels = data.labels;

        in_stage(Stage::write, log, [&] {
            result.graph_stats = stats(g, labels);
            writer.write(kConfigFile, [&](std::ostream& out) { out << config_to_json(cfg); });
            writer.write(kGraphStatsFile, [&](std::ostream& out) { write_graph_stats_json(out, result.graph_stats); });
            return 0;
        });

        const FeatureMatrix base = in_stage(Stage::features, log, [&] {
            std::vector<NodeId> all(g.num_nodes());
            std::iota(all.begin(), all.end(), NodeId{0});
            return feature_matrix(g, all, cfg.threads);
        });
        const auto cas = g.nodes_of_type(NodeType::ca);

        FeatureMatrix combined = base.select(cas);
        std::string comment = "raw manual features";
        if (!cfg.raw_only) {
            std::vector<SuperMetapath> supers = in_stage(Stage::metapaths, log, [&] {
                std::vector<SuperMetapath> all;
                for (Pattern p : {Pattern::p1, Pattern::p2}) {
                    if (!includes(cfg.pattern, p)) continue;
                    auto part = enumerate(g, p, cfg.time_mode, cfg.threads);
                    all.insert(all.end(), part.begin(), part.end());
                }
                return all;
            });
            in_stage(Stage::write, log, [&] {
                result.metapath_stats = metapath_stats(supers);
                writer.write(kMetapathStatsFile,
                             [&](std::ostream& out) { write_metapath_stats_csv(out, *result.metapath_stats); });
                writer.write(kSuperDumpFile, [&](std::ostream& out) { write_super_dump(out, supers, g); });
                return 0;
            });
            combined = in_stage(Stage::aggregate, log, [&] {
                const auto retained =
                    cfg.use_filtering ? top_k_filter(supers, TopKConfig{cfg.k_percent}, cfg.use_refinement) : supers;
                AugmentedFeatures aug;
                for (Pattern p : {Pattern::p1, Pattern::p2}) {
                    if (!includes(cfg.pattern, p)) continue;
                    (p == Pattern::p1 ? aug.p1 : aug.p2) = aggregate(g, normalize(retained, p), base, p);
                }
                return combine(base.select(cas), aug, cfg.combine_mode, cfg.pattern);
            });
            comment = "pattern=" + std::string(to_string(cfg.pattern)) + " mode=" +
                      std::string(to_string(cfg.combine_mode)) + " k=" +
                      (cfg.use_filtering ? detail::format_roundtrip(cfg.k_percent) : std::string("100")) +
                      " time_mode=" + std::string(to_string(cfg.time_mode)) +
                      " refinement=" + (cfg.use_refinement ? "on" : "off");
        }
        in_stage(Stage::write, log, [&] {
            writer.write(kFeaturesFile, [&](std::ostream& out) { write_feature_csv(out, combined, g, comment); });
            return 0;
        });

        result.report = in_stage(Stage::evaluate, log, [&] {
            const auto sample = sample_negatives(g, labels, cfg.seed);
            auto report = cross_validate(combined.select(sample.accounts), sample.labels, eval_config(cfg, &g));
            report.config_hash = cfg.hash();
            return report;
        });
        in_stage(Stage::write, log, [&] {
            writer.write(kEvalReportFile, [&](std::ostream& out) { write_eval_report(out, result.report); });
            return 0;
        });
    } catch (...) {
        writer.remove_all();
        throw;
    }
    result.artifacts = writer.written();
    return result;
}

} // namespace hetaug
