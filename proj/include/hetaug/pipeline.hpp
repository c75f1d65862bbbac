#pragma once

#include "hetaug/eval.hpp"
#include "hetaug/filter_aggregate.hpp"
#include "hetaug/metapath.hpp"
#include "hetaug/synth.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetaug {

struct PipelineConfig {
    // Either real inputs or a synthetic graph.
    std::optional<std::filesystem::path> edges;
    std::optional<std::filesystem::path> types;
    std::optional<std::filesystem::path> labels;
    std::optional<SynthConfig> synth;

    PatternSet pattern = PatternSet::p2;
    TimeMode time_mode = TimeMode::time_aware;
    double k_percent = 10.0;  // ignored unless use_filtering
    CombineMode combine_mode = CombineMode::replace;
    bool use_refinement = true;
    bool use_filtering = true;
    bool raw_only = false;  // evaluate manual features without augmentation

    int n_repeats = 5;
    int n_folds = 5;
    std::vector<double> l2_grid{1e-3, 1e-2, 1e-1};
    std::optional<std::filesystem::path> scores;  // external classifier scores

    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "hetaug_out";
    unsigned threads = 1;  // does not affect outputs

    void validate() const;
    // Semantic fields only: output_dir and threads are excluded, k_percent is
    // dropped when filtering is off, metapath settings when raw_only.
    std::string canonical() const;
    std::string hash() const;
};

// Reads the JSON config format; unknown keys are rejected.
PipelineConfig config_from_json(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string config_to_json(const PipelineConfig& cfg);

enum class Stage { config, ingest, features, metapaths, aggregate, evaluate, write };
std::string_view to_string(Stage s);
int exit_code(Stage s);

class PipelineError : public std::runtime_error {
public:
    PipelineError(Stage stage, const std::string& what)
        : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const { return stage_; }
    int exit_code() const { return hetaug::exit_code(stage_); }

private:
    Stage stage_;
};

struct PipelineResult {
    GraphStats graph_stats;
    std::optional<MetapathStats> metapath_stats;
    EvalReport report;
    std::vector<std::filesystem::path> artifacts;
};

inline constexpr const char* kGraphStatsFile = "graph_stats.json";
inline constexpr const char* kMetapathStatsFile = "metapath_stats.csv";
inline constexpr const char* kSuperDumpFile = "supers.csv";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kEvalReportFile = "eval_report.json";
inline constexpr const char* kConfigFile = "config.json";

// Runs ingest -> features -> metapaths -> filter/aggregate -> evaluate and
// writes the artifacts into cfg.output_dir. Stage timings go to `log`.
// Throws PipelineError; artifacts written before the failure are removed.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

void write_graph_stats_json(std::ostream& out, const GraphStats& s);

} // namespace hetaug
