// hetaug command line: run / compare / synth / stats.

#include "hetaug/error.hpp"
#include "hetaug/eval.hpp"
#include "hetaug/graph_store.hpp"
#include "hetaug/metapath.hpp"
#include "hetaug/pipeline.hpp"
#include "hetaug/synth.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace hetaug;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

EvalReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open " + path);
    return read_eval_report(in);
}

void add_synth_options(CLI::App* app, SynthConfig& s) {
    app->add_option("--n-ponzi", s.n_ponzi_ca, "Ponzi contracts");
    app->add_option("--n-normal", s.n_normal_ca, "non-Ponzi contracts");
    app->add_option("--n-eoa", s.n_eoa, "externally owned accounts");
    app->add_option("--investors", s.investors_per_ca, "mean investors per contract");
    app->add_option("--reward-probability", s.reward_probability);
    app->add_option("--deposits", s.deposits_per_investor, "mean deposits per investor");
    app->add_option("--payback-ratio", s.payback_ratio);
    app->add_option("--normal-payback-ratio", s.normal_payback_ratio);
    app->add_option("--amount-sigma", s.amount_sigma);
    app->add_option("--p2-fraction", s.p2_fraction);
    app->add_option("--self-call-rate", s.self_call_rate_normal);
    app->add_option("--noise", s.noise_fraction);
    app->add_option("--payout-lag", s.payout_lag);
    app->add_option("--victim-pool", s.victim_pool);
    app->add_option("--victim-affinity", s.victim_affinity);
    app->add_option("--horizon", s.time_horizon);
    app->add_option("--synth-seed", s.seed);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ponzi contract detection with metapath feature augmentation"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run the detection pipeline");
    std::string config_path, pattern, time_mode, combine_mode, out_dir;
    std::string edges, types, labels, scores;
    std::optional<double> k;
    std::optional<int> repeats, folds;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    bool use_synth = false, no_filter = false, no_refine = false, raw_only = false;
    SynthConfig run_synth;
    run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    run->add_option("--edges", edges, "edges CSV");
    run->add_option("--types", types, "account types CSV");
    run->add_option("--labels", labels, "Ponzi contract list");
    run->add_flag("--synth", use_synth, "use a generated graph instead of input files");
    add_synth_options(run, run_synth);
    run->add_option("--pattern", pattern, "P1, P2 or P1+P2");
    run->add_option("--time-mode", time_mode, "time_aware or timeless");
    run->add_option("--k", k, "top-K percentage");
    run->add_option("--combine", combine_mode, "replace, sum or concat");
    run->add_flag("--no-filter", no_filter, "keep every super-metapath");
    run->add_flag("--no-refine", no_refine, "filter per pattern instead of per refined class");
    run->add_flag("--raw-only", raw_only, "evaluate manual features only");
    run->add_option("--scores", scores, "external classifier scores (account,score)");
    run->add_option("--repeats", repeats);
    run->add_option("--folds", folds);
    run->add_option("--seed", seed);
    run->add_option("--threads", threads, "worker threads (0 = hardware)");
    run->add_option("--out", out_dir, "output directory (default $HETAUG_OUT_DIR or ./hetaug_out)");

    // compare
    auto* compare = app.add_subcommand("compare", "relative F1 gain of run B over run A");
    std::string report_a, report_b;
    compare->add_option("baseline", report_a, "eval_report.json of the baseline")->required();
    compare->add_option("candidate", report_b, "eval_report.json of the candidate")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic labeled graph");
    SynthConfig synth_cfg;
    std::string synth_out;
    add_synth_options(synth, synth_cfg);
    synth->add_option("--out", synth_out, "output directory")->required();

    // stats
    auto* stat = app.add_subcommand("stats", "graph and metapath statistics");
    std::string st_edges, st_types, st_labels, st_mode = "time-aware";
    bool st_metapaths = false;
    unsigned st_threads = 0;
    stat->add_option("--edges", st_edges)->required()->check(CLI::ExistingFile);
    stat->add_option("--types", st_types)->check(CLI::ExistingFile);
    stat->add_option("--labels", st_labels)->check(CLI::ExistingFile);
    stat->add_flag("--metapaths", st_metapaths, "also count super-metapaths");
    stat->add_option("--time-mode", st_mode);
    stat->add_option("--threads", st_threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsageError;
    }

    if (*run) {
        PipelineConfig cfg;
        try {
            if (const char* env = std::getenv("HETAUG_OUT_DIR"); env && *env) cfg.output_dir = env;
            if (!config_path.empty()) cfg = load_config(config_path, cfg);
            if (use_synth || run->count("--synth-seed") || run->count("--n-ponzi")) cfg.synth = run_synth;
            if (!edges.empty()) cfg.edges = edges;
            if (!types.empty()) cfg.types = types;
            if (!labels.empty()) cfg.labels = labels;
            if (!pattern.empty()) cfg.pattern = parse_pattern_set(pattern);
            if (!time_mode.empty()) cfg.time_mode = parse_time_mode(time_mode);
            if (!combine_mode.empty()) cfg.combine_mode = parse_combine_mode(combine_mode);
            if (k) cfg.k_percent = *k;
            if (no_filter) cfg.use_filtering = false;
            if (no_refine) cfg.use_refinement = false;
            if (raw_only) cfg.raw_only = true;
            if (!scores.empty()) cfg.scores = scores;
            if (repeats) cfg.n_repeats = *repeats;
            if (folds) cfg.n_folds = *folds;
            if (seed) cfg.seed = *seed;
            if (run->count("--threads")) cfg.threads = threads;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
        } catch (const std::exception& e) {
            std::cerr << "hetaug: config: " << e.what() << '\n';
            return exit_code(Stage::config);
        }
        try {
            const auto result = run_pipeline(cfg, &std::cerr);
            std::printf("config_hash %s\nmean_f1 %.6f\nstd_f1 %.6f\n", result.report.config_hash.c_str(),
                        result.report.mean_f1, result.report.std_f1);
            std::printf("outputs %s\n", cfg.output_dir.string().c_str());
            return 0;
        } catch (const PipelineError& e) {
            std::cerr << "hetaug: " << e.what() << '\n';
            return e.exit_code();
        }
    }

    try {
        if (*compare) {
            write_gain_table(std::cout, compare_runs(load_report(report_a), load_report(report_b)));
            return 0;
        }
        if (*synth) {
            synth_cfg.validate();
            const auto data = generate(synth_cfg);
            write_synthetic(synth_out, data);
            std::printf("wrote %zu nodes, %zu edges, %zu labels to %s\n", data.graph.num_nodes(),
                        data.graph.num_edges(), data.labels.ponzi_accounts.size(), synth_out.c_str());
            return 0;
        }
        if (*stat) {
            const auto g = ingest_edges(st_edges, st_types.empty() ? std::nullopt
                                                                    : std::optional<std::filesystem::path>(st_types));
            const LabelSet labels = st_labels.empty() ? LabelSet{} : read_labels(st_labels, g);
            write_graph_stats_json(std::cout, stats(g, labels));
            if (st_metapaths) {
                std::vector<SuperMetapath> all;
                const auto mode = parse_time_mode(st_mode);
                for (Pattern p : {Pattern::p1, Pattern::p2}) {
                    auto part = enumerate(g, p, mode, st_threads);
                    all.insert(all.end(), part.begin(), part.end());
                }
                write_metapath_stats_csv(std::cout, metapath_stats(all));
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "hetaug: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
