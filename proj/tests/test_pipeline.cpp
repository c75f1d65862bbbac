#include "hetaug/error.hpp"
#include "hetaug/pipeline.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace hetaug;

namespace {

PipelineConfig small_run(const std::string& tag) {
    PipelineConfig cfg;
    SynthConfig sc;
    sc.n_ponzi_ca = 15;
    sc.n_normal_ca = 15;
    sc.n_eoa = 300;
    cfg.synth = sc;
    cfg.n_repeats = 2;
    cfg.n_folds = 3;
    cfg.output_dir = testutil::temp_dir(tag);
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t file_count(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir)) return 0;
    return static_cast<std::size_t>(std::distance(std::filesystem::directory_iterator(dir), {}));
}

} // namespace

TEST_CASE("a run writes every artifact") {
    const auto cfg = small_run("pipeline_full");
    const auto result = run_pipeline(cfg, nullptr);
    for (const char* name : {kGraphStatsFile, kMetapathStatsFile, kSuperDumpFile, kFeaturesFile, kEvalReportFile,
                             kConfigFile})
        CHECK(std::filesystem::exists(cfg.output_dir / name));
    CHECK(result.report.config_hash == cfg.hash());
    CHECK(result.report.folds.size() == 6);
    REQUIRE(result.metapath_stats);
    CHECK(result.graph_stats.n_labels == 15);

    std::ifstream report_in(cfg.output_dir / kEvalReportFile);
    CHECK(read_eval_report(report_in) == result.report);
    // The written config reproduces the hash.
    CHECK(load_config(cfg.output_dir / kConfigFile).hash() == cfg.hash());
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("raw-only skips the metapath artifacts") {
    auto cfg = small_run("pipeline_raw");
    cfg.raw_only = true;
    const auto result = run_pipeline(cfg, nullptr);
    CHECK(!result.metapath_stats);
    CHECK(!std::filesystem::exists(cfg.output_dir / kSuperDumpFile));
    CHECK(!std::filesystem::exists(cfg.output_dir / kMetapathStatsFile));
    CHECK(std::filesystem::exists(cfg.output_dir / kFeaturesFile));
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("failures name the stage and leave no partial artifacts") {
    SUBCASE("missing input") {
        PipelineConfig cfg;
        cfg.edges = "/nonexistent/edges.csv";
        cfg.labels = "/nonexistent/labels.txt";
        cfg.output_dir = testutil::temp_dir("pipeline_missing");
        try {
            run_pipeline(cfg, nullptr);
            FAIL("expected an error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == Stage::ingest);
            CHECK(e.exit_code() == 11);
        }
        CHECK(file_count(cfg.output_dir) == 0);
        std::filesystem::remove_all(cfg.output_dir);
    }
    SUBCASE("evaluation fails after artifacts were written") {
        // Every contract is labeled, so there are no negatives to sample.
        const auto dir = testutil::temp_dir("pipeline_inputs");
        {
            std::ofstream edges(dir / "edges.csv");
            edges << "src,dst,kind,timestamp,value\nA,C1,call,1,1\nC1,B,trans,2,1\nA,C2,call,3,1\n";
            std::ofstream labels(dir / "labels.txt");
            labels << "C1\nC2\n";
        }
        PipelineConfig cfg;
        cfg.edges = dir / "edges.csv";
        cfg.labels = dir / "labels.txt";
        cfg.output_dir = dir / "out";
        try {
            run_pipeline(cfg, nullptr);
            FAIL("expected an error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == Stage::evaluate);
            CHECK(e.exit_code() == exit_code(Stage::evaluate));
        }
        CHECK(file_count(cfg.output_dir) == 0);
        std::filesystem::remove_all(dir);
    }
    SUBCASE("invalid config") {
        PipelineConfig cfg;
        try {
            run_pipeline(cfg, nullptr);  // no inputs at all
            FAIL("expected an error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == Stage::config);
            CHECK(e.exit_code() == 10);
        }
    }
}

TEST_CASE("config hash covers semantic fields only") {
    const auto base = small_run("pipeline_hash");
    auto same = base;
    same.threads = 8;
    same.output_dir = "/elsewhere";
    CHECK(same.hash() == base.hash());

    auto k = base;
    k.k_percent = 20;
    CHECK(k.hash() != base.hash());

    auto off_a = base, off_b = base;
    off_a.use_filtering = off_b.use_filtering = false;
    off_b.k_percent = 30;
    CHECK(off_a.hash() == off_b.hash());
    CHECK(off_a.hash() != base.hash());

    auto seed = base;
    seed.seed = 1;
    CHECK(seed.hash() != base.hash());
    CHECK(base.hash().size() == 16);
    std::filesystem::remove_all(base.output_dir);
}

TEST_CASE("config JSON") {
    const auto cfg = small_run("pipeline_json");
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(back.canonical() == cfg.canonical());
    CHECK_THROWS_AS(config_from_json(R"({"pattern": "p2", "colour": 1})"), ConfigError);
    CHECK(config_from_json(R"({"k_percent": 30})").k_percent == 30);
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("runs are reproducible") {
    auto a = small_run("pipeline_det_a");
    auto b = small_run("pipeline_det_b");
    b.threads = 3;
    run_pipeline(a, nullptr);
    run_pipeline(b, nullptr);
    for (const char* name : {kGraphStatsFile, kMetapathStatsFile, kSuperDumpFile, kFeaturesFile, kEvalReportFile,
                             kConfigFile})
        CHECK(slurp(a.output_dir / name) == slurp(b.output_dir / name));
    std::filesystem::remove_all(a.output_dir);
    std::filesystem::remove_all(b.output_dir);
}
