#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "isoc/cli.hpp"
#include "isoc/io.hpp"

using namespace isoc;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("isoc_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

cli::Context ctx() {
    cli::Context c;
    c.argv = {"isoc", "test"};
    c.workers = 2;
    return c;
}

} // namespace

TEST_CASE("gen-truth analytic writes moments and a manifest") {
    TempDir dir;
    cli::GenTruthArgs args;
    args.model = "builtin:reaching-lqg";
    args.mode = "analytic";
    args.out_dir = dir.file("out");
    REQUIRE(cli::cmd_gen_truth(args, ctx()) == cli::kOk);

    const auto truth = load_moments_csv(dir.file("out/truth.csv"));
    CHECK(truth.steps() == 41);
    CHECK(truth.channels() == 4);
    // Analytic truth equals the lemma moments of the measured states.
    const ModelBundle b = build_reaching_model(ModelKind::Lqg);
    const auto cm = assemble_cost(b.cost, 10, 2);
    const auto ops = assemble_noise(b.noise, b.system.B, b.system.H);
    const auto lemma =
        lqg_propagate_moments(b.system, lqg_gains(b.system, cm, ops), ops).measured(b.system.M);
    for (int t = 0; t <= 41; ++t)
        CHECK((truth.mean[t] - lemma.mean[t]).cwiseAbs().maxCoeff() == 0.0);

    const auto manifest = load_json(dir.file("out/manifest.json"));
    CHECK(manifest.at("command") == "gen-truth");
    CHECK(manifest.at("config").at("mode") == "analytic");
}

TEST_CASE("gen-truth sampled is reproducible for a fixed seed") {
    TempDir dir;
    cli::GenTruthArgs args;
    args.model = "builtin:reaching-lqg";
    args.mode = "sampled";
    args.samples = 64;
    args.seed = 99;
    args.out_dir = dir.file("a");
    REQUIRE(cli::cmd_gen_truth(args, ctx()) == cli::kOk);
    args.out_dir = dir.file("b");
    REQUIRE(cli::cmd_gen_truth(args, ctx()) == cli::kOk);
    CHECK(fnv1a64_file(dir.file("a/truth.csv")) == fnv1a64_file(dir.file("b/truth.csv")));
}

TEST_CASE("forward emits gains, moments and plot data") {
    TempDir dir;
    cli::ForwardArgs args;
    args.model = "builtin:reaching-lqs";
    args.out_dir = dir.file("out");
    REQUIRE(cli::cmd_forward(args, ctx()) == cli::kOk);
    CHECK(std::filesystem::exists(dir.file("out/moments_full.csv")));
    CHECK(std::filesystem::exists(dir.file("out/moments_measured.csv")));
    CHECK(std::filesystem::exists(dir.file("out/plot.csv")));
    const auto diag = load_json(dir.file("out/diagnostics.json"));
    CHECK(diag.at("kind") == "lqs");
    CHECK(diag.at("converged").get<bool>());
    const auto gains = load_json(dir.file("out/gains.json"));
    CHECK(gains.at("L").size() == 41);
    CHECK(gains.at("K").size() == 41);
}

TEST_CASE("eval of a file against itself gives all-ones VAF") {
    TempDir dir;
    cli::GenTruthArgs gen;
    gen.model = "builtin:reaching-lqg";
    gen.mode = "analytic";
    gen.out_dir = dir.file("t");
    REQUIRE(cli::cmd_gen_truth(gen, ctx()) == cli::kOk);

    cli::EvalArgs ev;
    ev.truth = dir.file("t/truth.csv");
    ev.predicted = dir.file("t/truth.csv");
    ev.out_dir = dir.file("fit");
    REQUIRE(cli::cmd_eval(ev, ctx()) == cli::kOk);
    const auto fit = load_json(dir.file("fit/fit.json"));
    for (const auto& v : fit.at("m_vaf"))
        CHECK(v.get<double>() == 1.0);
    for (const auto& v : fit.at("omega_vaf"))
        CHECK(v.get<double>() == 1.0);
    CHECK(fit.at("j_isoc").get<double>() == 1.0);
}

TEST_CASE("sample command writes a deterministic batch") {
    TempDir dir;
    cli::SampleArgs args;
    args.model = "builtin:reaching-lqg";
    args.samples = 8;
    args.seed = 5;
    args.out_dir = dir.file("s1");
    REQUIRE(cli::cmd_sample(args, ctx()) == cli::kOk);
    args.out_dir = dir.file("s2");
    REQUIRE(cli::cmd_sample(args, ctx()) == cli::kOk);
    CHECK(fnv1a64_file(dir.file("s1/batch.csv")) == fnv1a64_file(dir.file("s2/batch.csv")));
    const auto meta = load_json(dir.file("s1/batch_meta.json"));
    CHECK(meta.at("sample_count") == 8);
    CHECK(meta.at("seed") == 5);
}

TEST_CASE("input errors exit with code 2 and write nothing") {
    TempDir dir;

    SUBCASE("missing model file") {
        cli::ForwardArgs args;
        args.model = dir.file("absent.json");
        args.out_dir = dir.file("out");
        CHECK(cli::cmd_forward(args, ctx()) == cli::kInputError);
        CHECK_FALSE(std::filesystem::exists(dir.file("out")));
    }
    SUBCASE("malformed truth CSV for invert") {
        std::ofstream bad(dir.file("bad.csv"));
        bad << "t,mean_1,cov_1_1\n0,not_a_number,1\n";
        bad.close();

        // A minimal valid config for the builtin model.
        IsocConfig cfg;
        cfg.kind = ModelKind::Lqg;
        cfg.s_grid.lower = Vector::Zero(8);
        cfg.s_grid.upper = Vector::Constant(8, 4.0);
        cfg.s_grid.grid_points = 2;
        cfg.s_grid.subsets = {{0, 1, 2, 3, 4, 5, 6, 7}};
        cfg.s_grid.max_iterations = 1;
        cfg.s_grid.objective.w_mean = Vector::Constant(4, 0.9);
        cfg.s_grid.objective.w_cov = Vector::Constant(4, 0.1);
        cfg.sigma_grid = cfg.s_grid;
        cfg.sigma_grid.lower = Vector::Zero(14);
        cfg.sigma_grid.upper = Vector::Constant(14, 4.0);
        cfg.sigma_grid.subsets = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13}};
        save_json(isoc_config_to_json(cfg), dir.file("cfg.json"));

        cli::InvertArgs args;
        args.model = "builtin:reaching-lqg";
        args.truth = dir.file("bad.csv");
        args.config = dir.file("cfg.json");
        args.out_dir = dir.file("out");
        CHECK(cli::cmd_invert(args, ctx()) == cli::kInputError);
        CHECK_FALSE(std::filesystem::exists(dir.file("out/result.json")));
    }
    SUBCASE("mismatched moment files for eval") {
        GroundTruthMoments a;
        a.mean = {Vector::Zero(2), Vector::Ones(2)};
        a.cov = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
        GroundTruthMoments b;
        b.mean = {Vector::Zero(1), Vector::Ones(1), Vector::Zero(1)};
        b.cov = {Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
        save_moments_csv(a, dir.file("a.csv"));
        save_moments_csv(b, dir.file("b.csv"));
        cli::EvalArgs ev;
        ev.truth = dir.file("a.csv");
        ev.predicted = dir.file("b.csv");
        CHECK(cli::cmd_eval(ev, ctx()) == cli::kInputError);
    }
}

TEST_CASE("invert runs end to end on the scalar-size budget") {
    // Tiny budget just to exercise the full command path.
    TempDir dir;
    cli::GenTruthArgs gen;
    gen.model = "builtin:reaching-lqg";
    gen.mode = "analytic";
    gen.out_dir = dir.file("t");
    REQUIRE(cli::cmd_gen_truth(gen, ctx()) == cli::kOk);

    IsocConfig cfg;
    cfg.kind = ModelKind::Lqg;
    cfg.outer_iterations = 1;
    cfg.s_grid.lower = Vector::Zero(8);
    cfg.s_grid.upper = Vector::Constant(8, 4.0);
    for (int i = 2; i < 8; ++i) {
        cfg.s_grid.upper[i] = i < 4 ? 0.4 : (i < 6 ? 0.004 : 4e-6);
    }
    cfg.s_grid.grid_points = 2;
    cfg.s_grid.subsets = {{0, 2, 4, 6}, {1, 3, 5, 7}};
    cfg.s_grid.max_iterations = 2;
    cfg.s_grid.objective.w_mean = Vector::Constant(4, 0.9);
    cfg.s_grid.objective.w_cov = Vector::Constant(4, 0.1);
    cfg.sigma_grid.lower = Vector::Zero(14);
    cfg.sigma_grid.upper = Vector::Constant(14, 4.0);
    cfg.sigma_grid.grid_points = 2;
    cfg.sigma_grid.subsets = {{0, 2, 4, 6}, {1, 3, 5, 7}, {8, 10, 12}, {9, 11, 13}};
    cfg.sigma_grid.max_iterations = 2;
    cfg.sigma_grid.objective.w_mean = Vector::Constant(4, 0.1);
    cfg.sigma_grid.objective.w_cov = Vector::Constant(4, 0.9);
    save_json(isoc_config_to_json(cfg), dir.file("cfg.json"));

    cli::InvertArgs args;
    args.model = "builtin:reaching-lqg";
    args.truth = dir.file("t/truth.csv");
    args.config = dir.file("cfg.json");
    args.out_dir = dir.file("out");
    REQUIRE(cli::cmd_invert(args, ctx()) == cli::kOk);
    CHECK(std::filesystem::exists(dir.file("out/result.json")));
    CHECK(std::filesystem::exists(dir.file("out/trace.jsonl")));
    CHECK(std::filesystem::exists(dir.file("out/predicted_measured.csv")));
    const auto result = load_json(dir.file("out/result.json"));
    CHECK(result.at("s").size() == 8);
    CHECK(result.at("sigma").size() == 136); // full flattened noise-scale vector
    CHECK(result.at("evaluations").get<long>() > 0);
}
