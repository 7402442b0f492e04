#include "isoc/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "isoc/io.hpp"

namespace isoc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ModelKind resolve_kind(const std::string& kind, const ModelBundle& bundle) {
    if (kind == "lqg")
        return ModelKind::Lqg;
    if (kind == "lqs")
        return ModelKind::Lqs;
    if (kind == "auto")
        return bundle.noise.F.empty() && bundle.noise.G.empty() ? ModelKind::Lqg
                                                                : ModelKind::Lqs;
    throw InvalidConfig("unknown model kind: " + kind);
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty())
        throw InvalidConfig("--out directory is required");
    fs::create_directories(dir);
}

json input_entry(const std::string& path) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(path)));
    return json{{"path", path}, {"fnv1a64", buf}};
}

// Every command drops a manifest sufficient to re-run it: the exact
// argument vector, input hashes, and the effective configuration.
void write_manifest(const std::string& dir, const std::string& command, const Context& ctx,
                    const json& inputs, const json& outputs, const json& config,
                    double wall_seconds) {
    save_json(json{{"command", command},
                   {"argv", ctx.argv},
                   {"workers", ctx.workers},
                   {"inputs", inputs},
                   {"outputs", outputs},
                   {"config", config},
                   {"tool_version", kToolVersion},
                   {"wall_seconds", wall_seconds}},
              out_path(dir, "manifest.json"));
}

json model_inputs(const std::string& model_spec) {
    json inputs = json::array();
    if (model_spec.rfind("builtin:", 0) != 0)
        inputs.push_back(input_entry(model_spec));
    return inputs;
}

// Tidy per-channel export (channel, t, mean, variance, source) for
// plotting tools.
void append_plot_rows(std::ofstream& f, const GroundTruthMoments& moments,
                      const std::string& source) {
    char buf[32];
    for (std::size_t t = 0; t < moments.mean.size(); ++t)
        for (int i = 0; i < moments.channels(); ++i) {
            f << "x_" << (i + 1) << "," << t << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", moments.mean[t][i]);
            f << buf << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", moments.cov[t](i, i));
            f << buf << "," << source << "\n";
        }
}

void save_plot_csv(const std::string& path,
                   const std::vector<std::pair<std::string, const GroundTruthMoments*>>& series) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    f << "channel,t,mean,variance,source\n";
    for (const auto& [source, moments] : series)
        append_plot_rows(f, *moments, source);
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}

struct ForwardOutputs {
    GainSchedule gains;
    MomentTrajectory moments;
    json diagnostics;
};

ForwardOutputs solve_forward(const ModelBundle& bundle, ModelKind kind) {
    const CostMatrices cm = assemble_cost(bundle.cost, bundle.system.n(), bundle.system.m());
    const NoiseOperators ops = assemble_noise(bundle.noise, bundle.system.B, bundle.system.H);
    ForwardOutputs out;
    if (kind == ModelKind::Lqg) {
        out.gains = lqg_gains(bundle.system, cm, ops);
        out.moments = lqg_propagate_moments(bundle.system, out.gains, ops);
        out.diagnostics = json{{"kind", "lqg"}};
    } else {
        const LqsSolution sol = lqs_gains(bundle.system, cm, ops);
        out.gains = sol.gains;
        out.moments = lqs_propagate_moments(bundle.system, out.gains, ops);
        out.diagnostics = json{{"kind", "lqs"},
                               {"iterations", sol.state.iterations},
                               {"gain_delta", sol.state.gain_delta},
                               {"converged", sol.state.converged}};
    }
    return out;
}

} // namespace

int cmd_gen_truth(const GenTruthArgs& args, const Context& ctx) {
    return run_guarded([&] {
        const auto start = std::chrono::steady_clock::now();
        const ModelBundle bundle = load_model(args.model);
        const ModelKind kind = resolve_kind(args.kind, bundle);
        if (args.mode != "analytic" && args.mode != "sampled")
            throw InvalidConfig("mode must be 'analytic' or 'sampled'");

        const auto fwd = solve_forward(bundle, kind);
        GroundTruthMoments truth;
        if (args.mode == "analytic") {
            truth = fwd.moments.measured(bundle.system.M);
        } else {
            const NoiseOperators ops =
                assemble_noise(bundle.noise, bundle.system.B, bundle.system.H);
            const TrajectoryBatch batch = sample_trajectories(
                bundle.system, fwd.gains, ops, args.samples, args.seed, kind, ctx.workers);
            truth = estimate_moments(batch);
        }

        ensure_out_dir(args.out_dir);
        save_moments_csv(truth, out_path(args.out_dir, "truth.csv"));
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start).count();
        write_manifest(args.out_dir, "gen-truth", ctx, model_inputs(args.model),
                       json::array({out_path(args.out_dir, "truth.csv")}),
                       json{{"model", args.model},
                            {"mode", args.mode},
                            {"kind", kind == ModelKind::Lqg ? "lqg" : "lqs"},
                            {"samples", args.samples},
                            {"seed", args.seed}},
                       wall);
        return kOk;
    });
}

int cmd_forward(const ForwardArgs& args, const Context& ctx) {
    return run_guarded([&] {
        const auto start = std::chrono::steady_clock::now();
        const ModelBundle bundle = load_model(args.model);
        const ModelKind kind = resolve_kind(args.kind, bundle);
        const auto fwd = solve_forward(bundle, kind);
        const GroundTruthMoments measured = fwd.moments.measured(bundle.system.M);

        ensure_out_dir(args.out_dir);
        save_trajectory_moments_csv(fwd.moments, out_path(args.out_dir, "moments_full.csv"));
        save_moments_csv(measured, out_path(args.out_dir, "moments_measured.csv"));
        save_json(gains_to_json(fwd.gains), out_path(args.out_dir, "gains.json"));
        save_json(fwd.diagnostics, out_path(args.out_dir, "diagnostics.json"));
        save_plot_csv(out_path(args.out_dir, "plot.csv"), {{"model", &measured}});
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start).count();
        write_manifest(args.out_dir, "forward", ctx, model_inputs(args.model),
                       json::array({out_path(args.out_dir, "moments_full.csv"),
                                    out_path(args.out_dir, "moments_measured.csv"),
                                    out_path(args.out_dir, "gains.json"),
                                    out_path(args.out_dir, "diagnostics.json"),
                                    out_path(args.out_dir, "plot.csv")}),
                       json{{"model", args.model},
                            {"kind", kind == ModelKind::Lqg ? "lqg" : "lqs"}},
                       wall);
        return kOk;
    });
}

int cmd_invert(const InvertArgs& args, const Context& ctx) {
    return run_guarded([&] {
        const ModelBundle bundle = load_model(args.model);
        const GroundTruthMoments truth = load_moments_csv(args.truth);
        const IsocConfig cfg = load_isoc_config(args.config);

        const IsocResult result = isoc_solve(truth, bundle, cfg, ctx.workers);

        // Predicted measured moments at the recovered parameters.
        ModelBundle fitted = bundle;
        fitted.cost.s = result.s;
        fitted.noise = with_noise_scales(bundle.noise, result.sigma);
        const auto fwd = solve_forward(fitted, cfg.kind);
        const GroundTruthMoments predicted = fwd.moments.measured(bundle.system.M);

        ensure_out_dir(args.out_dir);
        save_json(isoc_result_to_json(result), out_path(args.out_dir, "result.json"));
        save_json(fit_report_to_json(result.fit), out_path(args.out_dir, "fit.json"));
        save_trace_jsonl(result.trace, out_path(args.out_dir, "trace.jsonl"));
        save_moments_csv(predicted, out_path(args.out_dir, "predicted_measured.csv"));
        save_plot_csv(out_path(args.out_dir, "plot.csv"),
                      {{"truth", &truth}, {"fit", &predicted}});
        write_manifest(args.out_dir, "invert", ctx,
                       [&] {
                           json inputs = model_inputs(args.model);
                           inputs.push_back(input_entry(args.truth));
                           inputs.push_back(input_entry(args.config));
                           return inputs;
                       }(),
                       json::array({out_path(args.out_dir, "result.json"),
                                    out_path(args.out_dir, "fit.json"),
                                    out_path(args.out_dir, "trace.jsonl"),
                                    out_path(args.out_dir, "predicted_measured.csv"),
                                    out_path(args.out_dir, "plot.csv")}),
                       isoc_config_to_json(cfg), result.wall_seconds);
        return kOk;
    });
}

int cmd_eval(const EvalArgs& args, const Context& ctx) {
    return run_guarded([&] {
        const auto start = std::chrono::steady_clock::now();
        const GroundTruthMoments truth = load_moments_csv(args.truth);
        const GroundTruthMoments predicted = load_moments_csv(args.predicted);
        if (truth.mean.size() != predicted.mean.size() ||
            truth.channels() != predicted.channels())
            throw InvalidConfig("truth and predicted moments do not match in shape");

        const int nbar = truth.channels();
        ObjectiveConfig obj;
        obj.w_mean = Vector::Ones(nbar);
        obj.w_cov = Vector::Ones(nbar);
        obj.mode = CovMode::Diagonal;

        FitReport fit;
        fit.m_vaf = vaf_mean(predicted.mean, truth);
        fit.omega_vaf = vaf_cov(predicted.cov, truth);
        fit.mode = obj.mode;
        fit.score = fit_score(fit.m_vaf, fit.omega_vaf, obj);

        std::printf("channel   mean VAF     var VAF\n");
        for (int i = 0; i < nbar; ++i)
            std::printf("x_%-6d %10.6f  %10.6f\n", i + 1, fit.m_vaf[i], fit.omega_vaf(i, i));
        std::printf("J_ISOC = %.6f\n", fit.score);

        if (!args.out_dir.empty()) {
            ensure_out_dir(args.out_dir);
            save_json(fit_report_to_json(fit), out_path(args.out_dir, "fit.json"));
            const double wall = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start).count();
            write_manifest(args.out_dir, "eval", ctx,
                           json::array({input_entry(args.truth), input_entry(args.predicted)}),
                           json::array({out_path(args.out_dir, "fit.json")}), json::object(),
                           wall);
        }
        return kOk;
    });
}

int cmd_sample(const SampleArgs& args, const Context& ctx) {
    return run_guarded([&] {
        const auto start = std::chrono::steady_clock::now();
        const ModelBundle bundle = load_model(args.model);
        const ModelKind kind = resolve_kind(args.kind, bundle);
        const auto fwd = solve_forward(bundle, kind);
        const NoiseOperators ops = assemble_noise(bundle.noise, bundle.system.B, bundle.system.H);
        const TrajectoryBatch batch = sample_trajectories(
            bundle.system, fwd.gains, ops, args.samples, args.seed, kind, ctx.workers);

        ensure_out_dir(args.out_dir);
        save_batch_csv(batch, out_path(args.out_dir, "batch.csv"),
                       out_path(args.out_dir, "batch_meta.json"));
        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start).count();
        write_manifest(args.out_dir, "sample", ctx, model_inputs(args.model),
                       json::array({out_path(args.out_dir, "batch.csv"),
                                    out_path(args.out_dir, "batch_meta.json")}),
                       json{{"model", args.model},
                            {"kind", kind == ModelKind::Lqg ? "lqg" : "lqs"},
                            {"samples", args.samples},
                            {"seed", args.seed}},
                       wall);
        return kOk;
    });
}

} // namespace isoc::cli
