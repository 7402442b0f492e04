#include <CLI11.hpp>

#include "isoc/cli.hpp"
#include "isoc/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Forward and inverse linear-quadratic stochastic optimal control"};
    app.require_subcommand(1);

    isoc::cli::Context ctx;
    ctx.argv.assign(argv, argv + argc);
    ctx.workers = isoc::default_workers();
    app.add_option("--workers", ctx.workers, "parallel worker cap (default: ISOC_WORKERS or cores)");

    isoc::cli::GenTruthArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-truth", "generate ground-truth moment trajectories");
    cmd_gen->add_option("--model", gen.model, "model JSON file or builtin:<name>")->required();
    cmd_gen->add_option("--mode", gen.mode, "analytic | sampled");
    cmd_gen->add_option("--kind", gen.kind, "auto | lqg | lqs");
    cmd_gen->add_option("--samples", gen.samples, "rollout count in sampled mode");
    cmd_gen->add_option("--seed", gen.seed, "RNG seed in sampled mode");
    cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();

    isoc::cli::ForwardArgs fwd;
    auto* cmd_fwd = app.add_subcommand("forward", "solve gains and propagate moments");
    cmd_fwd->add_option("--model", fwd.model, "model JSON file or builtin:<name>")->required();
    cmd_fwd->add_option("--kind", fwd.kind, "auto | lqg | lqs");
    cmd_fwd->add_option("--out", fwd.out_dir, "output directory")->required();

    isoc::cli::InvertArgs inv;
    auto* cmd_inv = app.add_subcommand("invert", "recover cost weights and noise scales");
    cmd_inv->add_option("--model", inv.model, "model JSON file or builtin:<name>")->required();
    cmd_inv->add_option("--truth", inv.truth, "ground-truth moments CSV")->required();
    cmd_inv->add_option("--config", inv.config, "solver configuration JSON")->required();
    cmd_inv->add_option("--out", inv.out_dir, "output directory")->required();

    isoc::cli::EvalArgs ev;
    auto* cmd_ev = app.add_subcommand("eval", "VAF table and J_ISOC for two moment files");
    cmd_ev->add_option("--truth", ev.truth, "ground-truth moments CSV")->required();
    cmd_ev->add_option("--pred", ev.predicted, "predicted moments CSV")->required();
    cmd_ev->add_option("--out", ev.out_dir, "optional output directory");

    isoc::cli::SampleArgs smp;
    auto* cmd_smp = app.add_subcommand("sample", "simulate closed-loop trajectories");
    cmd_smp->add_option("--model", smp.model, "model JSON file or builtin:<name>")->required();
    cmd_smp->add_option("--kind", smp.kind, "auto | lqg | lqs");
    cmd_smp->add_option("--samples", smp.samples, "rollout count")->required();
    cmd_smp->add_option("--seed", smp.seed, "RNG seed");
    cmd_smp->add_option("--out", smp.out_dir, "output directory")->required();

    // Lets --workers appear after the subcommand name as well.
    for (auto* sub : {cmd_gen, cmd_fwd, cmd_inv, cmd_ev, cmd_smp})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (cmd_gen->parsed())
        return isoc::cli::cmd_gen_truth(gen, ctx);
    if (cmd_fwd->parsed())
        return isoc::cli::cmd_forward(fwd, ctx);
    if (cmd_inv->parsed())
        return isoc::cli::cmd_invert(inv, ctx);
    if (cmd_ev->parsed())
        return isoc::cli::cmd_eval(ev, ctx);
    if (cmd_smp->parsed())
        return isoc::cli::cmd_sample(smp, ctx);
    return isoc::cli::kInputError;
}
