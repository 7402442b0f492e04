#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace isoc::cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kNumericalError = 3;

// Invocation context recorded into the run manifest.
struct Context {
    std::vector<std::string> argv;
    int workers = 1;
};

struct GenTruthArgs {
    std::string model;
    std::string mode = "analytic"; // analytic | sampled
    std::string kind = "auto";     // auto | lqg | lqs
    int samples = 5000;
    std::uint64_t seed = 1;
    std::string out_dir;
};

struct ForwardArgs {
    std::string model;
    std::string kind = "auto";
    std::string out_dir;
};

struct InvertArgs {
    std::string model;
    std::string truth;
    std::string config;
    std::string out_dir;
};

struct EvalArgs {
    std::string truth;
    std::string predicted;
    std::string out_dir; // optional
};

struct SampleArgs {
    std::string model;
    std::string kind = "auto";
    int samples = 100;
    std::uint64_t seed = 1;
    std::string out_dir;
};

int cmd_gen_truth(const GenTruthArgs& args, const Context& ctx);
int cmd_forward(const ForwardArgs& args, const Context& ctx);
int cmd_invert(const InvertArgs& args, const Context& ctx);
int cmd_eval(const EvalArgs& args, const Context& ctx);
int cmd_sample(const SampleArgs& args, const Context& ctx);

} // namespace isoc::cli
