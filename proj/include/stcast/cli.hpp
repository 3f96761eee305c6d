#pragma once

#include "stcast/augment.hpp"
#include "stcast/em.hpp"
#include "stcast/synth.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stcast::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric error.
int exit_code_for(const std::exception& e);

struct SimulateArgs {
    synth::SyntheticSpec spec;
    std::string out_dir;
};
void cmd_simulate(const SimulateArgs& args);

struct InferArgs {
    std::string events_path;
    int num_nodes = 0;
    double horizon = 0.0; // 0 = derive from data
    std::vector<double> w_grid; // one entry = fixed-w fit
    em::EMConfig em;
    std::string prior_path; // optional graph JSON restricting the edges
    std::string out_dir;
    std::uint64_t seed = 0;
};
void cmd_infer(const InferArgs& args);

struct EvalGraphArgs {
    std::string truth_path;    // model JSON; edges are the positive entries of A
    std::string inferred_path; // model JSON
    std::string prior_path;    // optional graph JSON; default = all pairs
    std::string out_dir;
};
void cmd_eval_graph(const EvalGraphArgs& args);

struct AugmentArgs {
    std::string series_path;
    int period = 24;
    bool forward = true; // forward: cumulate + super-resolve; inverse: downsample + decumulate
    augment::PadPolicy pad = augment::PadPolicy::DropPartial;
    std::string out_dir;
};
void cmd_augment(const AugmentArgs& args);

struct TrainArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
};
void cmd_train(const TrainArgs& args);

struct ForecastArgs {
    std::string checkpoint_path;
    std::string series_path;
    std::string graph_path;
    int test_days = 0; // 0 = use the value stored in the checkpoint
    std::string out_dir;
};
void cmd_forecast(const ForecastArgs& args);

struct EvaluateArgs {
    std::string forecast_dir;
    int period = 24;
    int max_delay = 3;
    int max_threshold = 3;
    bool with_spectrum = false;
    std::string out_dir;
};
void cmd_evaluate(const EvaluateArgs& args);

struct Table1Args {
    synth::Table1Config cfg;
    std::string out_dir;
    bool write_roc = true;
};
void cmd_table1(const Table1Args& args);

} // namespace stcast::cli
