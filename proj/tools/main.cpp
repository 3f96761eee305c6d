#include "stcast/cli.hpp"
#include "stcast/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace stcast;

int run(int argc, char** argv) {
    CLI::App app{"Self-exciting point process modeling and graph-structured forecasting "
                 "for sparse spatio-temporal event data"};
    app.require_subcommand(1);

    // simulate ---------------------------------------------------------
    cli::SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Sample a random excitation graph and simulate events");
    simulate->add_option("--num-nodes", sim.spec.num_nodes, "Node count")->capture_default_str();
    simulate->add_option("--sparsity", sim.spec.sparsity, "Edge keep probability")->capture_default_str();
    simulate->add_option("--mu-min", sim.spec.mu_min)->capture_default_str();
    simulate->add_option("--mu-max", sim.spec.mu_max)->capture_default_str();
    simulate->add_option("--a-min", sim.spec.a_min)->capture_default_str();
    simulate->add_option("--a-max", sim.spec.a_max)->capture_default_str();
    simulate->add_option("--w", sim.spec.w, "Kernel rate (1/hours)")->capture_default_str();
    simulate->add_option("--horizon", sim.spec.horizon, "Hours")->capture_default_str();
    simulate->add_flag("--no-self-loops", [&](std::int64_t) { sim.spec.include_self_loops = false; },
                       "Exclude diagonal edges");
    simulate->add_option("--seed", sim.spec.seed)->capture_default_str();
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();

    // infer ------------------------------------------------------------
    cli::InferArgs inf;
    double infer_w = 0.0;
    auto* infer = app.add_subcommand("infer", "EM inference of the excitation model from events");
    infer->add_option("--events", inf.events_path, "Event CSV (time,node)")->required();
    infer->add_option("--num-nodes", inf.num_nodes)->required();
    infer->add_option("--horizon", inf.horizon, "Override the observation horizon");
    infer->add_option("--w", infer_w, "Fixed kernel rate");
    infer->add_option("--w-grid", inf.w_grid, "Comma-separated rates for grid search")->delimiter(',');
    infer->add_option("--lambda", inf.em.l1_lambda, "L1 penalty")->capture_default_str();
    infer->add_option("--tol", inf.em.tol)->capture_default_str();
    infer->add_option("--max-iters", inf.em.max_iters)->capture_default_str();
    infer->add_option("--trunc", inf.em.truncation_horizon, "E-step window (hours, 0 = 10/w)");
    infer->add_option("--prior", inf.prior_path, "Graph JSON restricting the candidate edges");
    infer->add_option("--seed", inf.seed)->capture_default_str();
    infer->add_option("--out", inf.out_dir)->required();

    // eval-graph --------------------------------------------------------
    cli::EvalGraphArgs eval_graph;
    auto* evalg = app.add_subcommand("eval-graph", "ROC/AUC of an inferred model against the truth");
    evalg->add_option("--truth", eval_graph.truth_path)->required();
    evalg->add_option("--inferred", eval_graph.inferred_path)->required();
    evalg->add_option("--prior", eval_graph.prior_path, "Candidate edge set (graph JSON)");
    evalg->add_option("--out", eval_graph.out_dir)->required();

    // augment ------------------------------------------------------------
    cli::AugmentArgs aug;
    std::string direction = "forward";
    std::string pad = "drop";
    auto* augment_cmd = app.add_subcommand("augment", "Cumulate + super-resolve a series (or invert)");
    augment_cmd->add_option("--series", aug.series_path)->required();
    augment_cmd->add_option("--period", aug.period, "Steps per day")->capture_default_str();
    augment_cmd->add_option("--direction", direction, "forward | inverse")->capture_default_str();
    augment_cmd->add_option("--pad", pad, "drop | zero | error (partial trailing day)")->capture_default_str();
    augment_cmd->add_option("--out", aug.out_dir)->required();

    // train ---------------------------------------------------------------
    cli::TrainArgs train;
    std::uint64_t train_seed = 0;
    bool train_seed_given = false;
    auto* train_cmd = app.add_subcommand("train", "Train a forecasting model from a config file");
    train_cmd->add_option("--config", train.config_path, "Training config JSON")->required();
    train_cmd->add_option("--seed", train_seed, "Override the config seed")->each([&](const std::string&) {
        train_seed_given = true;
    });
    train_cmd->add_option("--out", train.out_dir)->required();

    // forecast --------------------------------------------------------------
    cli::ForecastArgs fc;
    auto* forecast_cmd = app.add_subcommand("forecast", "One-step-ahead forecast from a checkpoint");
    forecast_cmd->add_option("--checkpoint", fc.checkpoint_path)->required();
    forecast_cmd->add_option("--series", fc.series_path)->required();
    forecast_cmd->add_option("--graph", fc.graph_path)->required();
    forecast_cmd->add_option("--test-days", fc.test_days, "0 = from checkpoint")->capture_default_str();
    forecast_cmd->add_option("--out", fc.out_dir)->required();

    // evaluate ----------------------------------------------------------------
    cli::EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Metrics for a forecast directory");
    evaluate_cmd->add_option("--forecast", ev.forecast_dir)->required();
    evaluate_cmd->add_option("--period", ev.period)->capture_default_str();
    evaluate_cmd->add_option("--max-delay", ev.max_delay)->capture_default_str();
    evaluate_cmd->add_option("--max-threshold", ev.max_threshold)->capture_default_str();
    evaluate_cmd->add_flag("--spectrum", ev.with_spectrum, "Also emit per-node periodograms");
    evaluate_cmd->add_option("--out", ev.out_dir)->required();

    // table1 -------------------------------------------------------------------
    cli::Table1Args t1;
    std::vector<std::string> prior_names{"null", "gt+200", "gt+400"};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    auto* table_cmd = app.add_subcommand("table1", "Synthetic graph-recovery AUC grid");
    table_cmd->add_option("--num-nodes", t1.cfg.base.num_nodes)->capture_default_str();
    table_cmd->add_option("--horizon", t1.cfg.base.horizon)->capture_default_str();
    table_cmd->add_option("--w", t1.cfg.base.w)->capture_default_str();
    table_cmd->add_option("--lambda", t1.cfg.em.l1_lambda)->capture_default_str();
    table_cmd->add_option("--max-iters", t1.cfg.em.max_iters)->capture_default_str();
    table_cmd->add_option("--sparsities", t1.cfg.sparsities)->delimiter(',')->capture_default_str();
    table_cmd->add_option("--priors", prior_names, "null or gt+<K>")->delimiter(',')->capture_default_str();
    table_cmd->add_option("--seeds", seeds)->delimiter(',')->capture_default_str();
    table_cmd->add_option("--threads", t1.cfg.threads, "0 = all cores")->capture_default_str();
    table_cmd->add_flag("--no-roc", [&](std::int64_t) { t1.write_roc = false; }, "Skip ROC point files");
    table_cmd->add_option("--out", t1.out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    if (*simulate) cli::cmd_simulate(sim);
    if (*infer) {
        if (infer_w > 0.0) inf.w_grid.insert(inf.w_grid.begin(), infer_w);
        cli::cmd_infer(inf);
    }
    if (*evalg) cli::cmd_eval_graph(eval_graph);
    if (*augment_cmd) {
        if (direction == "forward") aug.forward = true;
        else if (direction == "inverse") aug.forward = false;
        else throw ConfigError("--direction must be forward or inverse");
        if (pad == "drop") aug.pad = augment::PadPolicy::DropPartial;
        else if (pad == "zero") aug.pad = augment::PadPolicy::ZeroPad;
        else if (pad == "error") aug.pad = augment::PadPolicy::Error;
        else throw ConfigError("--pad must be drop, zero or error");
        cli::cmd_augment(aug);
    }
    if (*train_cmd) {
        if (train_seed_given) train.seed_override = train_seed;
        cli::cmd_train(train);
    }
    if (*forecast_cmd) cli::cmd_forecast(fc);
    if (*evaluate_cmd) cli::cmd_evaluate(ev);
    if (*table_cmd) {
        t1.cfg.priors.clear();
        for (const std::string& p : prior_names) {
            if (p == "null" || p == "Null") {
                t1.cfg.priors.emplace_back(synth::PriorKind::Null, 0);
            } else if (p.rfind("gt+", 0) == 0 || p.rfind("GT+", 0) == 0) {
                t1.cfg.priors.emplace_back(synth::PriorKind::GroundTruthPlusK, std::stoi(p.substr(3)));
            } else {
                throw ConfigError("--priors entries must be 'null' or 'gt+<K>'");
            }
        }
        t1.cfg.seeds = seeds;
        cli::cmd_table1(t1);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return stcast::cli::exit_code_for(e);
    }
}
