#pragma once

#include "stcast/em.hpp"
#include "stcast/events.hpp"
#include "stcast/hawkes.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stcast::synth {

enum class PriorKind { Null, GroundTruthPlusK };

struct SyntheticSpec {
    int num_nodes = 30;
    double sparsity = 0.2;    // independent keep probability per directed edge
    double mu_min = 0.0;
    double mu_max = 0.1;
    double a_min = 0.02;
    double a_max = 0.1;
    double w = 1.0;           // kernel rate used for simulation and inference
    double horizon = 3e4;     // hours
    std::uint64_t seed = 1;
    bool include_self_loops = true;
    PriorKind prior = PriorKind::Null;
    int prior_extra_edges = 0; // K for GroundTruthPlusK
};

struct GeneratedProblem {
    hawkes::HawkesModel truth;
    em::EdgeMask truth_edges; // entries of A that were sampled as present
    EventSequence events;
};

struct RecoveryResult {
    std::vector<std::pair<double, double>> roc; // (FPR, TPR), monotone in FPR
    double auc = 0.0;
    Eigen::MatrixXd inferred;
    em::EdgeMask truth;
};

// Random graph with the given edge-keep probability, uniform parameters in
// the configured ranges, rescaled to spectral radius 0.9 whenever the draw
// lands at 0.95 or above, then simulated to the horizon. Deterministic per
// seed.
GeneratedProblem generate(const SyntheticSpec& spec);

// Prior mask for inference: everything for Null, truth plus K random
// non-truth directed edges otherwise (deterministic per seed).
em::EdgeMask make_prior_mask(const em::EdgeMask& truth_edges, PriorKind prior, int extra_edges,
                             std::uint64_t seed);

// Threshold sweep over the inferred coefficients restricted to the candidate
// set (the prior mask). Positives are the ground-truth edges inside the
// candidate set; AUC by the trapezoid rule.
RecoveryResult evaluate_recovery(const em::EdgeMask& truth_edges, const Eigen::MatrixXd& inferred,
                                 const em::EdgeMask& candidate_mask);

struct Table1Config {
    SyntheticSpec base;                       // seed/sparsity/prior overridden per cell
    std::vector<double> sparsities{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<std::pair<PriorKind, int>> priors{
        {PriorKind::Null, 0}, {PriorKind::GroundTruthPlusK, 200}, {PriorKind::GroundTruthPlusK, 400}};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    em::EMConfig em;
    int threads = 0; // 0 = hardware concurrency
};

struct Table1Result {
    std::vector<std::string> prior_labels;                    // one per row
    std::vector<double> sparsities;                           // one per column
    Eigen::MatrixXd mean_auc;                                 // rows x cols
    std::vector<std::vector<std::vector<double>>> seed_aucs;  // [row][col][seed]
    std::vector<std::vector<RecoveryResult>> first_seed;      // [row][col], for ROC export
};

Table1Result run_table1(const Table1Config& cfg);

void save_table1(const Table1Result& table, const std::string& path);
void save_roc(const RecoveryResult& result, const std::string& path);

} // namespace stcast::synth
