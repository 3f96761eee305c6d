#pragma once

#include "stcast/events.hpp"
#include "stcast/graph.hpp"
#include "stcast/hawkes.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace stcast::em {

using EdgeMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct EMConfig {
    double l1_lambda = 0.01;
    int max_iters = 500;
    double tol = 1e-5;                // max relative parameter change
    // Parent window for the E-step; <= 0 selects the default 10/w (kernel
    // mass beyond that is about 4.5e-5). Use +infinity for the exact E-step.
    double truncation_horizon = 0.0;
    std::optional<EdgeMask> prior_edges; // allowed entries of A; absent = all
};

struct EMState {
    hawkes::HawkesModel model;
    int iterations = 0;
    bool converged = false;
    std::vector<double> penalized_nll;   // -L + lambda |A|_1 per iterate
    std::vector<double> log_lik;         // unpenalized L per iterate
    std::vector<double> max_param_delta; // stopping metric per iterate
};

// Sufficient statistics of one E-step: for each event, the probability mass
// split between its own background rate and each candidate parent, already
// aggregated per node / per directed node pair.
struct EStepStats {
    Eigen::VectorXd background; // sum of p_ii per node
    Eigen::MatrixXd pair;       // sum of p_ij, (child node, parent node)
    std::size_t event_count = 0;
};

EStepStats e_step(const hawkes::HawkesModel& model, const std::vector<EventSequence>& seqs,
                  double truncation_horizon);

// One multiplicative update followed by the soft threshold
// shrink(x) = max(x - lambda, 0). Entries outside the prior mask stay zero.
hawkes::HawkesModel m_step(const EStepStats& stats, const std::vector<EventSequence>& seqs,
                           const hawkes::HawkesModel& model, double l1_lambda,
                           const std::optional<EdgeMask>& prior_edges = std::nullopt);

EMState fit(const std::vector<EventSequence>& seqs, double w, const EMConfig& cfg,
            const std::optional<hawkes::HawkesModel>& init = std::nullopt);

struct GridSearchResult {
    double best_w = 0.0;
    std::vector<double> log_lik; // unpenalized, one per grid entry (NaN = failed fit)
    std::vector<EMState> fits;
};

GridSearchResult grid_search_w(const std::vector<EventSequence>& seqs,
                               const std::vector<double>& w_grid, const EMConfig& cfg);

struct StwgResult {
    WeightedGraph graph;
    bool empty_model = false; // A was identically zero
};

// Keeps the top ceil(s * U(U-1)) positive off-diagonal entries of A (ties by
// larger value, then lower flat index) and rescales them by the global
// maximum of A. `knn_init`, when given, first restricts each node to its k
// strongest incoming entries.
StwgResult build_stwg(const hawkes::HawkesModel& model, double target_sparsity,
                      std::optional<int> knn_init = std::nullopt);

void save_iteration_log(const EMState& state, const std::string& path);

} // namespace stcast::em
