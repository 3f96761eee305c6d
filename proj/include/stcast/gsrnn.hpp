#pragma once

#include "stcast/events.hpp"
#include "stcast/graph.hpp"
#include "stcast/neural.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stcast::gsrnn {

struct GsrnnConfig {
    std::vector<int> input_units{64};
    std::vector<int> edge_units{64};
    std::vector<int> node_units{128};
    double dropout = 0.0;
    std::vector<int> lags{2, 3, 4, 5, 6, 7, 8, 9};
    bool skip_nearest = true;
    // Ordered class pairs (k, k) get their own edge RNN when intra-class
    // edges exist; clear this to ignore such edges instead.
    bool intra_class_edges = true;
    // Node RNN is shared per class by default; set for one per node.
    bool per_node_node_rnn = false;
};

// Per-class input RNNs, per ordered-class-pair edge RNNs (one per pair
// realized by at least one graph edge), per-class node RNNs with scalar
// heads. The node RNN of class k consumes, at every lag step, the
// concatenation of the class input RNN output and one slot per source class
// in `edge_sources[k]` (ascending); a node without in-edges from a slot's
// class contributes zeros there, keeping the width fixed.
struct GsrnnModel {
    GsrnnConfig cfg;
    int num_classes = 0;
    std::vector<neural::CascadeNet> input_rnns;                 // per class, no head
    std::map<std::pair<int, int>, neural::CascadeNet> edge_rnns; // (dst class, src class)
    std::vector<std::vector<int>> edge_sources;                 // per class, ascending
    std::vector<neural::CascadeNet> node_rnns;                  // per class (or per node)
    // Per-node max normalization fit on the training segment; empty means
    // unit scale. Training and forecasting run in normalized units and
    // rescale on output.
    std::vector<double> node_scale;

    int node_rnn_index(int node, int node_class) const {
        return cfg.per_node_node_rnn ? node : node_class;
    }
};

GsrnnModel make_model(const WeightedGraph& graph, const GsrnnConfig& cfg, Rng& rng);

// Quantile classing: nodes sorted by total count (ascending, ties by index)
// and split into K groups of near-equal size, remainder going to the lower
// groups. Class 0 holds the lowest counts.
std::vector<int> partition_nodes(const NodeSeries& series, int num_classes);

// 4-neighbor grid, both directions, every weight 1/4.
WeightedGraph lattice_graph(int rows, int cols);

// Weighted sum of the in-neighbor inputs of `node` restricted to neighbors
// of `source_class`; zero vector when there are none. `node_inputs` must
// hold one equal-length vector per graph node.
Eigen::VectorXd pool_neighbors(const WeightedGraph& graph, int node, int source_class,
                               const std::vector<Eigen::VectorXd>& node_inputs);

// One forward pass for every node given per-node lag-window sequences
// (each element: one vector per lag step). Eval mode unless rng is given.
Eigen::VectorXd gsrnn_forward(const GsrnnModel& model, const WeightedGraph& graph,
                              const std::vector<std::vector<Eigen::VectorXd>>& lag_seqs,
                              bool train_mode = false, Rng* rng = nullptr);

// Same, reading the lag windows that end at target index `t` from a series.
Eigen::VectorXd gsrnn_forward_at(const GsrnnModel& model, const WeightedGraph& graph,
                                 const NodeSeries& series, long t);

enum class SubsampleMode { Uniform, ErrorProportional };

struct GsrnnTrainConfig {
    neural::TrainConfig base;
    double subsample_fraction = 1.0;
    SubsampleMode subsample_mode = SubsampleMode::Uniform;
    long train_end = -1; // exclusive bound on target indices; -1 = whole series
};

struct TrainResult {
    std::vector<double> loss_history;            // per-epoch mean MSE
    std::vector<std::size_t> sampled_node_count; // per epoch
};

// Minibatch ADAM over (node, window) samples of a super-resolved series,
// drawing the configured node fraction per class each epoch. Deterministic
// per seed.
TrainResult train(GsrnnModel& model, const WeightedGraph& graph, const NodeSeries& sr_series,
                  const GsrnnTrainConfig& cfg);

struct ForecastRun {
    long sr_boundary = 0;  // first test index on the super-resolved grid
    long day_boundary = 0; // first test index on the day-slot grid
    int period = 0;        // raw steps per day (T)
    std::vector<std::vector<double>> pred_cdf;   // [node][sr slot in test range]
    std::vector<std::vector<double>> actual_cdf;
    std::vector<std::vector<double>> pred_pdf;   // [node][day slot in test range]
    std::vector<std::vector<double>> actual_pdf;
    double rmse_cdf = 0.0; // macro average over nodes, even (true CDF) offsets
    double rmse_pdf = 0.0;
    std::vector<double> class_rmse_cdf;
    std::vector<double> class_rmse_pdf;
};

// One-step-ahead rolling forecast over the last `test_days` day blocks,
// always consuming exact historical values. PDF-scale output applies the
// inverse augmentation (predicted cumulative minus previous actual
// cumulative within the day).
ForecastRun forecast(const GsrnnModel& model, const WeightedGraph& graph,
                     const NodeSeries& sr_series, int test_days);

// Slot-of-period mean of the training segment (global train mean for slots
// never seen). Returns predictions for t in [train_len, len).
std::vector<double> historical_average(const std::vector<double>& series, std::size_t train_len,
                                       int period);

// Nearest-window pattern matcher: Euclidean match of the most recent
// `window` values against all training windows, predicting the mean
// successor of the k best (ties to the earlier index).
std::vector<double> knn_predict(const std::vector<double>& series, std::size_t train_len, int k,
                                int window);

nlohmann::json model_to_json(const GsrnnModel& model);
GsrnnModel model_from_json(const nlohmann::json& j);
void save_checkpoint(const GsrnnModel& model, const std::string& path);
GsrnnModel load_checkpoint(const std::string& path);

} // namespace stcast::gsrnn
