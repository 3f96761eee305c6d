#pragma once

#include "stcast/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace stcast::neural {

// One LSTM layer. Gate blocks are stacked row-wise in the order
// [input, forget, cell, output], each hidden_dim rows.
struct LstmLayer {
    int input_dim = 0;
    int hidden_dim = 0;
    Eigen::MatrixXd w_in;  // 4H x D
    Eigen::MatrixXd w_rec; // 4H x H
    Eigen::VectorXd bias;  // 4H
};

struct Dense {
    Eigen::MatrixXd weight; // out x in
    Eigen::VectorXd bias;
};

// Stack of LSTM layers, optionally topped by an affine head on the final
// hidden state. Dropout (inverted scaling) applies to every layer output in
// train mode only.
struct CascadeNet {
    std::vector<LstmLayer> layers;
    std::optional<Dense> head;
    double dropout = 0.0;

    int input_dim() const { return layers.empty() ? 0 : layers.front().input_dim; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().hidden_dim; }
};

// Uniform +-1/sqrt(fan_in) weights, forget-gate bias +1, everything else 0.
CascadeNet make_cascade(int input_dim, const std::vector<int>& hidden_dims, int head_dim,
                        double dropout, Rng& rng);

struct LayerCache {
    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> gates;  // post-activation, stacked 4H
    std::vector<Eigen::VectorXd> cell;
    std::vector<Eigen::VectorXd> tanh_cell;
    std::vector<Eigen::VectorXd> hidden;
    std::vector<Eigen::VectorXd> outputs; // after dropout
    std::vector<Eigen::VectorXd> mask;    // empty when not training
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    Eigen::VectorXd head_input;
    Eigen::VectorXd head_output;
};

// Runs the full stack over the input sequence and returns the output
// sequence of the last layer. `rng` is only touched when train_mode draws
// dropout masks. Pass a cache to enable backward().
std::vector<Eigen::VectorXd> run_cascade(const CascadeNet& net,
                                         const std::vector<Eigen::VectorXd>& inputs,
                                         bool train_mode = false, Rng* rng = nullptr,
                                         ForwardCache* cache = nullptr);

// Scalar prediction through the head from the final output.
double predict(const CascadeNet& net, const std::vector<Eigen::VectorXd>& inputs,
               bool train_mode = false, Rng* rng = nullptr, ForwardCache* cache = nullptr);

struct LstmGrads {
    Eigen::MatrixXd w_in;
    Eigen::MatrixXd w_rec;
    Eigen::VectorXd bias;
};

struct NetGrads {
    std::vector<LstmGrads> layers;
    std::optional<Dense> head; // reused as gradient storage
};

NetGrads zero_grads(const CascadeNet& net);

// Exact backpropagation through time. `d_head` is dL/d(head output) (empty
// when the net has no head or the head output is unused); `d_outputs` is
// dL/d(output sequence) and may be empty for all-zero. Gradients accumulate
// into `grads`; the return value is dL/d(input sequence) for upstream nets.
std::vector<Eigen::VectorXd> backward(const CascadeNet& net, const ForwardCache& cache,
                                      const Eigen::VectorXd& d_head,
                                      const std::vector<Eigen::VectorXd>& d_outputs,
                                      NetGrads& grads);

// Bias-corrected ADAM with one shared step counter per optimizer instance.
struct AdamState {
    NetGrads m;
    NetGrads v;
    long step = 0;
};

AdamState make_adam_state(const CascadeNet& net);

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard update; throws NumericError naming the offending tensor when a
// gradient is not finite. Zero gradients leave parameters untouched only at
// step transitions where both moments are zero, hence callers step only the
// nets actually touched by a batch.
void adam_step(CascadeNet& net, const NetGrads& grads, AdamState& state, double lr,
               const AdamParams& params = {}, const std::string& net_name = "net");

// Parameter enumeration for checks and serialization.
struct ParamRef {
    std::string name;
    double* data;
    std::size_t size;
};
std::vector<ParamRef> param_refs(CascadeNet& net, const std::string& prefix = "net");

// Lag windows: row r holds the values at t - p for p in ascending order, the
// target is the value at t. skip_nearest forbids lag 1 (super-resolved
// midpoints would leak the target).
struct WindowSet {
    Eigen::MatrixXd inputs;  // windows x lags
    Eigen::VectorXd targets;
    std::vector<long> target_index;
};

WindowSet make_windows(const std::vector<double>& series, const std::vector<int>& lags,
                       bool skip_nearest);

struct TrainConfig {
    double learning_rate = 0.01;
    double lr_decay = 0.0;      // lr_t = lr / (1 + decay * step)
    int halve_every_epochs = 0; // 0 = off
    int epochs = 200;
    int batch_size = 32;
    std::uint64_t seed = 0;
    AdamParams adam;
    std::vector<int> lags{2, 3, 4, 5, 6, 7, 8, 9};
    bool skip_nearest = true;
};

// Minibatch MSE training of a single cascade on a window set; returns the
// per-epoch mean training loss. Bit-reproducible for a fixed seed.
std::vector<double> train_cascade(CascadeNet& net, const WindowSet& data, const TrainConfig& cfg);

// One-step-ahead predictions for the given window rows (eval mode).
Eigen::VectorXd predict_windows(const CascadeNet& net, const Eigen::MatrixXd& inputs);

nlohmann::json cascade_to_json(const CascadeNet& net);
CascadeNet cascade_from_json(const nlohmann::json& j);
nlohmann::json adam_to_json(const AdamState& state);
AdamState adam_from_json(const nlohmann::json& j, const CascadeNet& net);

} // namespace stcast::neural
