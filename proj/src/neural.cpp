#include "stcast/neural.hpp"

#include "stcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace stcast::neural {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd uniform_matrix(int rows, int cols, double bound, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    }
    return m;
}

void check_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw NumericError(std::string("forward: non-finite ") + what);
}

} // namespace

CascadeNet make_cascade(int input_dim, const std::vector<int>& hidden_dims, int head_dim,
                        double dropout, Rng& rng) {
    if (input_dim < 1) throw ConfigError("make_cascade: input dim must be >= 1");
    if (hidden_dims.empty()) throw ConfigError("make_cascade: need at least one LSTM layer");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("make_cascade: dropout must be in [0, 1)");

    CascadeNet net;
    net.dropout = dropout;
    int dim = input_dim;
    for (int h : hidden_dims) {
        if (h < 1) throw ConfigError("make_cascade: hidden dims must be >= 1");
        LstmLayer layer;
        layer.input_dim = dim;
        layer.hidden_dim = h;
        layer.w_in = uniform_matrix(4 * h, dim, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        layer.w_rec = uniform_matrix(4 * h, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
        layer.bias = Eigen::VectorXd::Zero(4 * h);
        layer.bias.segment(h, h).setConstant(1.0); // forget gate opens at init
        net.layers.push_back(std::move(layer));
        dim = h;
    }
    if (head_dim > 0) {
        Dense head;
        head.weight = uniform_matrix(head_dim, dim, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        head.bias = Eigen::VectorXd::Zero(head_dim);
        net.head = std::move(head);
    }
    return net;
}

std::vector<Eigen::VectorXd> run_cascade(const CascadeNet& net,
                                         const std::vector<Eigen::VectorXd>& inputs,
                                         bool train_mode, Rng* rng, ForwardCache* cache) {
    if (net.layers.empty()) throw ConfigError("run_cascade: empty network");
    if (inputs.empty()) throw DataError("run_cascade: empty input sequence");
    if (inputs.front().size() != net.input_dim()) {
        throw DataError("run_cascade: input dim " + std::to_string(inputs.front().size()) +
                        " does not match network input dim " + std::to_string(net.input_dim()));
    }
    const bool use_dropout = train_mode && net.dropout > 0.0;
    if (use_dropout && rng == nullptr) throw ConfigError("run_cascade: dropout needs an RNG in train mode");
    if (cache) {
        cache->layers.assign(net.layers.size(), LayerCache{});
    }

    std::vector<Eigen::VectorXd> current = inputs;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const LstmLayer& layer = net.layers[li];
        const int h = layer.hidden_dim;
        if (current.front().size() != layer.input_dim) {
            throw DataError("run_cascade: layer " + std::to_string(li) + " expects dim " +
                            std::to_string(layer.input_dim));
        }
        LayerCache* lc = cache ? &cache->layers[li] : nullptr;
        Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
        Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
        std::vector<Eigen::VectorXd> outputs;
        outputs.reserve(current.size());
        for (const Eigen::VectorXd& x : current) {
            Eigen::VectorXd preact = layer.w_in * x + layer.w_rec * h_prev + layer.bias;
            Eigen::VectorXd gates(4 * h);
            for (int k = 0; k < h; ++k) {
                gates[k] = sigmoid(preact[k]);                  // input gate
                gates[h + k] = sigmoid(preact[h + k]);          // forget gate
                gates[2 * h + k] = std::tanh(preact[2 * h + k]); // cell candidate
                gates[3 * h + k] = sigmoid(preact[3 * h + k]);  // output gate
            }
            Eigen::VectorXd c = gates.segment(h, h).cwiseProduct(c_prev) +
                                gates.segment(0, h).cwiseProduct(gates.segment(2 * h, h));
            Eigen::VectorXd tanh_c = c.array().tanh().matrix();
            Eigen::VectorXd hidden = gates.segment(3 * h, h).cwiseProduct(tanh_c);
            check_finite(hidden, "activation");

            Eigen::VectorXd out = hidden;
            Eigen::VectorXd mask;
            if (use_dropout) {
                mask.resize(h);
                const double keep = 1.0 - net.dropout;
                for (int k = 0; k < h; ++k) mask[k] = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
                out = hidden.cwiseProduct(mask);
            }
            if (lc) {
                lc->inputs.push_back(x);
                lc->gates.push_back(std::move(gates));
                lc->cell.push_back(c);
                lc->tanh_cell.push_back(std::move(tanh_c));
                lc->hidden.push_back(hidden);
                lc->outputs.push_back(out);
                if (use_dropout) lc->mask.push_back(std::move(mask));
            }
            // Dropout only touches the feed-forward path; the recurrence
            // always sees the undropped hidden state.
            h_prev = std::move(hidden);
            c_prev = std::move(c);
            outputs.push_back(std::move(out));
        }
        current = std::move(outputs);
    }
    if (cache) cache->head_input = current.back();
    return current;
}

double predict(const CascadeNet& net, const std::vector<Eigen::VectorXd>& inputs, bool train_mode,
               Rng* rng, ForwardCache* cache) {
    if (!net.head) throw ConfigError("predict: network has no head");
    ForwardCache local;
    ForwardCache* fc = cache ? cache : &local;
    const auto outputs = run_cascade(net, inputs, train_mode, rng, fc);
    fc->head_output = net.head->weight * outputs.back() + net.head->bias;
    check_finite(fc->head_output, "prediction");
    return fc->head_output[0];
}

NetGrads zero_grads(const CascadeNet& net) {
    NetGrads g;
    for (const LstmLayer& layer : net.layers) {
        LstmGrads lg;
        lg.w_in = Eigen::MatrixXd::Zero(layer.w_in.rows(), layer.w_in.cols());
        lg.w_rec = Eigen::MatrixXd::Zero(layer.w_rec.rows(), layer.w_rec.cols());
        lg.bias = Eigen::VectorXd::Zero(layer.bias.size());
        g.layers.push_back(std::move(lg));
    }
    if (net.head) {
        Dense hg;
        hg.weight = Eigen::MatrixXd::Zero(net.head->weight.rows(), net.head->weight.cols());
        hg.bias = Eigen::VectorXd::Zero(net.head->bias.size());
        g.head = std::move(hg);
    }
    return g;
}

std::vector<Eigen::VectorXd> backward(const CascadeNet& net, const ForwardCache& cache,
                                      const Eigen::VectorXd& d_head,
                                      const std::vector<Eigen::VectorXd>& d_outputs,
                                      NetGrads& grads) {
    if (cache.layers.size() != net.layers.size()) {
        throw ConfigError("backward: cache does not match network (run forward with a cache first)");
    }
    const std::size_t steps = cache.layers.front().inputs.size();
    if (steps == 0) throw ConfigError("backward: empty forward cache");

    // Seed the output-sequence gradient of the top layer.
    std::vector<Eigen::VectorXd> d_out(steps, Eigen::VectorXd::Zero(net.layers.back().hidden_dim));
    if (!d_outputs.empty()) {
        if (d_outputs.size() != steps) throw DataError("backward: d_outputs length mismatch");
        for (std::size_t t = 0; t < steps; ++t) d_out[t] = d_outputs[t];
    }
    if (d_head.size() > 0) {
        if (!net.head) throw ConfigError("backward: d_head given but network has no head");
        grads.head->weight += d_head * cache.head_input.transpose();
        grads.head->bias += d_head;
        d_out.back() += net.head->weight.transpose() * d_head;
    }

    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const LstmLayer& layer = net.layers[li];
        const LayerCache& lc = cache.layers[li];
        LstmGrads& lg = grads.layers[li];
        const int h = layer.hidden_dim;
        const bool dropped = !lc.mask.empty();

        std::vector<Eigen::VectorXd> d_in(steps, Eigen::VectorXd::Zero(layer.input_dim));
        Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);
        for (std::size_t t = steps; t-- > 0;) {
            // d_out[t] is w.r.t. the post-dropout output; dh_next is w.r.t.
            // the undropped hidden state consumed by the recurrence.
            Eigen::VectorXd dh =
                dropped ? (d_out[t].cwiseProduct(lc.mask[t]) + dh_next).eval()
                        : (d_out[t] + dh_next).eval();

            const auto i_gate = lc.gates[t].segment(0, h);
            const auto f_gate = lc.gates[t].segment(h, h);
            const auto g_gate = lc.gates[t].segment(2 * h, h);
            const auto o_gate = lc.gates[t].segment(3 * h, h);
            const Eigen::VectorXd& tanh_c = lc.tanh_cell[t];

            Eigen::VectorXd d_o = dh.cwiseProduct(tanh_c);
            dc += dh.cwiseProduct(o_gate)
                      .cwiseProduct((1.0 - tanh_c.array().square()).matrix());
            const Eigen::VectorXd c_prev =
                t == 0 ? Eigen::VectorXd::Zero(h) : lc.cell[t - 1];
            Eigen::VectorXd d_i = dc.cwiseProduct(g_gate);
            Eigen::VectorXd d_g = dc.cwiseProduct(i_gate);
            Eigen::VectorXd d_f = dc.cwiseProduct(c_prev);
            Eigen::VectorXd dc_prev = dc.cwiseProduct(f_gate);

            Eigen::VectorXd da(4 * h);
            da.segment(0, h) = d_i.cwiseProduct(i_gate).cwiseProduct((1.0 - i_gate.array()).matrix());
            da.segment(h, h) = d_f.cwiseProduct(f_gate).cwiseProduct((1.0 - f_gate.array()).matrix());
            da.segment(2 * h, h) = d_g.cwiseProduct((1.0 - g_gate.array().square()).matrix());
            da.segment(3 * h, h) = d_o.cwiseProduct(o_gate).cwiseProduct((1.0 - o_gate.array()).matrix());

            lg.w_in.noalias() += da * lc.inputs[t].transpose();
            const Eigen::VectorXd h_prev =
                t == 0 ? Eigen::VectorXd::Zero(h) : lc.hidden[t - 1];
            lg.w_rec.noalias() += da * h_prev.transpose();
            lg.bias += da;

            d_in[t] = layer.w_in.transpose() * da;
            dh_next = layer.w_rec.transpose() * da;
            dc = std::move(dc_prev);
        }
        d_out = std::move(d_in);
    }
    return d_out;
}

AdamState make_adam_state(const CascadeNet& net) {
    AdamState s;
    s.m = zero_grads(net);
    s.v = zero_grads(net);
    s.step = 0;
    return s;
}

namespace {

void adam_tensor(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, long step, const AdamParams& p, const std::string& name) {
    const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grad[i])) {
            throw NumericError("adam_step: non-finite gradient for " + name);
        }
        m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * grad[i];
        v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * grad[i] * grad[i];
        param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + p.eps);
    }
}

template <typename Tensor>
void adam_tensor(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, double lr, long step,
                 const AdamParams& p, const std::string& name) {
    adam_tensor(param.data(), grad.data(), m.data(), v.data(), static_cast<std::size_t>(param.size()),
                lr, step, p, name);
}

} // namespace

void adam_step(CascadeNet& net, const NetGrads& grads, AdamState& state, double lr,
               const AdamParams& params, const std::string& net_name) {
    if (grads.layers.size() != net.layers.size()) throw ConfigError("adam_step: gradient shape mismatch");
    ++state.step;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const std::string base = net_name + ".layer" + std::to_string(li);
        adam_tensor(net.layers[li].w_in, grads.layers[li].w_in, state.m.layers[li].w_in,
                    state.v.layers[li].w_in, lr, state.step, params, base + ".w_in");
        adam_tensor(net.layers[li].w_rec, grads.layers[li].w_rec, state.m.layers[li].w_rec,
                    state.v.layers[li].w_rec, lr, state.step, params, base + ".w_rec");
        adam_tensor(net.layers[li].bias, grads.layers[li].bias, state.m.layers[li].bias,
                    state.v.layers[li].bias, lr, state.step, params, base + ".bias");
    }
    if (net.head) {
        if (!grads.head) throw ConfigError("adam_step: missing head gradients");
        adam_tensor(net.head->weight, grads.head->weight, state.m.head->weight,
                    state.v.head->weight, lr, state.step, params, net_name + ".head.weight");
        adam_tensor(net.head->bias, grads.head->bias, state.m.head->bias, state.v.head->bias, lr,
                    state.step, params, net_name + ".head.bias");
    }
}

std::vector<ParamRef> param_refs(CascadeNet& net, const std::string& prefix) {
    std::vector<ParamRef> refs;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const std::string base = prefix + ".layer" + std::to_string(li);
        LstmLayer& l = net.layers[li];
        refs.push_back({base + ".w_in", l.w_in.data(), static_cast<std::size_t>(l.w_in.size())});
        refs.push_back({base + ".w_rec", l.w_rec.data(), static_cast<std::size_t>(l.w_rec.size())});
        refs.push_back({base + ".bias", l.bias.data(), static_cast<std::size_t>(l.bias.size())});
    }
    if (net.head) {
        refs.push_back({prefix + ".head.weight", net.head->weight.data(),
                        static_cast<std::size_t>(net.head->weight.size())});
        refs.push_back({prefix + ".head.bias", net.head->bias.data(),
                        static_cast<std::size_t>(net.head->bias.size())});
    }
    return refs;
}

WindowSet make_windows(const std::vector<double>& series, const std::vector<int>& lags,
                       bool skip_nearest) {
    if (lags.empty()) throw ConfigError("make_windows: lag set must not be empty");
    std::vector<int> sorted = lags;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 1) throw ConfigError("make_windows: lags must be positive");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("make_windows: duplicate lags");
    }
    if (skip_nearest && sorted.front() == 1) {
        throw ConfigError("make_windows: lag 1 is not allowed when skip_nearest is set");
    }
    const int max_lag = sorted.back();
    const long len = static_cast<long>(series.size());
    const long count = std::max<long>(0, len - max_lag);

    WindowSet ws;
    ws.inputs.resize(count, static_cast<Eigen::Index>(sorted.size()));
    ws.targets.resize(count);
    ws.target_index.reserve(static_cast<std::size_t>(count));
    for (long t = max_lag; t < len; ++t) {
        const long row = t - max_lag;
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            ws.inputs(row, static_cast<Eigen::Index>(k)) = series[static_cast<std::size_t>(t - sorted[k])];
        }
        ws.targets[row] = series[static_cast<std::size_t>(t)];
        ws.target_index.push_back(t);
    }
    return ws;
}

std::vector<double> train_cascade(CascadeNet& net, const WindowSet& data, const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("train_cascade: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("train_cascade: learning rate must be positive");
    if (data.inputs.rows() == 0) throw DataError("train_cascade: no training windows");
    if (!net.head) throw ConfigError("train_cascade: network needs a head");

    Rng rng(cfg.seed);
    AdamState adam = make_adam_state(net);
    std::vector<long> order(static_cast<std::size_t>(data.inputs.rows()));
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    double base_lr = cfg.learning_rate;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.halve_every_epochs > 0 && epoch > 0 && epoch % cfg.halve_every_epochs == 0) {
            base_lr *= 0.5;
        }
        shuffle(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double batch_n = static_cast<double>(end - start);
            NetGrads grads = zero_grads(net);
            for (std::size_t k = start; k < end; ++k) {
                const long row = order[k];
                std::vector<Eigen::VectorXd> seq;
                seq.reserve(static_cast<std::size_t>(data.inputs.cols()));
                for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
                    seq.push_back(Eigen::VectorXd::Constant(1, data.inputs(row, c)));
                }
                ForwardCache cache;
                const double pred = predict(net, seq, true, &rng, &cache);
                const double err = pred - data.targets[row];
                epoch_loss += err * err;
                Eigen::VectorXd d_head = Eigen::VectorXd::Constant(1, 2.0 * err / batch_n);
                backward(net, cache, d_head, {}, grads);
            }
            const double lr = cfg.lr_decay > 0.0
                                  ? base_lr / (1.0 + cfg.lr_decay * static_cast<double>(adam.step))
                                  : base_lr;
            adam_step(net, grads, adam, lr, cfg.adam);
        }
        history.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return history;
}

Eigen::VectorXd predict_windows(const CascadeNet& net, const Eigen::MatrixXd& inputs) {
    Eigen::VectorXd out(inputs.rows());
    for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
        std::vector<Eigen::VectorXd> seq;
        seq.reserve(static_cast<std::size_t>(inputs.cols()));
        for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
            seq.push_back(Eigen::VectorXd::Constant(1, inputs(r, c)));
        }
        out[r] = predict(net, seq);
    }
    return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
            throw DataError("checkpoint: ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
    return v;
}

nlohmann::json grads_to_json(const NetGrads& g) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const LstmGrads& lg : g.layers) {
        j["layers"].push_back({{"w_in", matrix_to_json(lg.w_in)},
                               {"w_rec", matrix_to_json(lg.w_rec)},
                               {"bias", vector_to_json(lg.bias)}});
    }
    if (g.head) {
        j["head"] = {{"weight", matrix_to_json(g.head->weight)}, {"bias", vector_to_json(g.head->bias)}};
    }
    return j;
}

NetGrads grads_from_json(const nlohmann::json& j, const CascadeNet& net) {
    NetGrads g = zero_grads(net);
    const auto& layers = j.at("layers");
    if (layers.size() != g.layers.size()) throw DataError("checkpoint: optimizer layer count mismatch");
    for (std::size_t li = 0; li < layers.size(); ++li) {
        g.layers[li].w_in = matrix_from_json(layers[li].at("w_in"));
        g.layers[li].w_rec = matrix_from_json(layers[li].at("w_rec"));
        g.layers[li].bias = vector_from_json(layers[li].at("bias"));
    }
    if (g.head && j.contains("head")) {
        g.head->weight = matrix_from_json(j.at("head").at("weight"));
        g.head->bias = vector_from_json(j.at("head").at("bias"));
    }
    return g;
}

} // namespace

nlohmann::json cascade_to_json(const CascadeNet& net) {
    nlohmann::json j;
    j["dropout"] = net.dropout;
    j["layers"] = nlohmann::json::array();
    for (const LstmLayer& l : net.layers) {
        j["layers"].push_back({{"input_dim", l.input_dim},
                               {"hidden_dim", l.hidden_dim},
                               {"w_in", matrix_to_json(l.w_in)},
                               {"w_rec", matrix_to_json(l.w_rec)},
                               {"bias", vector_to_json(l.bias)}});
    }
    if (net.head) {
        j["head"] = {{"weight", matrix_to_json(net.head->weight)}, {"bias", vector_to_json(net.head->bias)}};
    }
    return j;
}

CascadeNet cascade_from_json(const nlohmann::json& j) {
    CascadeNet net;
    net.dropout = j.value("dropout", 0.0);
    int expected_input = -1;
    for (const auto& lj : j.at("layers")) {
        LstmLayer l;
        l.input_dim = lj.at("input_dim").get<int>();
        l.hidden_dim = lj.at("hidden_dim").get<int>();
        l.w_in = matrix_from_json(lj.at("w_in"));
        l.w_rec = matrix_from_json(lj.at("w_rec"));
        l.bias = vector_from_json(lj.at("bias"));
        if (l.w_in.rows() != 4 * l.hidden_dim || l.w_in.cols() != l.input_dim ||
            l.w_rec.rows() != 4 * l.hidden_dim || l.w_rec.cols() != l.hidden_dim ||
            l.bias.size() != 4 * l.hidden_dim) {
            throw DataError("checkpoint: LSTM tensor shapes are inconsistent");
        }
        if (expected_input >= 0 && l.input_dim != expected_input) {
            throw DataError("checkpoint: layer dims do not chain");
        }
        expected_input = l.hidden_dim;
        net.layers.push_back(std::move(l));
    }
    if (net.layers.empty()) throw DataError("checkpoint: network has no layers");
    if (j.contains("head")) {
        Dense head;
        head.weight = matrix_from_json(j.at("head").at("weight"));
        head.bias = vector_from_json(j.at("head").at("bias"));
        if (head.weight.cols() != net.layers.back().hidden_dim ||
            head.bias.size() != head.weight.rows()) {
            throw DataError("checkpoint: head shape does not match last layer");
        }
        net.head = std::move(head);
    }
    return net;
}

nlohmann::json adam_to_json(const AdamState& state) {
    nlohmann::json j;
    j["step"] = state.step;
    j["m"] = grads_to_json(state.m);
    j["v"] = grads_to_json(state.v);
    return j;
}

AdamState adam_from_json(const nlohmann::json& j, const CascadeNet& net) {
    AdamState s;
    s.step = j.at("step").get<long>();
    s.m = grads_from_json(j.at("m"), net);
    s.v = grads_from_json(j.at("v"), net);
    return s;
}

} // namespace stcast::neural
