#include "stcast/gsrnn.hpp"

#include "stcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace stcast::gsrnn {

namespace {

// In-edges of every node bucketed by source class.
struct Adjacency {
    // in[node][slot] lists (src, weight) for the slot's source class;
    // slots align with model.edge_sources[class(node)].
    std::vector<std::vector<std::vector<std::pair<int, double>>>> in;
};

Adjacency build_adjacency(const GsrnnModel& model, const WeightedGraph& graph) {
    Adjacency adj;
    adj.in.resize(static_cast<std::size_t>(graph.num_nodes));
    for (int i = 0; i < graph.num_nodes; ++i) {
        const int cls = graph.node_class[static_cast<std::size_t>(i)];
        adj.in[static_cast<std::size_t>(i)].resize(model.edge_sources[static_cast<std::size_t>(cls)].size());
    }
    for (const GraphEdge& e : graph.edges) {
        const int cls = graph.node_class[static_cast<std::size_t>(e.dst)];
        const int src_cls = graph.node_class[static_cast<std::size_t>(e.src)];
        if (cls == src_cls && !model.cfg.intra_class_edges) continue;
        const auto& sources = model.edge_sources[static_cast<std::size_t>(cls)];
        const auto it = std::find(sources.begin(), sources.end(), src_cls);
        if (it == sources.end()) {
            throw ConfigError("gsrnn: graph realizes class pair (" + std::to_string(cls) + "," +
                              std::to_string(src_cls) + ") unknown to the model");
        }
        const auto slot = static_cast<std::size_t>(it - sources.begin());
        adj.in[static_cast<std::size_t>(e.dst)][slot].emplace_back(e.src, e.weight);
    }
    return adj;
}

struct NodeRun {
    neural::ForwardCache input_cache;
    std::vector<std::optional<neural::ForwardCache>> edge_caches;
    neural::ForwardCache node_cache;
    std::vector<Eigen::VectorXd> node_inputs;
    double prediction = 0.0;
};

// Forward for one node. `pooled[slot]` is the pooled lag sequence for the
// slot's source class, or nullptr when the node has no in-neighbors of that
// class (the slot then contributes zeros and its edge RNN does not run).
double forward_node(const GsrnnModel& model, int cls, int node,
                    const std::vector<Eigen::VectorXd>& own_seq,
                    const std::vector<const std::vector<Eigen::VectorXd>*>& pooled,
                    bool train_mode, Rng* rng, NodeRun* run) {
    const auto& sources = model.edge_sources[static_cast<std::size_t>(cls)];
    if (pooled.size() != sources.size()) {
        throw ConfigError("gsrnn: pooled slot count mismatch for class " + std::to_string(cls));
    }
    const std::size_t steps = own_seq.size();
    if (run) run->edge_caches.assign(sources.size(), std::nullopt);

    const auto h_in = neural::run_cascade(model.input_rnns[static_cast<std::size_t>(cls)], own_seq,
                                          train_mode, rng, run ? &run->input_cache : nullptr);
    std::vector<std::vector<Eigen::VectorXd>> h_edge(sources.size());
    for (std::size_t s = 0; s < sources.size(); ++s) {
        if (!pooled[s]) continue;
        if (run) run->edge_caches[s].emplace();
        const auto key = std::make_pair(cls, sources[s]);
        h_edge[s] = neural::run_cascade(model.edge_rnns.at(key), *pooled[s], train_mode, rng,
                                        run ? &*run->edge_caches[s] : nullptr);
    }

    const auto in_w = static_cast<Eigen::Index>(h_in.front().size());
    const auto edge_w = static_cast<Eigen::Index>(model.cfg.edge_units.back());
    std::vector<Eigen::VectorXd> node_inputs(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(in_w + static_cast<Eigen::Index>(sources.size()) * edge_w);
        v.segment(0, in_w) = h_in[t];
        for (std::size_t s = 0; s < sources.size(); ++s) {
            if (!h_edge[s].empty()) {
                v.segment(in_w + static_cast<Eigen::Index>(s) * edge_w, edge_w) = h_edge[s][t];
            }
        }
        node_inputs[t] = std::move(v);
    }

    const auto node_idx = static_cast<std::size_t>(model.node_rnn_index(node, cls));
    const double pred = neural::predict(model.node_rnns[node_idx], node_inputs, train_mode, rng,
                                        run ? &run->node_cache : nullptr);
    if (run) {
        run->node_inputs = std::move(node_inputs);
        run->prediction = pred;
    }
    return pred;
}

std::vector<Eigen::VectorXd> scalar_sequence(const Eigen::MatrixXd& windows, Eigen::Index row) {
    std::vector<Eigen::VectorXd> seq;
    seq.reserve(static_cast<std::size_t>(windows.cols()));
    for (Eigen::Index c = 0; c < windows.cols(); ++c) {
        seq.push_back(Eigen::VectorXd::Constant(1, windows(row, c)));
    }
    return seq;
}

// Window sets for every node plus, per slot, windows of the weighted
// neighbor-pooled series (pooling the series then lagging equals pooling the
// lag windows, both are linear).
struct SeriesData {
    std::vector<neural::WindowSet> own;
    std::vector<std::vector<std::optional<neural::WindowSet>>> pooled;
    int max_lag = 0;
};

SeriesData prepare_series(const GsrnnModel& model, const WeightedGraph& graph,
                          const NodeSeries& series, const Adjacency& adj) {
    if (graph.num_nodes != series.num_nodes()) {
        throw DataError("gsrnn: graph has " + std::to_string(graph.num_nodes) + " nodes, series has " +
                        std::to_string(series.num_nodes()));
    }
    SeriesData data;
    data.max_lag = *std::max_element(model.cfg.lags.begin(), model.cfg.lags.end());
    data.own.reserve(static_cast<std::size_t>(graph.num_nodes));
    data.pooled.resize(static_cast<std::size_t>(graph.num_nodes));
    for (int i = 0; i < graph.num_nodes; ++i) {
        data.own.push_back(neural::make_windows(series.values[static_cast<std::size_t>(i)],
                                                model.cfg.lags, model.cfg.skip_nearest));
        const auto& slots = adj.in[static_cast<std::size_t>(i)];
        auto& pooled = data.pooled[static_cast<std::size_t>(i)];
        pooled.resize(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (slots[s].empty()) continue;
            std::vector<double> pooled_series(series.length(), 0.0);
            for (const auto& [src, weight] : slots[s]) {
                const auto& x = series.values[static_cast<std::size_t>(src)];
                for (std::size_t t = 0; t < x.size(); ++t) pooled_series[t] += weight * x[t];
            }
            pooled[s] = neural::make_windows(pooled_series, model.cfg.lags, model.cfg.skip_nearest);
        }
    }
    return data;
}

std::vector<const std::vector<Eigen::VectorXd>*> pooled_pointers(
    const std::vector<std::optional<std::vector<Eigen::VectorXd>>>& seqs) {
    std::vector<const std::vector<Eigen::VectorXd>*> ptrs;
    ptrs.reserve(seqs.size());
    for (const auto& s : seqs) ptrs.push_back(s ? &*s : nullptr);
    return ptrs;
}

std::vector<double> resolve_scale(const GsrnnModel& model, int num_nodes) {
    if (model.node_scale.empty()) return std::vector<double>(static_cast<std::size_t>(num_nodes), 1.0);
    if (static_cast<int>(model.node_scale.size()) != num_nodes) {
        throw DataError("gsrnn: node_scale length does not match the graph");
    }
    return model.node_scale;
}

NodeSeries scaled_series(const NodeSeries& series, const std::vector<double>& scale) {
    NodeSeries out = series;
    for (std::size_t u = 0; u < out.values.size(); ++u) {
        for (double& v : out.values[u]) v /= scale[u];
    }
    return out;
}

} // namespace

GsrnnModel make_model(const WeightedGraph& graph, const GsrnnConfig& cfg, Rng& rng) {
    graph.validate();
    if (cfg.input_units.empty() || cfg.edge_units.empty() || cfg.node_units.empty()) {
        throw ConfigError("gsrnn: every RNN needs at least one layer");
    }
    GsrnnModel model;
    model.cfg = cfg;
    model.num_classes = graph.num_classes();

    std::set<std::pair<int, int>> pairs;
    for (const GraphEdge& e : graph.edges) {
        const int k = graph.node_class[static_cast<std::size_t>(e.dst)];
        const int l = graph.node_class[static_cast<std::size_t>(e.src)];
        if (k == l && !cfg.intra_class_edges) continue;
        pairs.insert({k, l});
    }
    model.edge_sources.resize(static_cast<std::size_t>(model.num_classes));
    for (const auto& [k, l] : pairs) model.edge_sources[static_cast<std::size_t>(k)].push_back(l);
    for (auto& sources : model.edge_sources) std::sort(sources.begin(), sources.end());

    for (int k = 0; k < model.num_classes; ++k) {
        model.input_rnns.push_back(neural::make_cascade(1, cfg.input_units, 0, cfg.dropout, rng));
    }
    for (const auto& [k, l] : pairs) {
        model.edge_rnns.emplace(std::make_pair(k, l),
                                neural::make_cascade(1, cfg.edge_units, 0, cfg.dropout, rng));
    }
    const int node_rnn_count = cfg.per_node_node_rnn ? graph.num_nodes : model.num_classes;
    for (int idx = 0; idx < node_rnn_count; ++idx) {
        const int cls = cfg.per_node_node_rnn ? graph.node_class[static_cast<std::size_t>(idx)] : idx;
        const int input_dim =
            cfg.input_units.back() +
            static_cast<int>(model.edge_sources[static_cast<std::size_t>(cls)].size()) * cfg.edge_units.back();
        model.node_rnns.push_back(neural::make_cascade(input_dim, cfg.node_units, 1, cfg.dropout, rng));
    }
    return model;
}

std::vector<int> partition_nodes(const NodeSeries& series, int num_classes) {
    const int n = series.num_nodes();
    if (num_classes < 1) throw ConfigError("partition_nodes: need at least one class");
    if (num_classes > n) throw ConfigError("partition_nodes: more classes than nodes");

    std::vector<std::pair<double, int>> totals;
    totals.reserve(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        double total = 0.0;
        for (double v : series.values[static_cast<std::size_t>(u)]) total += v;
        totals.emplace_back(total, u);
    }
    std::sort(totals.begin(), totals.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    const int base = n / num_classes;
    const int remainder = n % num_classes;
    int pos = 0;
    for (int k = 0; k < num_classes; ++k) {
        const int size = base + (k < remainder ? 1 : 0); // remainder to the lower groups
        for (int s = 0; s < size; ++s) labels[static_cast<std::size_t>(totals[static_cast<std::size_t>(pos++)].second)] = k;
    }
    return labels;
}

WeightedGraph lattice_graph(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("lattice_graph: rows and cols must be >= 1");
    WeightedGraph g;
    g.num_nodes = rows * cols;
    g.node_class.assign(static_cast<std::size_t>(g.num_nodes), 0);
    const auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                g.edges.push_back(GraphEdge{id(r, c), id(r, c + 1), 0.25});
                g.edges.push_back(GraphEdge{id(r, c + 1), id(r, c), 0.25});
            }
            if (r + 1 < rows) {
                g.edges.push_back(GraphEdge{id(r, c), id(r + 1, c), 0.25});
                g.edges.push_back(GraphEdge{id(r + 1, c), id(r, c), 0.25});
            }
        }
    }
    return g;
}

Eigen::VectorXd pool_neighbors(const WeightedGraph& graph, int node, int source_class,
                               const std::vector<Eigen::VectorXd>& node_inputs) {
    if (node < 0 || node >= graph.num_nodes) throw DataError("pool_neighbors: node out of range");
    if (static_cast<int>(node_inputs.size()) != graph.num_nodes) {
        throw DataError("pool_neighbors: need one input vector per graph node");
    }
    Eigen::Index dim = -1;
    for (const auto& v : node_inputs) {
        if (dim < 0) dim = v.size();
        else if (v.size() != dim) throw DataError("pool_neighbors: input vectors differ in length");
    }
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(dim);
    for (const GraphEdge& e : graph.edges) {
        if (e.dst != node) continue;
        if (graph.node_class[static_cast<std::size_t>(e.src)] != source_class) continue;
        pooled += e.weight * node_inputs[static_cast<std::size_t>(e.src)];
    }
    return pooled;
}

Eigen::VectorXd gsrnn_forward(const GsrnnModel& model, const WeightedGraph& graph,
                              const std::vector<std::vector<Eigen::VectorXd>>& lag_seqs,
                              bool train_mode, Rng* rng) {
    graph.validate();
    if (static_cast<int>(lag_seqs.size()) != graph.num_nodes) {
        throw DataError("gsrnn_forward: need one lag sequence per node");
    }
    const Adjacency adj = build_adjacency(model, graph);
    Eigen::VectorXd out(graph.num_nodes);
    for (int i = 0; i < graph.num_nodes; ++i) {
        const int cls = graph.node_class[static_cast<std::size_t>(i)];
        const auto& slots = adj.in[static_cast<std::size_t>(i)];
        std::vector<std::optional<std::vector<Eigen::VectorXd>>> pooled(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (slots[s].empty()) continue;
            std::vector<Eigen::VectorXd> seq;
            seq.reserve(lag_seqs[static_cast<std::size_t>(i)].size());
            for (std::size_t t = 0; t < lag_seqs[static_cast<std::size_t>(i)].size(); ++t) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(lag_seqs[static_cast<std::size_t>(i)][t].size());
                for (const auto& [src, weight] : slots[s]) {
                    v += weight * lag_seqs[static_cast<std::size_t>(src)][t];
                }
                seq.push_back(std::move(v));
            }
            pooled[s].emplace(std::move(seq));
        }
        out[i] = forward_node(model, cls, i, lag_seqs[static_cast<std::size_t>(i)],
                              pooled_pointers(pooled), train_mode, rng, nullptr);
    }
    return out;
}

Eigen::VectorXd gsrnn_forward_at(const GsrnnModel& model, const WeightedGraph& graph,
                                 const NodeSeries& series, long t) {
    std::vector<int> lags = model.cfg.lags;
    std::sort(lags.begin(), lags.end());
    if (t < lags.back() || t >= static_cast<long>(series.length())) {
        throw DataError("gsrnn_forward_at: target index outside the valid window range");
    }
    std::vector<std::vector<Eigen::VectorXd>> seqs(static_cast<std::size_t>(series.num_nodes()));
    for (int i = 0; i < series.num_nodes(); ++i) {
        for (int lag : lags) {
            seqs[static_cast<std::size_t>(i)].push_back(Eigen::VectorXd::Constant(
                1, series.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - lag)]));
        }
    }
    return gsrnn_forward(model, graph, seqs);
}

TrainResult train(GsrnnModel& model, const WeightedGraph& graph, const NodeSeries& sr_series,
                  const GsrnnTrainConfig& cfg) {
    graph.validate();
    if (sr_series.state != SeriesState::SuperResolved) {
        throw DataError("train: series must be super-resolved (augment it first)");
    }
    if (!(cfg.subsample_fraction > 0.0) || cfg.subsample_fraction > 1.0) {
        throw ConfigError("train: subsample fraction must be in (0, 1]");
    }
    if (cfg.base.epochs < 1) throw ConfigError("train: epochs must be >= 1");

    const long train_end = cfg.train_end < 0 ? static_cast<long>(sr_series.length()) : cfg.train_end;
    // Fit the per-node normalization on the training segment only.
    model.node_scale.assign(static_cast<std::size_t>(graph.num_nodes), 1.0);
    for (int u = 0; u < graph.num_nodes; ++u) {
        double peak = 0.0;
        const auto& v = sr_series.values[static_cast<std::size_t>(u)];
        for (long t = 0; t < std::min<long>(train_end, static_cast<long>(v.size())); ++t) {
            peak = std::max(peak, std::abs(v[static_cast<std::size_t>(t)]));
        }
        if (peak > 0.0) model.node_scale[static_cast<std::size_t>(u)] = peak;
    }

    const Adjacency adj = build_adjacency(model, graph);
    const NodeSeries normalized = scaled_series(sr_series, model.node_scale);
    const SeriesData data = prepare_series(model, graph, normalized, adj);

    // Per-node training rows (window targets strictly before train_end).
    std::vector<std::vector<long>> node_rows(static_cast<std::size_t>(graph.num_nodes));
    for (int i = 0; i < graph.num_nodes; ++i) {
        const auto& idx = data.own[static_cast<std::size_t>(i)].target_index;
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (idx[r] < train_end) node_rows[static_cast<std::size_t>(i)].push_back(static_cast<long>(r));
        }
    }

    std::vector<std::vector<int>> class_nodes(static_cast<std::size_t>(model.num_classes));
    for (int i = 0; i < graph.num_nodes; ++i) {
        class_nodes[static_cast<std::size_t>(graph.node_class[static_cast<std::size_t>(i)])].push_back(i);
    }

    // One optimizer per parameter group; only groups touched by a batch step.
    std::vector<neural::AdamState> input_adam;
    std::vector<neural::AdamState> node_adam;
    for (auto& net : model.input_rnns) input_adam.push_back(neural::make_adam_state(net));
    for (auto& net : model.node_rnns) node_adam.push_back(neural::make_adam_state(net));
    std::map<std::pair<int, int>, neural::AdamState> edge_adam;
    for (auto& [key, net] : model.edge_rnns) edge_adam.emplace(key, neural::make_adam_state(net));

    Rng rng(cfg.base.seed);
    TrainResult result;
    std::vector<double> class_error(static_cast<std::size_t>(model.num_classes), 1.0);
    double base_lr = cfg.base.learning_rate;
    long optimizer_steps = 0;

    for (int epoch = 0; epoch < cfg.base.epochs; ++epoch) {
        if (cfg.base.halve_every_epochs > 0 && epoch > 0 && epoch % cfg.base.halve_every_epochs == 0) {
            base_lr *= 0.5;
        }

        // Draw the per-class node subset for this epoch.
        std::vector<int> sampled;
        for (int k = 0; k < model.num_classes; ++k) {
            auto nodes = class_nodes[static_cast<std::size_t>(k)];
            if (nodes.empty()) continue;
            double fraction = cfg.subsample_fraction;
            if (cfg.subsample_mode == SubsampleMode::ErrorProportional) {
                double total = 0.0;
                for (double e : class_error) total += e;
                const double mean = total / static_cast<double>(class_error.size());
                if (mean > 0.0) {
                    fraction = std::min(1.0, cfg.subsample_fraction *
                                                 class_error[static_cast<std::size_t>(k)] / mean);
                }
            }
            auto count = static_cast<std::size_t>(
                std::ceil(fraction * static_cast<double>(nodes.size())));
            count = std::clamp<std::size_t>(count, 1, nodes.size());
            shuffle(nodes, rng);
            nodes.resize(count);
            std::sort(nodes.begin(), nodes.end());
            sampled.insert(sampled.end(), nodes.begin(), nodes.end());
        }
        result.sampled_node_count.push_back(sampled.size());

        std::vector<std::pair<int, long>> samples;
        for (int node : sampled) {
            for (long row : node_rows[static_cast<std::size_t>(node)]) samples.emplace_back(node, row);
        }
        if (samples.empty()) throw DataError("train: no training windows before the train/test boundary");
        shuffle(samples, rng);

        double epoch_sse = 0.0;
        std::vector<double> class_sse(static_cast<std::size_t>(model.num_classes), 0.0);
        std::vector<std::size_t> class_count(static_cast<std::size_t>(model.num_classes), 0);

        const auto batch_size = static_cast<std::size_t>(std::max(1, cfg.base.batch_size));
        for (std::size_t start = 0; start < samples.size(); start += batch_size) {
            const std::size_t end = std::min(samples.size(), start + batch_size);
            const double batch_n = static_cast<double>(end - start);

            std::map<int, neural::NetGrads> input_grads;
            std::map<int, neural::NetGrads> node_grads;
            std::map<std::pair<int, int>, neural::NetGrads> edge_grads;

            for (std::size_t s = start; s < end; ++s) {
                const auto [node, row] = samples[s];
                const int cls = graph.node_class[static_cast<std::size_t>(node)];
                const auto& sources = model.edge_sources[static_cast<std::size_t>(cls)];

                const auto own_seq = scalar_sequence(data.own[static_cast<std::size_t>(node)].inputs, row);
                std::vector<std::optional<std::vector<Eigen::VectorXd>>> pooled(sources.size());
                for (std::size_t slot = 0; slot < sources.size(); ++slot) {
                    const auto& ws = data.pooled[static_cast<std::size_t>(node)][slot];
                    if (ws) pooled[slot].emplace(scalar_sequence(ws->inputs, row));
                }

                NodeRun run;
                const double pred = forward_node(model, cls, node, own_seq, pooled_pointers(pooled),
                                                 true, &rng, &run);
                const double target = data.own[static_cast<std::size_t>(node)].targets[row];
                const double err = pred - target;
                // Optimization runs in normalized units; the loss history is
                // reported in original units.
                const double err_orig = err * model.node_scale[static_cast<std::size_t>(node)];
                epoch_sse += err_orig * err_orig;
                class_sse[static_cast<std::size_t>(cls)] += err_orig * err_orig;
                ++class_count[static_cast<std::size_t>(cls)];

                // Backward through the node RNN, then split the per-step
                // input gradient into the input slot and the edge slots.
                const int node_idx = model.node_rnn_index(node, cls);
                auto node_g = node_grads.find(node_idx);
                if (node_g == node_grads.end()) {
                    node_g = node_grads.emplace(node_idx, neural::zero_grads(model.node_rnns[static_cast<std::size_t>(node_idx)])).first;
                }
                const Eigen::VectorXd d_head = Eigen::VectorXd::Constant(1, 2.0 * err / batch_n);
                const auto d_node_inputs = neural::backward(model.node_rnns[static_cast<std::size_t>(node_idx)],
                                                            run.node_cache, d_head, {}, node_g->second);

                const auto in_w = static_cast<Eigen::Index>(model.cfg.input_units.back());
                const auto edge_w = static_cast<Eigen::Index>(model.cfg.edge_units.back());
                std::vector<Eigen::VectorXd> d_h_in(d_node_inputs.size());
                for (std::size_t t = 0; t < d_node_inputs.size(); ++t) {
                    d_h_in[t] = d_node_inputs[t].segment(0, in_w);
                }
                auto input_g = input_grads.find(cls);
                if (input_g == input_grads.end()) {
                    input_g = input_grads.emplace(cls, neural::zero_grads(model.input_rnns[static_cast<std::size_t>(cls)])).first;
                }
                neural::backward(model.input_rnns[static_cast<std::size_t>(cls)], run.input_cache, {},
                                 d_h_in, input_g->second);

                for (std::size_t slot = 0; slot < sources.size(); ++slot) {
                    if (!run.edge_caches[slot]) continue;
                    std::vector<Eigen::VectorXd> d_h_edge(d_node_inputs.size());
                    for (std::size_t t = 0; t < d_node_inputs.size(); ++t) {
                        d_h_edge[t] = d_node_inputs[t].segment(
                            in_w + static_cast<Eigen::Index>(slot) * edge_w, edge_w);
                    }
                    const auto key = std::make_pair(cls, sources[slot]);
                    auto edge_g = edge_grads.find(key);
                    if (edge_g == edge_grads.end()) {
                        edge_g = edge_grads.emplace(key, neural::zero_grads(model.edge_rnns.at(key))).first;
                    }
                    neural::backward(model.edge_rnns.at(key), *run.edge_caches[slot], {}, d_h_edge,
                                     edge_g->second);
                }
            }

            const double lr = cfg.base.lr_decay > 0.0
                                  ? base_lr / (1.0 + cfg.base.lr_decay * static_cast<double>(optimizer_steps))
                                  : base_lr;
            for (auto& [cls, grads] : input_grads) {
                neural::adam_step(model.input_rnns[static_cast<std::size_t>(cls)], grads,
                                  input_adam[static_cast<std::size_t>(cls)], lr, cfg.base.adam,
                                  "input_rnn[" + std::to_string(cls) + "]");
            }
            for (auto& [key, grads] : edge_grads) {
                neural::adam_step(model.edge_rnns.at(key), grads, edge_adam.at(key), lr, cfg.base.adam,
                                  "edge_rnn[" + std::to_string(key.first) + "," +
                                      std::to_string(key.second) + "]");
            }
            for (auto& [idx, grads] : node_grads) {
                neural::adam_step(model.node_rnns[static_cast<std::size_t>(idx)], grads,
                                  node_adam[static_cast<std::size_t>(idx)], lr, cfg.base.adam,
                                  "node_rnn[" + std::to_string(idx) + "]");
            }
            ++optimizer_steps;
        }

        for (int k = 0; k < model.num_classes; ++k) {
            if (class_count[static_cast<std::size_t>(k)] > 0) {
                class_error[static_cast<std::size_t>(k)] =
                    class_sse[static_cast<std::size_t>(k)] /
                    static_cast<double>(class_count[static_cast<std::size_t>(k)]);
            }
        }
        result.loss_history.push_back(epoch_sse / static_cast<double>(samples.size()));
    }
    return result;
}

ForecastRun forecast(const GsrnnModel& model, const WeightedGraph& graph,
                     const NodeSeries& sr_series, int test_days) {
    graph.validate();
    if (sr_series.state != SeriesState::SuperResolved) {
        throw DataError("forecast: series must be super-resolved");
    }
    if (test_days < 1) throw ConfigError("forecast: need at least one test day");
    const int sr_period = sr_series.period;
    if (sr_period < 3 || sr_period % 2 == 0) {
        throw DataError("forecast: super-resolved period must be odd and >= 3");
    }
    const int period = (sr_period + 1) / 2;
    const auto len = static_cast<long>(sr_series.length());
    if (len % sr_period != 0) throw DataError("forecast: series length is not block-aligned");

    const Adjacency adj = build_adjacency(model, graph);
    const std::vector<double> scale = resolve_scale(model, graph.num_nodes);
    const NodeSeries normalized = scaled_series(sr_series, scale);
    const SeriesData data = prepare_series(model, graph, normalized, adj);
    const long test_len = static_cast<long>(test_days) * sr_period;
    const long boundary = len - test_len;
    if (boundary <= data.max_lag) {
        throw DataError("forecast: test range exceeds the available data");
    }

    ForecastRun run;
    run.sr_boundary = boundary;
    run.day_boundary = (boundary / sr_period) * period;
    run.period = period;
    const int n = graph.num_nodes;
    run.pred_cdf.assign(static_cast<std::size_t>(n), {});
    run.actual_cdf.assign(static_cast<std::size_t>(n), {});
    run.pred_pdf.assign(static_cast<std::size_t>(n), {});
    run.actual_pdf.assign(static_cast<std::size_t>(n), {});

    for (int i = 0; i < n; ++i) {
        const int cls = graph.node_class[static_cast<std::size_t>(i)];
        const auto& sources = model.edge_sources[static_cast<std::size_t>(cls)];
        const auto& own_ws = data.own[static_cast<std::size_t>(i)];
        for (long t = boundary; t < len; ++t) {
            const long row = t - data.max_lag; // target_index[row] == t by construction
            const auto own_seq = scalar_sequence(own_ws.inputs, row);
            std::vector<std::optional<std::vector<Eigen::VectorXd>>> pooled(sources.size());
            for (std::size_t slot = 0; slot < sources.size(); ++slot) {
                const auto& ws = data.pooled[static_cast<std::size_t>(i)][slot];
                if (ws) pooled[slot].emplace(scalar_sequence(ws->inputs, row));
            }
            const double pred =
                forward_node(model, cls, i, own_seq, pooled_pointers(pooled), false, nullptr, nullptr) *
                scale[static_cast<std::size_t>(i)];
            run.pred_cdf[static_cast<std::size_t>(i)].push_back(pred);
            run.actual_cdf[static_cast<std::size_t>(i)].push_back(
                sr_series.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
        }
        // PDF recovery: within-day first difference of the cumulative
        // prediction against the previous *actual* cumulative sample.
        const auto& sr = sr_series.values[static_cast<std::size_t>(i)];
        for (long day = boundary / sr_period; day < len / sr_period; ++day) {
            for (int k = 0; k < period; ++k) {
                const long s = day * sr_period + 2 * k;
                const double pred = run.pred_cdf[static_cast<std::size_t>(i)][static_cast<std::size_t>(s - boundary)];
                const double actual = sr[static_cast<std::size_t>(s)];
                double pred_pdf = pred;
                double actual_pdf = actual;
                if (k > 0) {
                    pred_pdf = pred - sr[static_cast<std::size_t>(s - 2)];
                    actual_pdf = actual - sr[static_cast<std::size_t>(s - 2)];
                }
                run.pred_pdf[static_cast<std::size_t>(i)].push_back(pred_pdf);
                run.actual_pdf[static_cast<std::size_t>(i)].push_back(actual_pdf);
            }
        }
    }

    // Macro-averaged RMSE; the CDF score uses the even offsets (the true
    // cumulative samples).
    run.class_rmse_cdf.assign(static_cast<std::size_t>(model.num_classes), 0.0);
    run.class_rmse_pdf.assign(static_cast<std::size_t>(model.num_classes), 0.0);
    std::vector<int> class_count(static_cast<std::size_t>(model.num_classes), 0);
    double total_cdf = 0.0;
    double total_pdf = 0.0;
    for (int i = 0; i < n; ++i) {
        double sse_cdf = 0.0;
        long m_cdf = 0;
        for (std::size_t idx = 0; idx < run.pred_cdf[static_cast<std::size_t>(i)].size(); ++idx) {
            if ((static_cast<long>(idx) + boundary) % sr_period % 2 != 0) continue;
            const double d = run.pred_cdf[static_cast<std::size_t>(i)][idx] -
                             run.actual_cdf[static_cast<std::size_t>(i)][idx];
            sse_cdf += d * d;
            ++m_cdf;
        }
        double sse_pdf = 0.0;
        for (std::size_t idx = 0; idx < run.pred_pdf[static_cast<std::size_t>(i)].size(); ++idx) {
            const double d = run.pred_pdf[static_cast<std::size_t>(i)][idx] -
                             run.actual_pdf[static_cast<std::size_t>(i)][idx];
            sse_pdf += d * d;
        }
        const double node_rmse_cdf = std::sqrt(sse_cdf / static_cast<double>(m_cdf));
        const double node_rmse_pdf =
            std::sqrt(sse_pdf / static_cast<double>(run.pred_pdf[static_cast<std::size_t>(i)].size()));
        total_cdf += node_rmse_cdf;
        total_pdf += node_rmse_pdf;
        const int cls = graph.node_class[static_cast<std::size_t>(i)];
        run.class_rmse_cdf[static_cast<std::size_t>(cls)] += node_rmse_cdf;
        run.class_rmse_pdf[static_cast<std::size_t>(cls)] += node_rmse_pdf;
        ++class_count[static_cast<std::size_t>(cls)];
    }
    run.rmse_cdf = total_cdf / static_cast<double>(n);
    run.rmse_pdf = total_pdf / static_cast<double>(n);
    for (int k = 0; k < model.num_classes; ++k) {
        if (class_count[static_cast<std::size_t>(k)] > 0) {
            run.class_rmse_cdf[static_cast<std::size_t>(k)] /= class_count[static_cast<std::size_t>(k)];
            run.class_rmse_pdf[static_cast<std::size_t>(k)] /= class_count[static_cast<std::size_t>(k)];
        }
    }
    return run;
}

std::vector<double> historical_average(const std::vector<double>& series, std::size_t train_len,
                                       int period) {
    if (period < 1) throw ConfigError("historical_average: period must be >= 1");
    if (train_len == 0 || train_len > series.size()) {
        throw DataError("historical_average: train length out of range");
    }
    std::vector<double> slot_sum(static_cast<std::size_t>(period), 0.0);
    std::vector<long> slot_count(static_cast<std::size_t>(period), 0);
    double global_sum = 0.0;
    for (std::size_t t = 0; t < train_len; ++t) {
        slot_sum[t % static_cast<std::size_t>(period)] += series[t];
        ++slot_count[t % static_cast<std::size_t>(period)];
        global_sum += series[t];
    }
    const double global_mean = global_sum / static_cast<double>(train_len);
    std::vector<double> pred;
    pred.reserve(series.size() - train_len);
    for (std::size_t t = train_len; t < series.size(); ++t) {
        const std::size_t slot = t % static_cast<std::size_t>(period);
        pred.push_back(slot_count[slot] > 0 ? slot_sum[slot] / static_cast<double>(slot_count[slot])
                                            : global_mean);
    }
    return pred;
}

std::vector<double> knn_predict(const std::vector<double>& series, std::size_t train_len, int k,
                                int window) {
    if (k < 1) throw ConfigError("knn_predict: k must be >= 1");
    if (window < 1) throw ConfigError("knn_predict: window must be >= 1");
    if (train_len > series.size()) throw DataError("knn_predict: train length out of range");
    const auto w = static_cast<std::size_t>(window);
    if (train_len <= w) throw DataError("knn_predict: training segment shorter than the window");

    std::vector<double> pred;
    pred.reserve(series.size() - train_len);
    for (std::size_t t = train_len; t < series.size(); ++t) {
        // Distances to every training window; ties resolved to the earlier
        // index by the stable ordering of (distance, index).
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(train_len - w);
        for (std::size_t c = w; c < train_len; ++c) {
            double dist = 0.0;
            for (std::size_t o = 0; o < w; ++o) {
                const double d = series[t - w + o] - series[c - w + o];
                dist += d * d;
            }
            scored.emplace_back(dist, c);
        }
        std::sort(scored.begin(), scored.end());
        const std::size_t use = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < use; ++i) sum += series[scored[i].second];
        pred.push_back(sum / static_cast<double>(use));
    }
    return pred;
}

nlohmann::json model_to_json(const GsrnnModel& model) {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "gsrnn";
    j["config"] = {{"input_units", model.cfg.input_units},
                   {"edge_units", model.cfg.edge_units},
                   {"node_units", model.cfg.node_units},
                   {"dropout", model.cfg.dropout},
                   {"lags", model.cfg.lags},
                   {"skip_nearest", model.cfg.skip_nearest},
                   {"intra_class_edges", model.cfg.intra_class_edges},
                   {"per_node_node_rnn", model.cfg.per_node_node_rnn}};
    j["num_classes"] = model.num_classes;
    j["edge_sources"] = model.edge_sources;
    j["input_rnns"] = nlohmann::json::array();
    for (const auto& net : model.input_rnns) j["input_rnns"].push_back(neural::cascade_to_json(net));
    j["edge_rnns"] = nlohmann::json::array();
    for (const auto& [key, net] : model.edge_rnns) {
        j["edge_rnns"].push_back({{"dst_class", key.first},
                                  {"src_class", key.second},
                                  {"net", neural::cascade_to_json(net)}});
    }
    j["node_rnns"] = nlohmann::json::array();
    for (const auto& net : model.node_rnns) j["node_rnns"].push_back(neural::cascade_to_json(net));
    j["node_scale"] = model.node_scale;
    return j;
}

GsrnnModel model_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "gsrnn") throw DataError("checkpoint: not a gsrnn model");
    GsrnnModel model;
    const auto& c = j.at("config");
    model.cfg.input_units = c.at("input_units").get<std::vector<int>>();
    model.cfg.edge_units = c.at("edge_units").get<std::vector<int>>();
    model.cfg.node_units = c.at("node_units").get<std::vector<int>>();
    model.cfg.dropout = c.at("dropout").get<double>();
    model.cfg.lags = c.at("lags").get<std::vector<int>>();
    model.cfg.skip_nearest = c.at("skip_nearest").get<bool>();
    model.cfg.intra_class_edges = c.at("intra_class_edges").get<bool>();
    model.cfg.per_node_node_rnn = c.at("per_node_node_rnn").get<bool>();
    model.num_classes = j.at("num_classes").get<int>();
    model.edge_sources = j.at("edge_sources").get<std::vector<std::vector<int>>>();
    for (const auto& net : j.at("input_rnns")) model.input_rnns.push_back(neural::cascade_from_json(net));
    for (const auto& e : j.at("edge_rnns")) {
        model.edge_rnns.emplace(std::make_pair(e.at("dst_class").get<int>(), e.at("src_class").get<int>()),
                                neural::cascade_from_json(e.at("net")));
    }
    for (const auto& net : j.at("node_rnns")) model.node_rnns.push_back(neural::cascade_from_json(net));
    model.node_scale = j.value("node_scale", std::vector<double>{});
    return model;
}

void save_checkpoint(const GsrnnModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << model_to_json(model).dump() << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

GsrnnModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

} // namespace stcast::gsrnn
