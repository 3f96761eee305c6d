#include "stcast/gsrnn.hpp"
#include "stcast/augment.hpp"
#include "stcast/errors.hpp"
#include "stcast/metrics.hpp"
#include "stcast/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace stcast;
using namespace stcast::gsrnn;

namespace {

NodeSeries series_from(std::vector<std::vector<double>> values, SeriesState state,
                       int period = 0) {
    NodeSeries s;
    s.values = std::move(values);
    s.state = state;
    s.period = period;
    return s;
}

// Raw Poisson-ish count series from a synthetic multivariate Hawkes problem.
NodeSeries synthetic_counts(int nodes, int days, std::uint64_t seed, double sparsity = 0.3) {
    synth::SyntheticSpec spec;
    spec.num_nodes = nodes;
    spec.sparsity = sparsity;
    spec.mu_max = 0.3;
    spec.horizon = static_cast<double>(days) * 24.0;
    spec.seed = seed;
    const synth::GeneratedProblem p = synth::generate(spec);
    return bin_counts(p.events, 1.0);
}

NodeSeries augment_counts(const NodeSeries& raw, int period = 24) {
    return augment::super_resolve(augment::cumulate(raw, period, augment::PadPolicy::DropPartial),
                                  period);
}

GsrnnConfig tiny_config() {
    GsrnnConfig cfg;
    cfg.input_units = {3};
    cfg.edge_units = {3};
    cfg.node_units = {4};
    cfg.lags = {2, 3, 4};
    return cfg;
}

} // namespace

TEST_CASE("partition_nodes: K = 1 puts everything in class 0") {
    const NodeSeries s = series_from({{1, 2}, {5, 5}, {0, 1}}, SeriesState::Raw);
    const std::vector<int> labels = partition_nodes(s, 1);
    CHECK(labels == std::vector<int>{0, 0, 0});
}

TEST_CASE("partition_nodes ranks by total count") {
    const NodeSeries s = series_from({{1}, {10}, {100}}, SeriesState::Raw);
    const std::vector<int> labels = partition_nodes(s, 3);
    CHECK(labels == std::vector<int>{0, 1, 2});
}

TEST_CASE("partition_nodes group sizes differ by at most one") {
    Rng rng(5);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 5 + static_cast<int>(rng.uniform_int(20));
        const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        std::vector<std::vector<double>> values(static_cast<std::size_t>(n));
        for (auto& node : values) node = {rng.uniform(0.0, 50.0)};
        const std::vector<int> labels = partition_nodes(series_from(std::move(values), SeriesState::Raw), k);
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int c : labels) ++sizes[static_cast<std::size_t>(c)];
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        CHECK(*hi - *lo <= 1);
    }
}

TEST_CASE("lattice_graph basics and the directed edge-count formula") {
    CHECK(lattice_graph(1, 1).edges.empty());
    const WeightedGraph g22 = lattice_graph(2, 2);
    CHECK(g22.edges.size() == 8);
    for (const GraphEdge& e : g22.edges) CHECK(e.weight == 0.25);

    Rng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const int r = 1 + static_cast<int>(rng.uniform_int(7));
        const int c = 1 + static_cast<int>(rng.uniform_int(7));
        const WeightedGraph g = lattice_graph(r, c);
        const std::size_t expected = 2 * (static_cast<std::size_t>(r) * (c - 1) +
                                          static_cast<std::size_t>(c) * (r - 1));
        CHECK(g.edges.size() == expected);
        g.validate();
    }
}

TEST_CASE("pool_neighbors: weighted sum over in-neighbors of one class") {
    WeightedGraph g;
    g.num_nodes = 4;
    g.node_class = {0, 1, 1, 0};
    g.edges = {{1, 0, 0.5}, {2, 0, 0.25}, {3, 0, 1.0}, {0, 1, 0.7}};
    std::vector<Eigen::VectorXd> inputs;
    for (int i = 0; i < 4; ++i) inputs.push_back(Eigen::VectorXd::Constant(2, static_cast<double>(i + 1)));

    SUBCASE("no neighbors of the class gives a zero vector") {
        const Eigen::VectorXd pooled = pool_neighbors(g, 1, 1, inputs);
        CHECK(pooled.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("single neighbor with weight one is the identity") {
        const Eigen::VectorXd pooled = pool_neighbors(g, 0, 0, inputs); // only 3 -> 0 with weight 1
        CHECK((pooled - inputs[3]).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("hand-computed three-neighbor sum") {
        const Eigen::VectorXd pooled = pool_neighbors(g, 0, 1, inputs); // 1 and 2 feed node 0
        const Eigen::VectorXd expected = 0.5 * inputs[1] + 0.25 * inputs[2];
        CHECK((pooled - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("linearity and weight homogeneity") {
        Rng rng(7);
        std::vector<Eigen::VectorXd> xs, ys;
        for (int i = 0; i < 4; ++i) {
            xs.push_back(Eigen::VectorXd::Random(3));
            ys.push_back(Eigen::VectorXd::Random(3));
        }
        const double a = 1.7, b = -0.4;
        std::vector<Eigen::VectorXd> mix;
        for (int i = 0; i < 4; ++i) mix.push_back(a * xs[static_cast<std::size_t>(i)] + b * ys[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd lhs = pool_neighbors(g, 0, 1, mix);
        const Eigen::VectorXd rhs = a * pool_neighbors(g, 0, 1, xs) + b * pool_neighbors(g, 0, 1, ys);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

        WeightedGraph doubled = g;
        for (GraphEdge& e : doubled.edges) e.weight *= 2.0;
        const Eigen::VectorXd twice = pool_neighbors(doubled, 0, 1, xs);
        CHECK((twice - 2.0 * pool_neighbors(g, 0, 1, xs)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("missing neighbor data is an input error") {
        std::vector<Eigen::VectorXd> short_inputs(2, Eigen::VectorXd::Zero(2));
        CHECK_THROWS_AS(pool_neighbors(g, 0, 1, short_inputs), DataError);
    }
}

TEST_CASE("edgeless GSRNN equals the plain cascade of input and node layers") {
    WeightedGraph g;
    g.num_nodes = 5;
    g.node_class = {0, 1, 0, 2, 1};
    Rng rng(8);
    const GsrnnConfig cfg = tiny_config();
    const GsrnnModel model = make_model(g, cfg, rng);
    CHECK(model.edge_rnns.empty());

    const NodeSeries sr = augment_counts(synthetic_counts(5, 4, 11));
    const long t = 30;
    const Eigen::VectorXd out = gsrnn_forward_at(model, g, sr, t);

    for (int node = 0; node < 5; ++node) {
        const int cls = g.node_class[static_cast<std::size_t>(node)];
        // Identical parameters rearranged as one flat cascade.
        neural::CascadeNet flat;
        flat.dropout = 0.0;
        for (const auto& l : model.input_rnns[static_cast<std::size_t>(cls)].layers) flat.layers.push_back(l);
        for (const auto& l : model.node_rnns[static_cast<std::size_t>(cls)].layers) flat.layers.push_back(l);
        flat.head = model.node_rnns[static_cast<std::size_t>(cls)].head;
        std::vector<Eigen::VectorXd> seq;
        for (int lag : cfg.lags) {
            seq.push_back(Eigen::VectorXd::Constant(
                1, sr.values[static_cast<std::size_t>(node)][static_cast<std::size_t>(t - lag)]));
        }
        CHECK(out[node] == neural::predict(flat, seq));
    }
}

TEST_CASE("single-node GSRNN equals the cascade forward exactly") {
    WeightedGraph g;
    g.num_nodes = 1;
    g.node_class = {0};
    Rng rng(9);
    const GsrnnConfig cfg = tiny_config();
    const GsrnnModel model = make_model(g, cfg, rng);

    const NodeSeries sr = augment_counts(synthetic_counts(1, 4, 12));
    const long t = 25;
    const Eigen::VectorXd out = gsrnn_forward_at(model, g, sr, t);

    neural::CascadeNet flat;
    for (const auto& l : model.input_rnns[0].layers) flat.layers.push_back(l);
    for (const auto& l : model.node_rnns[0].layers) flat.layers.push_back(l);
    flat.head = model.node_rnns[0].head;
    std::vector<Eigen::VectorXd> seq;
    for (int lag : cfg.lags) {
        seq.push_back(Eigen::VectorXd::Constant(1, sr.values[0][static_cast<std::size_t>(t - lag)]));
    }
    CHECK(out[0] == neural::predict(flat, seq));
}

TEST_CASE("two-node two-class toy matches a hand-computed pipeline") {
    WeightedGraph g;
    g.num_nodes = 2;
    g.node_class = {0, 1};
    g.edges = {{0, 1, 0.6}, {1, 0, 0.3}}; // both directions, distinct weights
    GsrnnConfig cfg;
    cfg.input_units = {1};
    cfg.edge_units = {1};
    cfg.node_units = {1};
    cfg.lags = {2, 3};
    Rng rng(10);
    GsrnnModel model = make_model(g, cfg, rng);

    // Pin every parameter to hand-picked values.
    auto set_scalar_lstm = [](neural::LstmLayer& l, std::initializer_list<double> w_in,
                              std::initializer_list<double> w_rec, std::initializer_list<double> b) {
        int k = 0;
        for (double v : w_in) l.w_in(k++, 0) = v;
        k = 0;
        for (double v : w_rec) l.w_rec(k++, 0) = v;
        k = 0;
        for (double v : b) l.bias[k++] = v;
    };
    set_scalar_lstm(model.input_rnns[0].layers[0], {0.4, -0.3, 0.8, 0.2}, {0.1, 0.2, -0.5, 0.3},
                    {0.0, 1.0, 0.1, -0.2});
    set_scalar_lstm(model.input_rnns[1].layers[0], {0.6, 0.1, -0.7, 0.4}, {-0.2, 0.3, 0.25, 0.1},
                    {0.05, 1.0, -0.1, 0.2});
    set_scalar_lstm(model.edge_rnns.at({0, 1}).layers[0], {0.3, 0.2, 0.5, -0.4},
                    {0.15, -0.1, 0.2, 0.35}, {0.1, 1.0, 0.0, 0.05});
    set_scalar_lstm(model.edge_rnns.at({1, 0}).layers[0], {-0.5, 0.25, 0.6, 0.3},
                    {0.2, 0.1, -0.3, 0.15}, {-0.05, 1.0, 0.2, 0.1});
    // Node RNNs consume [input hidden, edge hidden] (2 inputs).
    auto set_node_lstm = [](neural::LstmLayer& l, std::initializer_list<double> w_col0,
                            std::initializer_list<double> w_col1,
                            std::initializer_list<double> w_rec, std::initializer_list<double> b) {
        int k = 0;
        for (double v : w_col0) l.w_in(k++, 0) = v;
        k = 0;
        for (double v : w_col1) l.w_in(k++, 1) = v;
        k = 0;
        for (double v : w_rec) l.w_rec(k++, 0) = v;
        k = 0;
        for (double v : b) l.bias[k++] = v;
    };
    set_node_lstm(model.node_rnns[0].layers[0], {0.5, 0.2, -0.4, 0.3}, {0.1, -0.3, 0.6, 0.2},
                  {0.25, 0.1, 0.2, -0.15}, {0.0, 1.0, 0.05, 0.1});
    set_node_lstm(model.node_rnns[1].layers[0], {-0.3, 0.4, 0.2, 0.6}, {0.35, 0.1, -0.2, 0.15},
                  {0.1, 0.3, 0.15, 0.2}, {0.1, 1.0, -0.05, 0.0});
    model.node_rnns[0].head->weight(0, 0) = 1.2;
    model.node_rnns[0].head->bias[0] = 0.3;
    model.node_rnns[1].head->weight(0, 0) = -0.8;
    model.node_rnns[1].head->bias[0] = 0.1;

    const std::vector<double> series0{0.5, 1.0, 2.0, 2.5, 3.0};
    const std::vector<double> series1{1.5, 0.5, 1.0, 2.0, 0.0};
    NodeSeries sr = series_from({series0, series1}, SeriesState::SuperResolved, 5);
    const long t = 4; // lags 2, 3 -> inputs at times 2, 1

    auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    // Scalar LSTM oracle (input may be 1- or 2-dimensional).
    auto lstm_run = [&](const neural::LstmLayer& l, const std::vector<Eigen::VectorXd>& xs) {
        double h = 0.0, c = 0.0;
        std::vector<double> hs;
        for (const auto& x : xs) {
            double pre_i = l.bias[0] + l.w_rec(0, 0) * h;
            double pre_f = l.bias[1] + l.w_rec(1, 0) * h;
            double pre_g = l.bias[2] + l.w_rec(2, 0) * h;
            double pre_o = l.bias[3] + l.w_rec(3, 0) * h;
            for (int d = 0; d < x.size(); ++d) {
                pre_i += l.w_in(0, d) * x[d];
                pre_f += l.w_in(1, d) * x[d];
                pre_g += l.w_in(2, d) * x[d];
                pre_o += l.w_in(3, d) * x[d];
            }
            const double i = sigmoid(pre_i);
            const double f = sigmoid(pre_f);
            const double gg = std::tanh(pre_g);
            const double o = sigmoid(pre_o);
            c = f * c + i * gg;
            h = o * std::tanh(c);
            hs.push_back(h);
        }
        return hs;
    };
    auto scalar_inputs = [](std::vector<double> vals) {
        std::vector<Eigen::VectorXd> xs;
        for (double v : vals) xs.push_back(Eigen::VectorXd::Constant(1, v));
        return xs;
    };

    // Node 0 (class 0): own lags (t-2, t-3) = (2.0, 1.0); pooled from node 1
    // with weight 0.3: (0.3, 0.15).
    const auto h_in0 = lstm_run(model.input_rnns[0].layers[0], scalar_inputs({2.0, 1.0}));
    const auto h_edge0 = lstm_run(model.edge_rnns.at({0, 1}).layers[0],
                                  scalar_inputs({0.3 * 1.0, 0.3 * 0.5}));
    std::vector<Eigen::VectorXd> node0_in;
    for (std::size_t s = 0; s < 2; ++s) {
        Eigen::VectorXd v(2);
        v << h_in0[s], h_edge0[s];
        node0_in.push_back(v);
    }
    const auto h_node0 = lstm_run(model.node_rnns[0].layers[0], node0_in);
    const double expected0 = 1.2 * h_node0.back() + 0.3;

    // Node 1 (class 1): own lags (1.0, 0.5); pooled from node 0 with weight
    // 0.6: (1.2, 0.6).
    const auto h_in1 = lstm_run(model.input_rnns[1].layers[0], scalar_inputs({1.0, 0.5}));
    const auto h_edge1 = lstm_run(model.edge_rnns.at({1, 0}).layers[0],
                                  scalar_inputs({0.6 * 2.0, 0.6 * 1.0}));
    std::vector<Eigen::VectorXd> node1_in;
    for (std::size_t s = 0; s < 2; ++s) {
        Eigen::VectorXd v(2);
        v << h_in1[s], h_edge1[s];
        node1_in.push_back(v);
    }
    const auto h_node1 = lstm_run(model.node_rnns[1].layers[0], node1_in);
    const double expected1 = -0.8 * h_node1.back() + 0.1;

    const Eigen::VectorXd out = gsrnn_forward_at(model, g, sr, t);
    CHECK(out[0] == doctest::Approx(expected0).epsilon(1e-10));
    CHECK(out[1] == doctest::Approx(expected1).epsilon(1e-10));
}

TEST_CASE("disabling intra-class edge RNNs drops same-class edges") {
    WeightedGraph g;
    g.num_nodes = 2;
    g.node_class = {0, 0};
    g.edges = {{0, 1, 0.5}, {1, 0, 0.5}};
    GsrnnConfig cfg = tiny_config();
    cfg.intra_class_edges = false;
    Rng rng(20);
    const GsrnnModel model = make_model(g, cfg, rng);
    CHECK(model.edge_rnns.empty());

    cfg.intra_class_edges = true;
    Rng rng2(20);
    const GsrnnModel with_intra = make_model(g, cfg, rng2);
    CHECK(with_intra.edge_rnns.size() == 1);
    CHECK(with_intra.edge_rnns.count({0, 0}) == 1);
}

TEST_CASE("training visits every node when subsample is 1 and records one loss per epoch") {
    const NodeSeries sr = augment_counts(synthetic_counts(4, 4, 30));
    WeightedGraph g;
    g.num_nodes = 4;
    g.node_class = {0, 0, 1, 1};
    g.edges = {{0, 2, 0.5}, {2, 0, 0.4}, {1, 3, 0.3}, {3, 1, 0.6}};
    Rng rng(21);
    GsrnnModel model = make_model(g, tiny_config(), rng);
    GsrnnTrainConfig cfg;
    cfg.base.epochs = 3;
    cfg.base.seed = 21;
    cfg.base.lags = model.cfg.lags;
    const TrainResult result = train(model, g, sr, cfg);
    CHECK(result.loss_history.size() == 3);
    REQUIRE(result.sampled_node_count.size() == 3);
    for (std::size_t nodes : result.sampled_node_count) CHECK(nodes == 4);
}

TEST_CASE("subsampling draws the configured fraction and rejects zero") {
    const NodeSeries sr = augment_counts(synthetic_counts(6, 4, 31));
    WeightedGraph g;
    g.num_nodes = 6;
    g.node_class = {0, 0, 0, 1, 1, 1};
    Rng rng(22);
    GsrnnModel model = make_model(g, tiny_config(), rng);
    GsrnnTrainConfig cfg;
    cfg.base.epochs = 2;
    cfg.base.lags = model.cfg.lags;
    cfg.subsample_fraction = 0.5;
    const TrainResult result = train(model, g, sr, cfg);
    for (std::size_t nodes : result.sampled_node_count) CHECK(nodes == 4); // ceil(0.5 * 3) per class

    cfg.subsample_fraction = 0.0;
    Rng rng2(22);
    GsrnnModel model2 = make_model(g, tiny_config(), rng2);
    CHECK_THROWS_AS(train(model2, g, sr, cfg), ConfigError);
}

TEST_CASE("training requires an augmented series") {
    const NodeSeries raw = synthetic_counts(2, 3, 33);
    WeightedGraph g;
    g.num_nodes = 2;
    g.node_class = {0, 0};
    Rng rng(23);
    GsrnnModel model = make_model(g, tiny_config(), rng);
    GsrnnTrainConfig cfg;
    cfg.base.lags = model.cfg.lags;
    CHECK_THROWS_AS(train(model, g, raw, cfg), DataError);
}

TEST_CASE("tiny four-node problem overfits its training series") {
    // 5-seed median of the final training RMSE against the target scale.
    std::vector<double> ratios;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const NodeSeries sr = augment_counts(synthetic_counts(4, 6, 40 + seed));
        WeightedGraph g;
        g.num_nodes = 4;
        g.node_class = {0, 0, 1, 1};
        g.edges = {{0, 2, 0.5}, {2, 0, 0.4}, {1, 3, 0.3}, {3, 1, 0.6}};
        GsrnnConfig net_cfg = tiny_config();
        net_cfg.input_units = {6};
        net_cfg.edge_units = {6};
        net_cfg.node_units = {8};
        Rng rng(seed);
        GsrnnModel model = make_model(g, net_cfg, rng);
        GsrnnTrainConfig cfg;
        cfg.base.epochs = 80;
        cfg.base.learning_rate = 0.01;
        cfg.base.seed = seed;
        cfg.base.lags = net_cfg.lags;
        const TrainResult result = train(model, g, sr, cfg);
        double scale = 0.0;
        for (const auto& node : sr.values) {
            for (double v : node) scale = std::max(scale, std::abs(v));
        }
        ratios.push_back(std::sqrt(result.loss_history.back()) / scale);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[2] < 0.05);
}

TEST_CASE("forecast on a constant series collapses to zero error") {
    NodeSeries raw = series_from({std::vector<double>(24 * 6, 2.0)}, SeriesState::Raw);
    const NodeSeries sr = augment_counts(raw);
    WeightedGraph g;
    g.num_nodes = 1;
    g.node_class = {0};
    GsrnnConfig net_cfg = tiny_config();
    net_cfg.input_units = {4};
    net_cfg.node_units = {4};
    Rng rng(50);
    GsrnnModel model = make_model(g, net_cfg, rng);
    GsrnnTrainConfig cfg;
    cfg.base.epochs = 120;
    cfg.base.learning_rate = 0.01;
    cfg.base.seed = 50;
    cfg.base.lags = net_cfg.lags;
    cfg.train_end = 4 * 47; // train on the first four days
    train(model, g, sr, cfg);
    const ForecastRun run = forecast(model, g, sr, 2);
    CHECK(run.pred_cdf[0].size() == 2 * 47); // predictions cover the test range
    CHECK(run.pred_pdf[0].size() == 2 * 24);
    CHECK(run.rmse_pdf < 0.05);
    CHECK(run.rmse_cdf < 0.2);
}

TEST_CASE("forecast range errors when the test segment eats the history") {
    const NodeSeries sr = augment_counts(synthetic_counts(2, 3, 60));
    WeightedGraph g;
    g.num_nodes = 2;
    g.node_class = {0, 0};
    Rng rng(61);
    GsrnnModel model = make_model(g, tiny_config(), rng);
    CHECK_THROWS_AS(forecast(model, g, sr, 3), DataError);
    const NodeSeries raw = synthetic_counts(2, 3, 60);
    CHECK_THROWS_AS(forecast(model, g, raw, 1), DataError);
}

TEST_CASE("no leak: later values never change earlier predictions") {
    NodeSeries raw = synthetic_counts(3, 6, 70);
    WeightedGraph g;
    g.num_nodes = 3;
    g.node_class = {0, 1, 1};
    g.edges = {{0, 1, 0.4}, {1, 0, 0.7}, {2, 1, 0.9}, {1, 2, 0.2}};
    Rng rng(71);
    const GsrnnModel model = make_model(g, tiny_config(), rng); // untrained weights suffice
    const ForecastRun base = forecast(model, g, augment_counts(raw), 2);

    // Perturb the last raw day; day 5's predictions (the first test day) must
    // stay bit-identical on every node.
    NodeSeries edited = raw;
    for (auto& node : edited.values) node[24 * 5 + 7] += 3.0;
    const ForecastRun perturbed = forecast(model, g, augment_counts(edited), 2);
    for (int u = 0; u < 3; ++u) {
        for (int s = 0; s < 47; ++s) {
            CHECK(base.pred_cdf[static_cast<std::size_t>(u)][static_cast<std::size_t>(s)] ==
                  perturbed.pred_cdf[static_cast<std::size_t>(u)][static_cast<std::size_t>(s)]);
        }
    }
}

TEST_CASE("historical average baseline") {
    SUBCASE("constant series predicts itself") {
        std::vector<double> s(40, 3.5);
        const std::vector<double> pred = historical_average(s, 30, 7);
        for (double p : pred) CHECK(p == doctest::Approx(3.5));
    }
    SUBCASE("perfectly periodic series is recovered exactly") {
        std::vector<double> s;
        for (int t = 0; t < 48; ++t) s.push_back(static_cast<double>(t % 6));
        const std::vector<double> pred = historical_average(s, 36, 6);
        for (std::size_t k = 0; k < pred.size(); ++k) {
            CHECK(pred[k] == doctest::Approx(s[36 + k]));
        }
    }
    SUBCASE("random series matches the direct slot mean") {
        Rng rng(80);
        std::vector<double> s(50);
        for (auto& v : s) v = rng.uniform(0.0, 4.0);
        const int period = 5;
        const std::size_t train_len = 41;
        const std::vector<double> pred = historical_average(s, train_len, period);
        for (std::size_t t = train_len; t < s.size(); ++t) {
            double sum = 0.0;
            long count = 0;
            for (std::size_t q = t % period; q < train_len; q += period) {
                sum += s[q];
                ++count;
            }
            CHECK(pred[t - train_len] == doctest::Approx(sum / count).epsilon(1e-12));
        }
    }
}

TEST_CASE("knn baseline") {
    SUBCASE("an exact repeat with k = 1 predicts that pattern's successor") {
        std::vector<double> s{1, 2, 3, 9, 1, 2, 3, 7, 5, 5, 1, 2, 3};
        const std::vector<double> pred = knn_predict(s, 10, 1, 3);
        // Query window (5, 1, 2)... wait: last three before t=10 are s[7..9].
        CHECK(pred.size() == 3);
        // At t = 12 the query is (5, 1, 2)? Recompute: windows are the three
        // values right before t. t=10: (7,5,5); t=11: (5,5,1); t=12: (5,1,2).
        // Simpler check: construct a repeat directly.
        std::vector<double> r{4, 8, 6, 4, 8, 6};
        const std::vector<double> p2 = knn_predict(r, 5, 1, 2);
        // Query for t=5 is (4,8); the only training window starting match is
        // t'=3 with successor... windows: t'=2:(4,8)->6, t'=3:(8,6)->4,
        // t'=4:(6,4)->8. Nearest is t'=2, successor 6.
        CHECK(p2[0] == doctest::Approx(6.0));
    }
    SUBCASE("k covering all windows returns the global successor mean") {
        std::vector<double> s{2, 4, 6, 8, 10, 12, 14};
        const std::vector<double> pred = knn_predict(s, 6, 100, 2);
        // Training windows end at t' = 2..5 with successors 6, 8, 10, 12.
        CHECK(pred[0] == doctest::Approx((6.0 + 8.0 + 10.0 + 12.0) / 4.0));
    }
    SUBCASE("random case matches an exhaustive scan oracle") {
        Rng rng(81);
        std::vector<double> s(60);
        for (auto& v : s) v = rng.uniform(0.0, 5.0);
        const std::size_t train_len = 50;
        const int k = 3;
        const int window = 4;
        const std::vector<double> pred = knn_predict(s, train_len, k, window);
        for (std::size_t t = train_len; t < s.size(); ++t) {
            std::vector<std::pair<double, std::size_t>> scored;
            for (std::size_t c = window; c < train_len; ++c) {
                double d = 0.0;
                for (int o = 0; o < window; ++o) {
                    const double diff = s[t - window + o] - s[c - window + o];
                    d += diff * diff;
                }
                scored.emplace_back(d, c);
            }
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            double sum = 0.0;
            for (int i = 0; i < k; ++i) sum += s[scored[static_cast<std::size_t>(i)].second];
            CHECK(pred[t - train_len] == doctest::Approx(sum / k).epsilon(1e-12));
        }
    }
}

TEST_CASE("gsrnn checkpoint round trip preserves the forward map") {
    const NodeSeries sr = augment_counts(synthetic_counts(4, 4, 90));
    WeightedGraph g;
    g.num_nodes = 4;
    g.node_class = {0, 1, 1, 0};
    g.edges = {{0, 1, 0.5}, {1, 0, 0.3}, {2, 3, 0.9}, {3, 2, 0.8}, {1, 2, 0.4}};
    Rng rng(91);
    const GsrnnModel model = make_model(g, tiny_config(), rng);
    const std::string path = (std::filesystem::temp_directory_path() / "stcast_gsrnn_ckpt.json").string();
    save_checkpoint(model, path);
    const GsrnnModel loaded = load_checkpoint(path);
    std::remove(path.c_str());
    const Eigen::VectorXd a = gsrnn_forward_at(model, g, sr, 20);
    const Eigen::VectorXd b = gsrnn_forward_at(loaded, g, sr, 20);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}
