#include "stcast/cli.hpp"

#include "stcast/errors.hpp"
#include "stcast/gsrnn.hpp"
#include "stcast/ioutil.hpp"
#include "stcast/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace stcast::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    if (dir.empty()) throw ConfigError("output directory must be given");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// Every command writes a manifest with the seed, a stable hash of its
// configuration, and the artifact version. The timestamp is the only
// non-reproducible field of any output.
void write_manifest(const std::string& out_dir, const std::string& command,
                    std::uint64_t seed, const nlohmann::json& config) {
    nlohmann::json m;
    m["command"] = command;
    m["seed"] = seed;
    m["config"] = config;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    m["config_hash"] = hash;
    m["version"] = kVersion;
    m["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
    std::ofstream out(join(out_dir, "manifest.json"));
    if (!out) throw DataError("cannot write manifest in '" + out_dir + "'");
    out << m.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path + "': " + e.what());
    }
    return j;
}

em::EdgeMask mask_from_graph_file(const std::string& path, int num_nodes) {
    const WeightedGraph g = load_graph(path);
    if (g.num_nodes != num_nodes) {
        throw DataError("prior graph '" + path + "' has " + std::to_string(g.num_nodes) +
                        " nodes, expected " + std::to_string(num_nodes));
    }
    em::EdgeMask mask = em::EdgeMask::Constant(num_nodes, num_nodes, false);
    for (const GraphEdge& e : g.edges) mask(e.dst, e.src) = true; // src influences dst
    return mask;
}

em::EdgeMask positive_entries(const Eigen::MatrixXd& A) {
    em::EdgeMask mask = em::EdgeMask::Constant(A.rows(), A.cols(), false);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) mask(i, j) = A(i, j) > 0.0;
    }
    return mask;
}

} // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const NumericError*>(&e)) return 4;
    return 1;
}

void cmd_simulate(const SimulateArgs& args) {
    ensure_dir(args.out_dir);
    const synth::GeneratedProblem problem = synth::generate(args.spec);
    save_events(problem.events, join(args.out_dir, "events.csv"));
    hawkes::save_model(problem.truth, join(args.out_dir, "truth_model.json"));

    nlohmann::json config;
    config["num_nodes"] = args.spec.num_nodes;
    config["sparsity"] = args.spec.sparsity;
    config["mu_range"] = {args.spec.mu_min, args.spec.mu_max};
    config["a_range"] = {args.spec.a_min, args.spec.a_max};
    config["w"] = args.spec.w;
    config["horizon"] = args.spec.horizon;
    config["self_loops"] = args.spec.include_self_loops;
    write_manifest(args.out_dir, "simulate", args.spec.seed, config);
}

void cmd_infer(const InferArgs& args) {
    ensure_dir(args.out_dir);
    if (args.num_nodes < 1) throw ConfigError("infer: --num-nodes must be >= 1");
    if (args.w_grid.empty()) throw ConfigError("infer: give --w or --w-grid");
    const EventSequence seq = load_events(args.events_path, args.num_nodes, args.horizon);
    em::EMConfig cfg = args.em;
    if (!args.prior_path.empty()) cfg.prior_edges = mask_from_graph_file(args.prior_path, args.num_nodes);

    nlohmann::json config;
    config["events"] = args.events_path;
    config["num_nodes"] = args.num_nodes;
    config["w_grid"] = args.w_grid;
    config["l1_lambda"] = cfg.l1_lambda;
    config["tol"] = cfg.tol;
    config["max_iters"] = cfg.max_iters;
    config["truncation_horizon"] = cfg.truncation_horizon;
    config["prior"] = args.prior_path;

    if (args.w_grid.size() == 1) {
        const em::EMState state = em::fit({seq}, args.w_grid.front(), cfg);
        hawkes::save_model(state.model, join(args.out_dir, "model.json"));
        em::save_iteration_log(state, join(args.out_dir, "em_log.csv"));
    } else {
        const em::GridSearchResult result = em::grid_search_w({seq}, args.w_grid, cfg);
        std::ofstream scan(join(args.out_dir, "w_scan.csv"));
        if (!scan) throw DataError("cannot write w_scan.csv");
        scan << "w,log_likelihood\n";
        for (std::size_t k = 0; k < args.w_grid.size(); ++k) {
            scan << format_double(args.w_grid[k]) << ',' << format_double(result.log_lik[k]) << '\n';
        }
        std::size_t best = 0;
        for (std::size_t k = 0; k < args.w_grid.size(); ++k) {
            if (args.w_grid[k] == result.best_w) best = k;
        }
        hawkes::save_model(result.fits[best].model, join(args.out_dir, "model.json"));
        em::save_iteration_log(result.fits[best], join(args.out_dir, "em_log.csv"));
    }
    write_manifest(args.out_dir, "infer", args.seed, config);
}

void cmd_eval_graph(const EvalGraphArgs& args) {
    ensure_dir(args.out_dir);
    const hawkes::HawkesModel truth = hawkes::load_model(args.truth_path);
    const hawkes::HawkesModel inferred = hawkes::load_model(args.inferred_path);
    if (truth.num_nodes() != inferred.num_nodes()) {
        throw DataError("eval-graph: truth and inferred models differ in size");
    }
    const em::EdgeMask truth_edges = positive_entries(truth.A);
    em::EdgeMask candidates = em::EdgeMask::Constant(truth.num_nodes(), truth.num_nodes(), true);
    if (!args.prior_path.empty()) {
        candidates = mask_from_graph_file(args.prior_path, truth.num_nodes());
        // The candidate set always contains the ground truth.
        candidates = (candidates.array() || truth_edges.array()).matrix();
    }
    const synth::RecoveryResult result = synth::evaluate_recovery(truth_edges, inferred.A, candidates);
    synth::save_roc(result, join(args.out_dir, "roc.csv"));
    nlohmann::json out;
    out["auc"] = result.auc;
    std::ofstream f(join(args.out_dir, "auc.json"));
    f << out.dump(2) << '\n';

    nlohmann::json config;
    config["truth"] = args.truth_path;
    config["inferred"] = args.inferred_path;
    config["prior"] = args.prior_path;
    write_manifest(args.out_dir, "eval-graph", 0, config);
}

void cmd_augment(const AugmentArgs& args) {
    ensure_dir(args.out_dir);
    const NodeSeries input = load_node_series(args.series_path);
    NodeSeries output;
    std::string name;
    if (args.forward) {
        output = augment::super_resolve(augment::cumulate(input, args.period, args.pad), args.period);
        name = "series_augmented.csv";
    } else {
        output = augment::decumulate(augment::downsample(input, args.period), args.period);
        name = "series_raw.csv";
    }
    save_node_series(output, join(args.out_dir, name));

    nlohmann::json config;
    config["series"] = args.series_path;
    config["period"] = args.period;
    config["direction"] = args.forward ? "forward" : "inverse";
    write_manifest(args.out_dir, "augment", 0, config);
}

namespace {

struct TrainSpec {
    std::string series_path;
    std::string graph_path;     // optional
    int lattice_rows = 0;       // optional alternative to graph_path
    int lattice_cols = 0;
    std::string model_kind = "gsrnn"; // gsrnn | joint | single
    int classes = 3;
    int period = 24;
    int test_days = 0;
    gsrnn::GsrnnConfig net;
    neural::TrainConfig train;
    double subsample_fraction = 1.0;
    gsrnn::SubsampleMode subsample_mode = gsrnn::SubsampleMode::Uniform;
};

TrainSpec parse_train_spec(const nlohmann::json& j) {
    TrainSpec s;
    if (!j.contains("series")) throw ConfigError("train config: missing 'series'");
    s.series_path = j.at("series").get<std::string>();
    s.graph_path = j.value("graph", "");
    if (j.contains("lattice")) {
        const auto& l = j.at("lattice");
        if (!l.is_array() || l.size() != 2) throw ConfigError("train config: 'lattice' must be [rows, cols]");
        s.lattice_rows = l[0].get<int>();
        s.lattice_cols = l[1].get<int>();
    }
    s.model_kind = j.value("model", "gsrnn");
    if (s.model_kind != "gsrnn" && s.model_kind != "joint" && s.model_kind != "single") {
        throw ConfigError("train config: model must be gsrnn, joint or single");
    }
    s.classes = j.value("classes", 3);
    s.period = j.value("period", 24);
    s.test_days = j.value("test_days", 0);
    if (s.test_days < 1) throw ConfigError("train config: test_days must be >= 1");

    s.net.input_units = j.value("input_units", std::vector<int>{64});
    s.net.edge_units = j.value("edge_units", std::vector<int>{64});
    s.net.node_units = j.value("node_units", std::vector<int>{128});
    s.net.dropout = j.value("dropout", 0.2);
    s.net.lags = j.value("lags", std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9});
    s.net.skip_nearest = j.value("skip_nearest", true);
    s.net.intra_class_edges = j.value("intra_class_edges", true);
    s.net.per_node_node_rnn = j.value("per_node_node_rnn", false);

    s.train.learning_rate = j.value("learning_rate", 0.001);
    s.train.lr_decay = j.value("lr_decay", 0.0);
    s.train.halve_every_epochs = j.value("halve_every", 0);
    s.train.epochs = j.value("epochs", 200);
    s.train.batch_size = j.value("batch_size", 32);
    s.train.seed = j.value("seed", 0);
    s.train.lags = s.net.lags;
    s.train.skip_nearest = s.net.skip_nearest;

    s.subsample_fraction = j.value("subsample_fraction", 1.0);
    const std::string mode = j.value("subsample_mode", "uniform");
    if (mode == "uniform") s.subsample_mode = gsrnn::SubsampleMode::Uniform;
    else if (mode == "error") s.subsample_mode = gsrnn::SubsampleMode::ErrorProportional;
    else throw ConfigError("train config: subsample_mode must be uniform or error");
    return s;
}

struct PreparedSeries {
    NodeSeries sr;       // super-resolved
    long train_end_sr;   // exclusive target bound on the SR grid
    long boundary_raw;   // first test index on the raw grid
};

PreparedSeries prepare_pipeline_series(const NodeSeries& raw, int period, int test_days) {
    if (raw.state != SeriesState::Raw) {
        throw DataError("pipeline expects a raw series (state tag '" + to_string(raw.state) + "')");
    }
    PreparedSeries p;
    const NodeSeries cumulative = augment::cumulate(raw, period, augment::PadPolicy::DropPartial);
    p.sr = augment::super_resolve(cumulative, period);
    const long days = static_cast<long>(cumulative.length()) / period;
    if (test_days >= days) throw ConfigError("test_days must leave at least one training day");
    const int sr_period = 2 * period - 1;
    p.train_end_sr = (days - test_days) * sr_period;
    p.boundary_raw = (days - test_days) * period;
    return p;
}

WeightedGraph resolve_graph(const TrainSpec& spec, const NodeSeries& raw) {
    WeightedGraph graph;
    if (spec.model_kind == "gsrnn") {
        if (!spec.graph_path.empty()) {
            graph = load_graph(spec.graph_path);
        } else if (spec.lattice_rows > 0) {
            graph = gsrnn::lattice_graph(spec.lattice_rows, spec.lattice_cols);
        } else {
            throw ConfigError("train config: gsrnn model needs 'graph' or 'lattice'");
        }
        if (graph.num_nodes != raw.num_nodes()) {
            throw DataError("graph and series disagree on the node count");
        }
    } else {
        graph.num_nodes = raw.num_nodes();
        graph.node_class.assign(static_cast<std::size_t>(raw.num_nodes()), 0);
    }
    return graph;
}

// Classing uses only the training segment so the labels cannot leak test
// information.
std::vector<int> pipeline_classes(const TrainSpec& spec, const NodeSeries& raw, long boundary_raw) {
    if (spec.model_kind == "single") {
        std::vector<int> labels(static_cast<std::size_t>(raw.num_nodes()));
        for (int i = 0; i < raw.num_nodes(); ++i) labels[static_cast<std::size_t>(i)] = i;
        return labels;
    }
    NodeSeries train_part = raw;
    for (auto& v : train_part.values) v.resize(static_cast<std::size_t>(boundary_raw));
    return gsrnn::partition_nodes(train_part, spec.classes);
}

} // namespace

void cmd_train(const TrainArgs& args) {
    ensure_dir(args.out_dir);
    nlohmann::json config = read_json_file(args.config_path);
    TrainSpec spec = parse_train_spec(config);
    if (args.seed_override) {
        spec.train.seed = *args.seed_override;
        config["seed"] = *args.seed_override;
    }

    const NodeSeries raw = load_node_series(spec.series_path);
    const PreparedSeries prepared = prepare_pipeline_series(raw, spec.period, spec.test_days);
    WeightedGraph graph = resolve_graph(spec, raw);
    graph.node_class = pipeline_classes(spec, raw, prepared.boundary_raw);
    graph.validate();

    Rng rng(spec.train.seed);
    gsrnn::GsrnnModel model = gsrnn::make_model(graph, spec.net, rng);

    gsrnn::GsrnnTrainConfig train_cfg;
    train_cfg.base = spec.train;
    train_cfg.subsample_fraction = spec.subsample_fraction;
    train_cfg.subsample_mode = spec.subsample_mode;
    train_cfg.train_end = prepared.train_end_sr;
    const gsrnn::TrainResult result = gsrnn::train(model, graph, prepared.sr, train_cfg);

    std::ofstream loss(join(args.out_dir, "loss.csv"));
    if (!loss) throw DataError("cannot write loss.csv");
    loss << "epoch,train_mse,sampled_nodes\n";
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
        loss << (e + 1) << ',' << format_double(result.loss_history[e]) << ','
             << result.sampled_node_count[e] << '\n';
    }

    nlohmann::json ckpt;
    ckpt["version"] = 1;
    ckpt["model"] = gsrnn::model_to_json(model);
    ckpt["pipeline"] = {{"period", spec.period},
                        {"test_days", spec.test_days},
                        {"model_kind", spec.model_kind}};
    std::ofstream out(join(args.out_dir, "checkpoint.json"));
    if (!out) throw DataError("cannot write checkpoint.json");
    out << ckpt.dump() << '\n';
    save_graph(graph, join(args.out_dir, "graph_used.json"));
    write_manifest(args.out_dir, "train", spec.train.seed, config);
}

void cmd_forecast(const ForecastArgs& args) {
    ensure_dir(args.out_dir);
    const nlohmann::json ckpt = read_json_file(args.checkpoint_path);
    if (!ckpt.contains("model")) throw DataError("checkpoint is missing the model");
    const gsrnn::GsrnnModel model = gsrnn::model_from_json(ckpt.at("model"));
    const int period = ckpt.at("pipeline").at("period").get<int>();
    const int test_days = args.test_days > 0 ? args.test_days
                                             : ckpt.at("pipeline").at("test_days").get<int>();

    const NodeSeries raw = load_node_series(args.series_path);
    const WeightedGraph graph = load_graph(args.graph_path);
    const PreparedSeries prepared = prepare_pipeline_series(raw, period, test_days);
    const gsrnn::ForecastRun run = gsrnn::forecast(model, graph, prepared.sr, test_days);

    const int sr_period = 2 * period - 1;
    for (int u = 0; u < graph.num_nodes; ++u) {
        std::ofstream f(join(args.out_dir, "forecast_node" + std::to_string(u) + ".csv"));
        if (!f) throw DataError("cannot write forecast output for node " + std::to_string(u));
        f << "t,actual,predicted_cdf,predicted_pdf\n";
        const auto& pdf_pred = run.pred_pdf[static_cast<std::size_t>(u)];
        const auto& pdf_actual = run.actual_pdf[static_cast<std::size_t>(u)];
        for (std::size_t idx = 0; idx < pdf_pred.size(); ++idx) {
            const long t = run.day_boundary + static_cast<long>(idx);
            const long day_offset = static_cast<long>(idx) / period;
            const long k = static_cast<long>(idx) % period;
            const long sr_idx = day_offset * sr_period + 2 * k; // relative to sr_boundary
            f << t << ',' << format_double(pdf_actual[idx]) << ','
              << format_double(run.pred_cdf[static_cast<std::size_t>(u)][static_cast<std::size_t>(sr_idx)])
              << ',' << format_double(pdf_pred[idx]) << '\n';
        }
    }
    std::ofstream summary(join(args.out_dir, "summary.csv"));
    summary << "scope,rmse_cdf,rmse_pdf\n";
    summary << "overall," << format_double(run.rmse_cdf) << ',' << format_double(run.rmse_pdf) << '\n';
    for (std::size_t k = 0; k < run.class_rmse_cdf.size(); ++k) {
        summary << "class" << k << ',' << format_double(run.class_rmse_cdf[k]) << ','
                << format_double(run.class_rmse_pdf[k]) << '\n';
    }

    nlohmann::json config;
    config["checkpoint"] = args.checkpoint_path;
    config["series"] = args.series_path;
    config["graph"] = args.graph_path;
    config["test_days"] = test_days;
    write_manifest(args.out_dir, "forecast", 0, config);
}

void cmd_evaluate(const EvaluateArgs& args) {
    ensure_dir(args.out_dir);
    std::vector<fs::path> files;
    if (!fs::is_directory(args.forecast_dir)) {
        throw DataError("forecast directory '" + args.forecast_dir + "' does not exist");
    }
    for (const auto& entry : fs::directory_iterator(args.forecast_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("forecast_node", 0) == 0 && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) throw DataError("no forecast_node*.csv files in '" + args.forecast_dir + "'");
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        auto node_of = [](const fs::path& p) {
            return std::stol(p.filename().string().substr(13));
        };
        return node_of(a) < node_of(b);
    });

    std::ofstream metrics_out(join(args.out_dir, "metrics.csv"));
    metrics_out << "node,rmse_cdf,rmse_pdf\n";
    double total_cdf = 0.0;
    double total_pdf = 0.0;

    // Cell-wise average of the per-node precision matrices over the nodes
    // where the cell is defined.
    std::vector<std::vector<double>> beta_sum(
        static_cast<std::size_t>(args.max_threshold),
        std::vector<double>(static_cast<std::size_t>(args.max_delay) + 1, 0.0));
    std::vector<std::vector<long>> beta_count = {};
    beta_count.assign(static_cast<std::size_t>(args.max_threshold),
                      std::vector<long>(static_cast<std::size_t>(args.max_delay) + 1, 0));

    for (std::size_t fi = 0; fi < files.size(); ++fi) {
        std::ifstream in(files[fi]);
        std::string line;
        std::getline(in, line); // header
        std::vector<long> t_col;
        std::vector<double> actual, pred_cdf, pred_pdf;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_row(line);
            if (fields.size() != 4) {
                throw DataError(files[fi].string() + ": line " + std::to_string(line_no) +
                                ": expected 4 fields");
            }
            const std::string ctx = "in '" + files[fi].string() + "'";
            t_col.push_back(parse_long(fields[0], ctx));
            actual.push_back(parse_double(fields[1], ctx));
            pred_cdf.push_back(parse_double(fields[2], ctx));
            pred_pdf.push_back(parse_double(fields[3], ctx));
        }
        if (actual.empty()) throw DataError(files[fi].string() + " has no rows");

        // Rebuild the cumulative actual from the raw counts within each
        // period block (blocks are aligned because t is a day-slot index).
        std::vector<double> actual_cdf(actual.size());
        for (std::size_t i = 0; i < actual.size(); ++i) {
            const bool block_start = (t_col[i] % args.period == 0) || i == 0;
            actual_cdf[i] = block_start ? actual[i] : actual_cdf[i - 1] + actual[i];
        }
        const double r_cdf = metrics::rmse(actual_cdf, pred_cdf);
        const double r_pdf = metrics::rmse(actual, pred_pdf);
        total_cdf += r_cdf;
        total_pdf += r_pdf;
        metrics_out << fi << ',' << format_double(r_cdf) << ',' << format_double(r_pdf) << '\n';

        const metrics::PrecisionMatrix pm =
            metrics::precision_matrix(actual, pred_pdf, args.max_delay, args.max_threshold);
        metrics::save_precision_matrix(pm, join(args.out_dir, "precision_node" + std::to_string(fi) + ".csv"));
        for (int i = 1; i <= args.max_threshold; ++i) {
            if (!pm.defined(i)) continue;
            for (int d = 0; d <= args.max_delay; ++d) {
                beta_sum[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(d)] +=
                    pm.beta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(d)];
                ++beta_count[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(d)];
            }
        }

        if (args.with_spectrum) {
            const metrics::Spectrum sp = metrics::spectrum(actual);
            std::ofstream sf(join(args.out_dir, "spectrum_node" + std::to_string(fi) + ".csv"));
            sf << "frequency,power\n";
            sf << "0," << format_double(sp.dc_power) << '\n';
            for (std::size_t k = 0; k < sp.frequency.size(); ++k) {
                sf << format_double(sp.frequency[k]) << ',' << format_double(sp.power[k]) << '\n';
            }
        }
    }
    metrics_out << "overall," << format_double(total_cdf / static_cast<double>(files.size())) << ','
                << format_double(total_pdf / static_cast<double>(files.size())) << '\n';

    std::ofstream avg(join(args.out_dir, "precision_avg.csv"));
    avg << "threshold";
    for (int d = 0; d <= args.max_delay; ++d) avg << ",delay" << d;
    avg << '\n';
    for (int i = 1; i <= args.max_threshold; ++i) {
        avg << i;
        for (int d = 0; d <= args.max_delay; ++d) {
            avg << ',';
            const long c = beta_count[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(d)];
            if (c > 0) {
                avg << format_double(beta_sum[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(d)] /
                                     static_cast<double>(c));
            } else {
                avg << "NA";
            }
        }
        avg << '\n';
    }

    nlohmann::json config;
    config["forecast_dir"] = args.forecast_dir;
    config["max_delay"] = args.max_delay;
    config["max_threshold"] = args.max_threshold;
    config["period"] = args.period;
    write_manifest(args.out_dir, "evaluate", 0, config);
}

void cmd_table1(const Table1Args& args) {
    ensure_dir(args.out_dir);
    const synth::Table1Result table = synth::run_table1(args.cfg);
    save_table1(table, join(args.out_dir, "table1.csv"));

    if (args.write_roc) {
        // One representative ROC per cell (first seed), for plotting.
        for (std::size_t r = 0; r < table.prior_labels.size(); ++r) {
            for (std::size_t c = 0; c < table.sparsities.size(); ++c) {
                std::ostringstream name;
                name << "roc_" << table.prior_labels[r] << "_s" << format_double(table.sparsities[c])
                     << ".csv";
                synth::save_roc(table.first_seed[r][c], join(args.out_dir, name.str()));
            }
        }
    }

    nlohmann::json config;
    config["num_nodes"] = args.cfg.base.num_nodes;
    config["horizon"] = args.cfg.base.horizon;
    config["w"] = args.cfg.base.w;
    config["l1_lambda"] = args.cfg.em.l1_lambda;
    config["sparsities"] = args.cfg.sparsities;
    nlohmann::json seeds = nlohmann::json::array();
    for (auto s : args.cfg.seeds) seeds.push_back(s);
    config["seeds"] = seeds;
    write_manifest(args.out_dir, "table1", args.cfg.seeds.front(), config);
}

} // namespace stcast::cli
