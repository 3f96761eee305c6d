#include "stcast/em.hpp"

#include "stcast/errors.hpp"
#include "stcast/ioutil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace stcast::em {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sequences(const std::vector<EventSequence>& seqs, int num_nodes) {
    for (const EventSequence& seq : seqs) {
        if (seq.num_nodes() != num_nodes) throw DataError("EM: sequence node count mismatch");
    }
}

double total_observation_time(const std::vector<EventSequence>& seqs) {
    double total = 0.0;
    for (const EventSequence& seq : seqs) total += seq.horizon();
    return total;
}

// Denominator of the excitation update: for each parent node u', the summed
// kernel mass sum_c sum_{j: u_j = u'} (1 - exp(-w (T_c - t_j))).
Eigen::VectorXd parent_kernel_mass(const std::vector<EventSequence>& seqs, int num_nodes, double w) {
    std::vector<KahanSum> acc(static_cast<std::size_t>(num_nodes));
    for (const EventSequence& seq : seqs) {
        for (const Event& e : seq.events()) {
            if (e.time >= seq.horizon()) continue;
            acc[static_cast<std::size_t>(e.node)].add(1.0 - std::exp(-w * (seq.horizon() - e.time)));
        }
    }
    Eigen::VectorXd mass(num_nodes);
    for (int u = 0; u < num_nodes; ++u) mass[u] = acc[static_cast<std::size_t>(u)].value();
    return mass;
}

hawkes::HawkesModel default_init(const std::vector<EventSequence>& seqs, int num_nodes, double w,
                                 const std::optional<EdgeMask>& prior) {
    hawkes::HawkesModel model;
    model.w = w;
    model.mu = Eigen::VectorXd::Zero(num_nodes);
    for (const EventSequence& seq : seqs) {
        for (const Event& e : seq.events()) model.mu[e.node] += 1.0;
    }
    const double total_time = total_observation_time(seqs);
    if (total_time > 0.0) model.mu /= total_time;
    // Positive start is required by the multiplicative update; 0.5/U keeps
    // the initial spectral radius below one.
    const double a0 = 0.5 / static_cast<double>(num_nodes);
    model.A = Eigen::MatrixXd::Constant(num_nodes, num_nodes, a0);
    if (prior) {
        for (int i = 0; i < num_nodes; ++i) {
            for (int j = 0; j < num_nodes; ++j) {
                if (!(*prior)(i, j)) model.A(i, j) = 0.0;
            }
        }
    }
    return model;
}

} // namespace

EStepStats e_step(const hawkes::HawkesModel& model, const std::vector<EventSequence>& seqs,
                  double truncation_horizon) {
    model.validate();
    if (!(truncation_horizon > 0.0)) throw ConfigError("e_step: truncation horizon must be positive");
    const int num_nodes = model.num_nodes();
    check_sequences(seqs, num_nodes);
    const double w = model.w;

    std::vector<KahanSum> background(static_cast<std::size_t>(num_nodes));
    std::vector<KahanSum> pair(static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(num_nodes));
    std::size_t event_count = 0;
    std::vector<double> parent_mass(static_cast<std::size_t>(num_nodes));

    for (const EventSequence& seq : seqs) {
        const auto& events = seq.events();
        std::size_t window_start = 0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const Event& ev = events[i];
            if (ev.time >= seq.horizon()) break;
            ++event_count;
            while (window_start < i && ev.time - events[window_start].time > truncation_horizon) {
                ++window_start;
            }
            // Candidate parents are the events in (t_i - trunc, t_i); ties at
            // t_j == t_i are excluded by the strict t_j < t_i convention.
            std::fill(parent_mass.begin(), parent_mass.end(), 0.0);
            double excitation = 0.0;
            for (std::size_t j = window_start; j < i; ++j) {
                const Event& parent = events[j];
                if (parent.time >= ev.time) continue;
                const double contrib =
                    model.A(ev.node, parent.node) * w * std::exp(-w * (ev.time - parent.time));
                parent_mass[static_cast<std::size_t>(parent.node)] += contrib;
                excitation += contrib;
            }
            const double denom = model.mu[ev.node] + excitation;
            if (!(denom > 0.0)) {
                throw NumericError("e_step: event at t=" + format_double(ev.time) + " node " +
                                   std::to_string(ev.node) + " has zero intensity (degenerate model)");
            }
            background[static_cast<std::size_t>(ev.node)].add(model.mu[ev.node] / denom);
            auto* row = &pair[static_cast<std::size_t>(ev.node) * static_cast<std::size_t>(num_nodes)];
            for (int v = 0; v < num_nodes; ++v) {
                const double mass = parent_mass[static_cast<std::size_t>(v)];
                if (mass != 0.0) row[v].add(mass / denom);
            }
        }
    }

    EStepStats stats;
    stats.event_count = event_count;
    stats.background.resize(num_nodes);
    stats.pair.resize(num_nodes, num_nodes);
    for (int u = 0; u < num_nodes; ++u) {
        stats.background[u] = background[static_cast<std::size_t>(u)].value();
        for (int v = 0; v < num_nodes; ++v) {
            stats.pair(u, v) = pair[static_cast<std::size_t>(u) * static_cast<std::size_t>(num_nodes) + v].value();
        }
    }
    return stats;
}

hawkes::HawkesModel m_step(const EStepStats& stats, const std::vector<EventSequence>& seqs,
                           const hawkes::HawkesModel& model, double l1_lambda,
                           const std::optional<EdgeMask>& prior_edges) {
    const int num_nodes = model.num_nodes();
    if (l1_lambda < 0.0) throw ConfigError("m_step: l1 penalty must be nonnegative");
    const double total_time = total_observation_time(seqs);
    if (!(total_time > 0.0)) throw DataError("m_step: total observation time must be positive");
    const Eigen::VectorXd denom = parent_kernel_mass(seqs, num_nodes, model.w);

    hawkes::HawkesModel next = model;
    next.mu = stats.background / total_time;
    for (int u = 0; u < num_nodes; ++u) {
        for (int v = 0; v < num_nodes; ++v) {
            if (prior_edges && !(*prior_edges)(u, v)) {
                next.A(u, v) = 0.0;
                continue;
            }
            const double numerator = model.A(u, v) * stats.pair(u, v);
            double candidate = 0.0;
            if (denom[v] > 0.0) {
                candidate = std::sqrt(numerator / denom[v]);
            } else if (numerator > 0.0) {
                throw NumericError("m_step: zero kernel mass for parent node " + std::to_string(v) +
                                   " with nonzero responsibility");
            }
            next.A(u, v) = std::max(candidate - l1_lambda, 0.0);
        }
    }
    return next;
}

EMState fit(const std::vector<EventSequence>& seqs, double w, const EMConfig& cfg,
            const std::optional<hawkes::HawkesModel>& init) {
    if (!(w > 0.0)) throw ConfigError("fit: kernel rate w must be positive");
    if (cfg.max_iters < 1) throw ConfigError("fit: max_iters must be >= 1");
    if (seqs.empty()) throw DataError("fit: no event sequences given");
    int num_nodes = seqs.front().num_nodes();
    check_sequences(seqs, num_nodes);
    if (cfg.prior_edges &&
        (cfg.prior_edges->rows() != num_nodes || cfg.prior_edges->cols() != num_nodes)) {
        throw ConfigError("fit: prior edge mask must be num_nodes x num_nodes");
    }
    const double trunc = cfg.truncation_horizon > 0.0 ? cfg.truncation_horizon : 10.0 / w;

    // Split iteration: the multiplicative square-root update and the
    // responsibilities run on a smooth companion variable, while the soft
    // threshold produces the reported sparse iterate. A single-variable
    // loop (E-step at the shrunk model) makes zero absorbing under the
    // multiplicative update and collapses A entirely for any positive
    // penalty, so the sparse and smooth roles are kept separate in the
    // style of the split L1 solvers this update derives from.
    hawkes::HawkesModel smooth;
    if (init) {
        smooth = *init;
        smooth.w = w;
        smooth.validate();
        if (smooth.num_nodes() != num_nodes) throw ConfigError("fit: init model size mismatch");
    } else {
        smooth = default_init(seqs, num_nodes, w, cfg.prior_edges);
    }

    EMState state;
    state.model = smooth;
    state.model.A = (smooth.A.array() - cfg.l1_lambda).cwiseMax(0.0).matrix();

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const EStepStats stats = e_step(smooth, seqs, trunc);
        hawkes::HawkesModel next_smooth = m_step(stats, seqs, smooth, 0.0, cfg.prior_edges);
        hawkes::HawkesModel next = next_smooth;
        next.A = (next_smooth.A.array() - cfg.l1_lambda).cwiseMax(0.0).matrix();

        double max_delta = 0.0;
        for (int u = 0; u < num_nodes; ++u) {
            max_delta = std::max(max_delta, std::abs(next.mu[u] - state.model.mu[u]) /
                                                (std::abs(state.model.mu[u]) + 1e-12));
            for (int v = 0; v < num_nodes; ++v) {
                max_delta = std::max(max_delta, std::abs(next.A(u, v) - state.model.A(u, v)) /
                                                    (std::abs(state.model.A(u, v)) + 1e-12));
            }
        }

        smooth = std::move(next_smooth);
        state.model = std::move(next);
        state.iterations = iter + 1;
        const double ll = hawkes::log_likelihood(state.model, seqs);
        const double penalized = -ll + cfg.l1_lambda * state.model.A.sum();
        state.log_lik.push_back(ll);
        state.penalized_nll.push_back(penalized);
        state.max_param_delta.push_back(max_delta);
        if (std::isnan(penalized) || penalized == -kInf) {
            throw NumericError("fit: objective diverged at iteration " + std::to_string(iter + 1));
        }
        if (max_delta < cfg.tol) {
            state.converged = true;
            break;
        }
    }

    // Profile pass: with the sparse support fixed, the background rates are
    // refit so the reported model is self-consistent (with full shrinkage
    // this reduces mu to the empirical event rates).
    if (cfg.l1_lambda > 0.0 && !state.model.mu.isZero()) {
        const EStepStats stats = e_step(state.model, seqs, trunc);
        const double total_time = total_observation_time(seqs);
        state.model.mu = stats.background / total_time;
        state.log_lik.back() = hawkes::log_likelihood(state.model, seqs);
        state.penalized_nll.back() = -state.log_lik.back() + cfg.l1_lambda * state.model.A.sum();
    }
    return state;
}

GridSearchResult grid_search_w(const std::vector<EventSequence>& seqs,
                               const std::vector<double>& w_grid, const EMConfig& cfg) {
    if (w_grid.empty()) throw ConfigError("grid_search_w: empty grid");
    for (double w : w_grid) {
        if (!(w > 0.0)) throw ConfigError("grid_search_w: rates must be positive");
    }
    GridSearchResult result;
    result.log_lik.assign(w_grid.size(), std::numeric_limits<double>::quiet_NaN());
    result.fits.resize(w_grid.size());
    std::string failures;
    std::size_t failed = 0;
    for (std::size_t k = 0; k < w_grid.size(); ++k) {
        try {
            EMState state = fit(seqs, w_grid[k], cfg);
            result.log_lik[k] = hawkes::log_likelihood(state.model, seqs);
            result.fits[k] = std::move(state);
        } catch (const std::exception& e) {
            ++failed;
            failures += " [w=" + format_double(w_grid[k]) + ": " + e.what() + "]";
        }
    }
    if (failed == w_grid.size()) {
        throw NumericError("grid_search_w: every fit failed:" + failures);
    }
    // Argmax of the unpenalized likelihood; ties go to the smaller rate.
    std::size_t best = w_grid.size();
    for (std::size_t k = 0; k < w_grid.size(); ++k) {
        if (std::isnan(result.log_lik[k])) continue;
        if (best == w_grid.size() || result.log_lik[k] > result.log_lik[best] ||
            (result.log_lik[k] == result.log_lik[best] && w_grid[k] < w_grid[best])) {
            best = k;
        }
    }
    result.best_w = w_grid[best];
    return result;
}

StwgResult build_stwg(const hawkes::HawkesModel& model, double target_sparsity,
                      std::optional<int> knn_init) {
    if (!(target_sparsity > 0.0) || target_sparsity > 1.0) {
        throw ConfigError("build_stwg: target sparsity must be in (0, 1]");
    }
    const int num_nodes = model.num_nodes();
    StwgResult result;
    result.graph.num_nodes = num_nodes;
    result.graph.node_class.assign(static_cast<std::size_t>(num_nodes), 0);

    const double global_max = model.A.maxCoeff();
    if (!(global_max > 0.0)) {
        result.empty_model = true;
        return result;
    }

    // Optional cap: each node keeps only its k strongest incoming entries
    // before the global threshold is applied.
    Eigen::MatrixXd A = model.A;
    if (knn_init) {
        if (*knn_init < 1) throw ConfigError("build_stwg: knn_init must be >= 1");
        for (int u = 0; u < num_nodes; ++u) {
            std::vector<int> order(static_cast<std::size_t>(num_nodes));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (A(u, a) != A(u, b)) return A(u, a) > A(u, b);
                return a < b;
            });
            for (std::size_t r = static_cast<std::size_t>(*knn_init); r < order.size(); ++r) {
                A(u, order[r]) = 0.0;
            }
        }
    }

    struct Entry {
        double value;
        int child;
        int parent;
    };
    std::vector<Entry> entries;
    for (int u = 0; u < num_nodes; ++u) {
        for (int v = 0; v < num_nodes; ++v) {
            if (u == v) continue;
            if (A(u, v) > 0.0) entries.push_back(Entry{A(u, v), u, v});
        }
    }
    // Kept-edge budget on the off-diagonal count basis; ties kept by larger
    // value then lower flat index.
    const auto budget = static_cast<std::size_t>(
        std::ceil(target_sparsity * static_cast<double>(num_nodes) * (num_nodes - 1)));
    std::sort(entries.begin(), entries.end(), [num_nodes](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.child * num_nodes + a.parent < b.child * num_nodes + b.parent;
    });
    if (entries.size() > budget) entries.resize(budget);

    for (const Entry& e : entries) {
        result.graph.edges.push_back(GraphEdge{e.parent, e.child, e.value / global_max});
    }
    result.graph.validate();
    return result;
}

void save_iteration_log(const EMState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "iter,penalized_nll,max_param_delta\n";
    for (std::size_t k = 0; k < state.penalized_nll.size(); ++k) {
        out << (k + 1) << ',' << format_double(state.penalized_nll[k]) << ','
            << format_double(state.max_param_delta[k]) << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

} // namespace stcast::em
