#include "stcast/hawkes.hpp"

#include "stcast/errors.hpp"
#include "stcast/ioutil.hpp"
#include "stcast/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace stcast::hawkes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void HawkesModel::validate() const {
    const int u = num_nodes();
    if (u == 0) throw DataError("HawkesModel: mu is empty");
    if (A.rows() != u || A.cols() != u) {
        throw DataError("HawkesModel: A must be " + std::to_string(u) + "x" + std::to_string(u));
    }
    if (!(w > 0.0) || !std::isfinite(w)) throw DataError("HawkesModel: kernel rate w must be positive");
    for (int i = 0; i < u; ++i) {
        if (!std::isfinite(mu[i]) || mu[i] < 0.0) {
            throw DataError("HawkesModel: mu[" + std::to_string(i) + "] must be finite and nonnegative");
        }
        for (int j = 0; j < u; ++j) {
            if (!std::isfinite(A(i, j)) || A(i, j) < 0.0) {
                throw DataError("HawkesModel: A(" + std::to_string(i) + "," + std::to_string(j) +
                                ") must be finite and nonnegative");
            }
        }
    }
}

double kernel(double w, double t) {
    if (!(w > 0.0)) throw DataError("kernel: rate w must be positive");
    if (t < 0.0) throw DataError("kernel: elapsed time must be nonnegative");
    return w * std::exp(-w * t);
}

double intensity(const HawkesModel& model, const EventSequence& seq, int node, double t) {
    if (node < 0 || node >= model.num_nodes()) {
        throw DataError("intensity: node " + std::to_string(node) + " out of range");
    }
    double lambda = model.mu[node];
    for (const Event& e : seq.events()) {
        if (e.time >= t) break; // strict t_i < t
        lambda += model.A(node, e.node) * kernel(model.w, t - e.time);
    }
    return lambda;
}

IntensityTrace intensity_trace(const HawkesModel& model, const EventSequence& seq,
                               const std::vector<double>& times) {
    IntensityTrace trace;
    trace.times = times;
    trace.lambda.resize(model.num_nodes(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (int u = 0; u < model.num_nodes(); ++u) {
            trace.lambda(u, static_cast<Eigen::Index>(k)) = intensity(model, seq, u, times[k]);
        }
    }
    return trace;
}

double log_likelihood(const HawkesModel& model, const std::vector<EventSequence>& seqs) {
    model.validate();
    const int num_nodes = model.num_nodes();
    const double w = model.w;
    const Eigen::VectorXd col_sums = model.A.colwise().sum();

    KahanSum total;
    for (const EventSequence& seq : seqs) {
        if (seq.num_nodes() != num_nodes) {
            throw DataError("log_likelihood: sequence node count mismatch");
        }
        // Running kernel sums per source node, S[v] = sum_j w exp(-w (t - t_j))
        // over prior events at v; updated by a shared decay factor between
        // events. Exact and O(n U) instead of O(n^2).
        Eigen::VectorXd source_sum = Eigen::VectorXd::Zero(num_nodes);
        double prev_time = 0.0;
        KahanSum log_term;
        const auto& events = seq.events();
        std::size_t i = 0;
        while (i < events.size() && events[i].time < seq.horizon()) {
            const double t = events[i].time;
            source_sum *= std::exp(-w * (t - prev_time));
            prev_time = t;
            // Simultaneous events share the pre-jump intensity: the strict
            // t_i < t convention means ties do not excite each other.
            std::size_t j = i;
            for (; j < events.size() && events[j].time == t; ++j) {
                const double lambda = model.mu[events[j].node] + model.A.row(events[j].node).dot(source_sum);
                if (!(lambda > 0.0)) return -kInf;
                log_term.add(std::log(lambda));
            }
            for (; i < j; ++i) source_sum[events[i].node] += w;
        }
        // Compensator: sum_u mu_u T + sum_j colsum(u_j) (1 - exp(-w (T - t_j))).
        KahanSum compensator;
        compensator.add(model.mu.sum() * seq.horizon());
        for (const Event& e : seq.events()) {
            if (e.time >= seq.horizon()) break;
            compensator.add(col_sums[e.node] * (1.0 - std::exp(-w * (seq.horizon() - e.time))));
        }
        total.add(log_term.value() - compensator.value());
    }
    return total.value();
}

EventSequence simulate(const HawkesModel& model, double horizon, std::uint64_t seed) {
    model.validate();
    if (!(horizon > 0.0)) throw ConfigError("simulate: horizon must be positive");
    const double rho = spectral_radius(model.A);
    if (rho >= 1.0) {
        throw NumericError("simulate: unstable excitation matrix, spectral radius " +
                           format_double(rho) + " >= 1");
    }

    const int num_nodes = model.num_nodes();
    const double w = model.w;
    const double mu_sum = model.mu.sum();
    Rng rng(seed);

    // excitation[u] = sum over past events i of A(u, u_i) w exp(-w (t - t_i)).
    Eigen::VectorXd excitation = Eigen::VectorXd::Zero(num_nodes);
    std::vector<Event> events;
    double t = 0.0;
    while (true) {
        const double bound = mu_sum + excitation.sum(); // valid: total intensity decays until next event
        if (!(bound > 0.0)) break;
        const double wait = rng.exponential(bound);
        const double candidate = t + wait;
        if (candidate >= horizon) break;

        const double decay = std::exp(-w * wait);
        excitation *= decay;
        t = candidate;
        const double lambda_total = mu_sum + excitation.sum();
        if (rng.uniform() * bound <= lambda_total) {
            // Accept; attribute to a node proportionally to its intensity.
            double threshold = rng.uniform() * lambda_total;
            int node = num_nodes - 1;
            double cumulative = 0.0;
            for (int u = 0; u < num_nodes; ++u) {
                cumulative += model.mu[u] + excitation[u];
                if (threshold <= cumulative) {
                    node = u;
                    break;
                }
            }
            events.push_back(Event{t, node});
            excitation += model.A.col(node) * w;
        }
    }
    return EventSequence(std::move(events), horizon, num_nodes);
}

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw DataError("spectral_radius: matrix must be square");
    const Eigen::Index n = A.rows();
    if (n == 0) return 0.0;

    // Power iteration on A + I: the shift makes every nonnegative matrix
    // aperiodic so the norm-growth estimate converges; the Perron root of
    // A + I is rho(A) + 1.
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double estimate = 0.0;
    constexpr double tol = 1e-10;
    constexpr int max_iters = 10000;
    for (int iter = 0; iter < max_iters; ++iter) {
        Eigen::VectorXd next = A * v + v;
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        next /= norm;
        const double prev = estimate;
        estimate = norm;
        v = next;
        if (iter > 0 && std::abs(estimate - prev) < tol * std::max(1.0, estimate)) break;
    }
    return std::max(0.0, estimate - 1.0);
}

double branching_ratio(const HawkesModel& model, int node) {
    if (node < 0 || node >= model.num_nodes()) {
        throw DataError("branching_ratio: node " + std::to_string(node) + " out of range");
    }
    return model.A.col(node).sum();
}

Eigen::VectorXd stationary_rate(const HawkesModel& model) {
    const int n = model.num_nodes();
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - model.A;
    return system.partialPivLu().solve(model.mu);
}

HawkesModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file '" + path + "': " + e.what());
    }
    if (!j.contains("mu") || !j.contains("A") || !j.contains("w")) {
        throw DataError("model file '" + path + "' must contain keys mu, A, w");
    }
    HawkesModel model;
    const auto& mu = j.at("mu");
    model.mu.resize(static_cast<Eigen::Index>(mu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i) model.mu[static_cast<Eigen::Index>(i)] = mu[i].get<double>();
    const auto& rows = j.at("A");
    model.A.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(mu.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != mu.size()) throw DataError("model file '" + path + "': A is not square");
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            model.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
        }
    }
    model.w = j.at("w").get<double>();
    model.validate();
    return model;
}

void save_model(const HawkesModel& model, const std::string& path) {
    nlohmann::json j;
    j["mu"] = std::vector<double>(model.mu.data(), model.mu.data() + model.mu.size());
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < model.A.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < model.A.cols(); ++k) row.push_back(model.A(i, k));
        rows.push_back(std::move(row));
    }
    j["A"] = std::move(rows);
    j["w"] = model.w;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

} // namespace stcast::hawkes
