#pragma once

#include "stcast/events.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace stcast::hawkes {

// Multivariate exponential-kernel Hawkes model
//   lambda_u(t) = mu[u] + sum_{i: t_i < t} A(u, u_i) * w * exp(-w (t - t_i)).
//
// Orientation: A(u, v) is the influence OF events at v ON node u, i.e. the
// row index is the excited node and the column index is the source node.
struct HawkesModel {
    Eigen::VectorXd mu;  // background rate per node, events/hour
    Eigen::MatrixXd A;   // excitation matrix, A(u, v) >= 0
    double w = 1.0;      // kernel rate, 1/hours

    int num_nodes() const { return static_cast<int>(mu.size()); }
    void validate() const; // throws DataError on any invariant violation
};

// Intensities of every node at the given query times.
struct IntensityTrace {
    std::vector<double> times;
    Eigen::MatrixXd lambda; // (num_nodes x times.size())
};

// g(t) = w * exp(-w t); integrates to 1 over [0, inf).
double kernel(double w, double t);

// lambda_u(t) with the strict t_i < t convention.
double intensity(const HawkesModel& model, const EventSequence& seq, int node, double t);

IntensityTrace intensity_trace(const HawkesModel& model, const EventSequence& seq,
                               const std::vector<double>& times);

// Exact log-likelihood over the sequences; the compensator uses the closed
// form of the kernel integral. Returns -infinity when some observed event has
// zero intensity (impossible data under the model), never throws for that.
double log_likelihood(const HawkesModel& model, const std::vector<EventSequence>& seqs);

// Ogata thinning with the piecewise-constant bound taken immediately after
// each accepted or rejected candidate. Deterministic for a fixed seed.
// Requires spectral_radius(A) < 1.
EventSequence simulate(const HawkesModel& model, double horizon, std::uint64_t seed);

// Perron root via power iteration on A + I (tolerance 1e-10, <= 1e4 iters).
double spectral_radius(const Eigen::MatrixXd& A);

// Expected total offspring of one event at `node`: column sum of A.
double branching_ratio(const HawkesModel& model, int node);

// Stationary rate vector, the solution of Lambda = mu + A Lambda.
Eigen::VectorXd stationary_rate(const HawkesModel& model);

HawkesModel load_model(const std::string& path);
void save_model(const HawkesModel& model, const std::string& path);

} // namespace stcast::hawkes
