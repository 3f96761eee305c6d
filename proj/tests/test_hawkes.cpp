#include "stcast/hawkes.hpp"
#include "stcast/errors.hpp"
#include "stcast/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace stcast;
using hawkes::HawkesModel;

namespace {

HawkesModel univariate(double mu, double a, double w) {
    HawkesModel m;
    m.mu = Eigen::VectorXd::Constant(1, mu);
    m.A = Eigen::MatrixXd::Constant(1, 1, a);
    m.w = w;
    return m;
}

// Composite Simpson quadrature, the independent oracle for kernel mass and
// compensator integrals.
template <typename F>
double simpson(F f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("kernel value and integral") {
    CHECK(hawkes::kernel(2.0, 0.0) == doctest::Approx(2.0));
    CHECK(hawkes::kernel(20.0, 1e6) == doctest::Approx(0.0));
    CHECK_THROWS_AS(hawkes::kernel(2.0, -0.1), DataError);
    CHECK_THROWS_AS(hawkes::kernel(0.0, 0.1), DataError);

    const double w = 3.5;
    const double mass = simpson([w](double t) { return hawkes::kernel(w, t); }, 0.0, 10.0 / w, 20000);
    CHECK(mass == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-9));
}

TEST_CASE("intensity with no prior events is the background rate") {
    const HawkesModel m = univariate(0.7, 0.3, 5.0);
    EventSequence seq({}, 10.0, 1);
    CHECK(hawkes::intensity(m, seq, 0, 4.2) == doctest::Approx(0.7));
}

TEST_CASE("intensity jump right after one event matches the fitted univariate values") {
    const HawkesModel m = univariate(0.7562, 0.4673, 31.6301);
    EventSequence seq({{1.0, 0}}, 10.0, 1);
    const double lambda = hawkes::intensity(m, seq, 0, 1.0 + 1e-12);
    CHECK(lambda == doctest::Approx(0.7562 + 0.4673 * 31.6301).epsilon(1e-6));
}

TEST_CASE("intensity matches a direct hand summation on a 2-node case") {
    HawkesModel m;
    m.mu = Eigen::VectorXd::Zero(2);
    m.mu << 0.1, 0.2;
    m.A.resize(2, 2);
    m.A << 0.3, 0.05, 0.12, 0.25;
    m.w = 4.0;
    EventSequence seq({{0.5, 0}, {1.1, 1}, {1.7, 0}}, 10.0, 2);
    const double t = 2.3;
    // Oracle: brute-force evaluation of the defining sum.
    auto g = [&](double dt) { return m.w * std::exp(-m.w * dt); };
    const double expected0 = 0.1 + 0.3 * g(t - 0.5) + 0.05 * g(t - 1.1) + 0.3 * g(t - 1.7);
    const double expected1 = 0.2 + 0.12 * g(t - 0.5) + 0.25 * g(t - 1.1) + 0.12 * g(t - 1.7);
    CHECK(hawkes::intensity(m, seq, 0, t) == doctest::Approx(expected0).epsilon(1e-12));
    CHECK(hawkes::intensity(m, seq, 1, t) == doctest::Approx(expected1).epsilon(1e-12));
    CHECK_THROWS_AS(hawkes::intensity(m, seq, 5, t), DataError);
}

TEST_CASE("log-likelihood reduces to the Poisson closed form when A = 0") {
    HawkesModel m = univariate(0.8, 0.0, 3.0);
    std::vector<Event> events;
    Rng rng(11);
    const double T = 50.0;
    for (int i = 0; i < 40; ++i) events.push_back(Event{rng.uniform(0.0, T), 0});
    EventSequence seq(std::move(events), T, 1);
    const double expected = 40 * std::log(0.8) - 0.8 * T;
    CHECK(hawkes::log_likelihood(m, {seq}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero intensity at an observed event flags -infinity") {
    HawkesModel m = univariate(0.0, 0.0, 3.0);
    EventSequence seq({{1.0, 0}}, 5.0, 1);
    CHECK(hawkes::log_likelihood(m, {seq}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log-likelihood matches the quadrature oracle on a 2-node case") {
    HawkesModel m;
    m.mu.resize(2);
    m.mu << 0.3, 0.15;
    m.A.resize(2, 2);
    m.A << 0.2, 0.1, 0.05, 0.3;
    m.w = 2.0;
    EventSequence seq({{0.4, 0}, {0.9, 1}, {1.3, 0}, {2.6, 1}, {3.3, 0}}, 4.0, 2);

    double expected = 0.0;
    for (const Event& e : seq.events()) {
        expected += std::log(hawkes::intensity(m, seq, e.node, e.time));
    }
    // The intensity jumps at event times, so the quadrature runs piecewise
    // over the smooth segments between events.
    std::vector<double> knots{0.0};
    for (const Event& e : seq.events()) knots.push_back(e.time);
    knots.push_back(seq.horizon());
    for (int u = 0; u < 2; ++u) {
        for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
            const double a = knots[s];
            const double b = knots[s + 1];
            // Smooth closed form on (a, b]: all events at or before a count.
            auto lambda_seg = [&](double t) {
                double v = m.mu[u];
                for (const Event& e : seq.events()) {
                    if (e.time > a) break;
                    v += m.A(u, e.node) * m.w * std::exp(-m.w * (t - e.time));
                }
                return v;
            };
            expected -= simpson(lambda_seg, a, b, 2000);
        }
    }
    CHECK(hawkes::log_likelihood(m, {seq}) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("simultaneous events do not excite each other in the likelihood") {
    HawkesModel m = univariate(0.5, 0.4, 2.0);
    EventSequence seq({{1.0, 0}, {1.0, 0}}, 3.0, 1);
    // Both events see only the background rate; the compensator sees both jumps.
    const double expected = 2.0 * std::log(0.5) - 0.5 * 3.0 -
                            2.0 * 0.4 * (1.0 - std::exp(-2.0 * 2.0));
    CHECK(hawkes::log_likelihood(m, {seq}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("homogeneous Poisson simulation hits the nominal rate") {
    HawkesModel m = univariate(2.0, 0.0, 1.0);
    const EventSequence seq = hawkes::simulate(m, 1e4, 123);
    const double rate = static_cast<double>(seq.size()) / seq.horizon();
    CHECK(rate == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("zero background rate yields no events") {
    HawkesModel m = univariate(0.0, 0.4, 3.0);
    const EventSequence seq = hawkes::simulate(m, 100.0, 5);
    CHECK(seq.empty());
}

TEST_CASE("univariate stationary rate matches mu/(1-a)") {
    // Stationary rate of the branching representation: mu / (1 - a).
    const HawkesModel m = univariate(0.7562, 0.4673, 31.6301);
    const EventSequence seq = hawkes::simulate(m, 1e5, 77);
    const double rate = static_cast<double>(seq.size()) / seq.horizon();
    const double expected = 0.7562 / (1.0 - 0.4673);
    CHECK(rate == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("simulation is bit-reproducible for a fixed seed") {
    HawkesModel m;
    m.mu.resize(2);
    m.mu << 0.4, 0.3;
    m.A.resize(2, 2);
    m.A << 0.2, 0.3, 0.1, 0.15;
    m.w = 5.0;
    const EventSequence a = hawkes::simulate(m, 500.0, 99);
    const EventSequence b = hawkes::simulate(m, 500.0, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.events()[i].time == b.events()[i].time);
        CHECK(a.events()[i].node == b.events()[i].node);
    }
    CHECK(a.size() > 100); // nondegenerate sample
}

TEST_CASE("unstable matrices are rejected by simulate") {
    HawkesModel m = univariate(0.5, 1.05, 2.0);
    CHECK_THROWS_AS(hawkes::simulate(m, 10.0, 1), NumericError);
}

TEST_CASE("multivariate mean rates converge to the solution of Lambda = mu + A Lambda") {
    HawkesModel m;
    m.mu.resize(3);
    m.mu << 0.5, 0.2, 0.35;
    m.A.resize(3, 3);
    m.A << 0.2, 0.15, 0.0,
           0.1, 0.1, 0.25,
           0.0, 0.2, 0.15;
    m.w = 3.0;
    REQUIRE(hawkes::spectral_radius(m.A) <= 0.6);
    const Eigen::VectorXd expected = hawkes::stationary_rate(m);
    const EventSequence seq = hawkes::simulate(m, 1e5, 2024);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
    for (const Event& e : seq.events()) counts[e.node] += 1.0;
    for (int u = 0; u < 3; ++u) {
        CHECK(counts[u] / seq.horizon() == doctest::Approx(expected[u]).epsilon(0.05));
    }
}

TEST_CASE("spectral radius: closed-form cases") {
    CHECK(hawkes::spectral_radius(Eigen::MatrixXd::Zero(4, 4)) == doctest::Approx(0.0));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 0.5;
    d(1, 1) = 0.3;
    CHECK(hawkes::spectral_radius(d) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(hawkes::spectral_radius(Eigen::MatrixXd::Zero(2, 3)), DataError);
}

TEST_CASE("spectral radius matches a dense eigensolver on random matrices") {
    Rng rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd A(30, 30);
        for (int i = 0; i < 30; ++i) {
            for (int j = 0; j < 30; ++j) A(i, j) = rng.uniform(0.0, 1.0);
        }
        // Oracle: full eigendecomposition.
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(A);
        double expected = 0.0;
        for (int k = 0; k < 30; ++k) expected = std::max(expected, std::abs(solver.eigenvalues()[k]));
        CHECK(hawkes::spectral_radius(A) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("branching ratio is the column sum") {
    CHECK(hawkes::branching_ratio(univariate(0.7, 0.4673, 3.0), 0) == doctest::Approx(0.4673));
    CHECK(hawkes::branching_ratio(univariate(0.7, 0.0, 3.0), 0) == 0.0);
    HawkesModel m;
    m.mu = Eigen::VectorXd::Zero(2);
    m.A.resize(2, 2);
    m.A << 0.1, 0.2, 0.3, 0.0;
    m.w = 1.0;
    CHECK(hawkes::branching_ratio(m, 0) == doctest::Approx(0.4));
}

TEST_CASE("model JSON round trip and validation") {
    HawkesModel m;
    m.mu.resize(2);
    m.mu << 0.25, 0.5;
    m.A.resize(2, 2);
    m.A << 0.1, 0.0, 0.07, 0.2;
    m.w = 17.5;
    const std::string path = (std::filesystem::temp_directory_path() / "stcast_model.json").string();
    hawkes::save_model(m, path);
    const HawkesModel loaded = hawkes::load_model(path);
    CHECK(loaded.w == m.w);
    CHECK((loaded.A - m.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.mu - m.mu).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());

    HawkesModel bad = m;
    bad.A(0, 1) = -0.3;
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = m;
    bad.w = 0.0;
    CHECK_THROWS_AS(bad.validate(), DataError);
}
