#include "stcast/synth.hpp"

#include "stcast/errors.hpp"
#include "stcast/ioutil.hpp"
#include "stcast/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

namespace stcast::synth {

GeneratedProblem generate(const SyntheticSpec& spec) {
    if (spec.num_nodes < 1) throw ConfigError("generate: num_nodes must be >= 1");
    if (spec.sparsity < 0.0 || spec.sparsity > 1.0) {
        throw ConfigError("generate: sparsity must be in [0, 1]");
    }
    if (spec.mu_min < 0.0 || spec.mu_max < spec.mu_min || spec.a_min < 0.0 || spec.a_max < spec.a_min) {
        throw ConfigError("generate: parameter ranges must be nonnegative and ordered");
    }
    if (!(spec.w > 0.0) || !(spec.horizon > 0.0)) {
        throw ConfigError("generate: w and horizon must be positive");
    }

    const int n = spec.num_nodes;
    Rng rng(spec.seed);

    GeneratedProblem problem;
    problem.truth.w = spec.w;
    problem.truth.mu.resize(n);
    for (int i = 0; i < n; ++i) problem.truth.mu[i] = rng.uniform(spec.mu_min, spec.mu_max);

    problem.truth.A = Eigen::MatrixXd::Zero(n, n);
    problem.truth_edges = em::EdgeMask::Constant(n, n, false);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j && !spec.include_self_loops) continue;
            if (rng.bernoulli(spec.sparsity)) {
                problem.truth_edges(i, j) = true;
                problem.truth.A(i, j) = rng.uniform(spec.a_min, spec.a_max);
            }
        }
    }

    // Rescaling keeps the sparsity pattern intact while restoring stability.
    const double rho = hawkes::spectral_radius(problem.truth.A);
    if (rho >= 0.95) problem.truth.A *= 0.9 / rho;
    if (hawkes::spectral_radius(problem.truth.A) >= 1.0) {
        throw NumericError("generate: excitation matrix unstable after rescaling");
    }

    problem.events = hawkes::simulate(problem.truth, spec.horizon, rng.next_u64());
    return problem;
}

em::EdgeMask make_prior_mask(const em::EdgeMask& truth_edges, PriorKind prior, int extra_edges,
                             std::uint64_t seed) {
    const auto n = truth_edges.rows();
    if (prior == PriorKind::Null) return em::EdgeMask::Constant(n, n, true);
    if (extra_edges < 0) throw ConfigError("make_prior_mask: extra edge count must be >= 0");

    em::EdgeMask mask = truth_edges;
    std::vector<std::pair<int, int>> complement;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!truth_edges(i, j)) complement.emplace_back(i, j);
        }
    }
    if (static_cast<std::size_t>(extra_edges) > complement.size()) {
        throw ConfigError("make_prior_mask: not enough non-truth edges to sample from");
    }
    Rng rng(seed);
    shuffle(complement, rng);
    for (int k = 0; k < extra_edges; ++k) mask(complement[static_cast<std::size_t>(k)].first,
                                              complement[static_cast<std::size_t>(k)].second) = true;
    return mask;
}

RecoveryResult evaluate_recovery(const em::EdgeMask& truth_edges, const Eigen::MatrixXd& inferred,
                                 const em::EdgeMask& candidate_mask) {
    const auto n = truth_edges.rows();
    if (truth_edges.cols() != n || inferred.rows() != n || inferred.cols() != n ||
        candidate_mask.rows() != n || candidate_mask.cols() != n) {
        throw DataError("evaluate_recovery: shape mismatch");
    }

    struct Scored {
        double score;
        bool positive;
    };
    std::vector<Scored> candidates;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!candidate_mask(i, j)) continue;
            candidates.push_back(Scored{inferred(i, j), truth_edges(i, j)});
        }
    }
    if (candidates.empty()) throw NumericError("evaluate_recovery: empty candidate set");

    long positives = 0;
    for (const Scored& c : candidates) positives += c.positive ? 1 : 0;
    const long negatives = static_cast<long>(candidates.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw NumericError("evaluate_recovery: candidate set has no " +
                           std::string(positives == 0 ? "positives" : "negatives"));
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const Scored& a, const Scored& b) { return a.score > b.score; });

    RecoveryResult result;
    result.inferred = inferred;
    result.truth = truth_edges;
    result.roc.emplace_back(0.0, 0.0); // threshold +infinity
    long tp = 0;
    long fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0;
    double prev_tpr = 0.0;
    std::size_t k = 0;
    while (k < candidates.size()) {
        // One ROC point per distinct threshold value.
        const double score = candidates[k].score;
        for (; k < candidates.size() && candidates[k].score == score; ++k) {
            if (candidates[k].positive) ++tp;
            else ++fp;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
        const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        result.roc.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    result.auc = auc;
    return result;
}

Table1Result run_table1(const Table1Config& cfg) {
    if (cfg.sparsities.empty() || cfg.priors.empty() || cfg.seeds.empty()) {
        throw ConfigError("run_table1: sparsities, priors and seeds must be nonempty");
    }

    Table1Result table;
    table.sparsities = cfg.sparsities;
    for (const auto& [kind, k] : cfg.priors) {
        table.prior_labels.push_back(kind == PriorKind::Null ? "Null" : "GT+" + std::to_string(k));
    }
    const std::size_t rows = cfg.priors.size();
    const std::size_t cols = cfg.sparsities.size();
    table.mean_auc.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    table.seed_aucs.assign(rows, std::vector<std::vector<double>>(cols, std::vector<double>(cfg.seeds.size(), 0.0)));
    table.first_seed.assign(rows, std::vector<RecoveryResult>(cols));

    struct Cell {
        std::size_t row, col, seed_idx;
    };
    std::vector<Cell> cells;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s) cells.push_back(Cell{r, c, s});
        }
    }

    // Cells are independent; results land in preassigned slots so the thread
    // schedule cannot change the output.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) return;
            const Cell cell = cells[k];
            try {
                SyntheticSpec spec = cfg.base;
                spec.sparsity = cfg.sparsities[cell.col];
                spec.prior = cfg.priors[cell.row].first;
                spec.prior_extra_edges = cfg.priors[cell.row].second;
                spec.seed = cfg.seeds[cell.seed_idx];
                const GeneratedProblem problem = generate(spec);
                const em::EdgeMask mask = make_prior_mask(problem.truth_edges, spec.prior,
                                                          spec.prior_extra_edges, spec.seed + 0x9e37);
                em::EMConfig em_cfg = cfg.em;
                em_cfg.prior_edges = mask;
                const em::EMState state = em::fit({problem.events}, spec.w, em_cfg);
                RecoveryResult rec = evaluate_recovery(problem.truth_edges, state.model.A, mask);
                table.seed_aucs[cell.row][cell.col][cell.seed_idx] = rec.auc;
                if (cell.seed_idx == 0) table.first_seed[cell.row][cell.col] = std::move(rec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    unsigned thread_count = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
    thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(cells.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (double auc : table.seed_aucs[r][c]) sum += auc;
            table.mean_auc(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                sum / static_cast<double>(cfg.seeds.size());
        }
    }
    return table;
}

void save_table1(const Table1Result& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "prior";
    for (double s : table.sparsities) out << ',' << format_double(s);
    out << '\n';
    for (std::size_t r = 0; r < table.prior_labels.size(); ++r) {
        out << table.prior_labels[r];
        for (std::size_t c = 0; c < table.sparsities.size(); ++c) {
            out << ',' << format_double(table.mean_auc(static_cast<Eigen::Index>(r),
                                                       static_cast<Eigen::Index>(c)));
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

void save_roc(const RecoveryResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "fpr,tpr\n";
    for (const auto& [fpr, tpr] : result.roc) {
        out << format_double(fpr) << ',' << format_double(tpr) << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

} // namespace stcast::synth
