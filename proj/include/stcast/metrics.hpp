#pragma once

#include <string>
#include <vector>

namespace stcast::metrics {

// Hit-rate grid beta(i, d) over event-count thresholds i = 1..n (rows of the
// counts) and delay budgets d = 0..m. beta(i, d) is the fraction of test
// slots with actual >= i for which the prediction reached i somewhere in
// {t-d, ..., t}. Rows with no qualifying slots are undefined, not 0/0.
struct PrecisionMatrix {
    int max_delay = 0;     // m
    int max_threshold = 0; // n
    // beta[i-1][d] for threshold i, delay d; NaN marks undefined rows.
    std::vector<std::vector<double>> beta;
    std::vector<long> slots_at_threshold;              // N_i
    std::vector<std::vector<long>> hits_at_threshold;  // N_{i,d}

    bool defined(int threshold) const { return slots_at_threshold[static_cast<std::size_t>(threshold - 1)] > 0; }
};

struct Spectrum {
    double dc_power = 0.0;                 // k = 0 bin, reported separately
    std::vector<double> frequency;         // cycles/hour, k = 1..N-1
    std::vector<double> power;             // |X_k|^2 / N, so dc + sum(power) = sum(x^2)
};

double rmse(const std::vector<double>& actual, const std::vector<double>& predicted);

PrecisionMatrix precision_matrix(const std::vector<double>& actual,
                                 const std::vector<double>& predicted,
                                 int max_delay, int max_threshold);

// Periodogram by direct DFT (O(N^2); fine at the series lengths handled
// here). Normalized so that dc_power + sum(power) equals sum of squares.
Spectrum spectrum(const std::vector<double>& series, double bin_width_hours = 1.0);

void save_precision_matrix(const PrecisionMatrix& pm, const std::string& path, bool long_format = false);

} // namespace stcast::metrics
