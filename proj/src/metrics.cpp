#include "stcast/metrics.hpp"

#include "stcast/errors.hpp"
#include "stcast/ioutil.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace stcast::metrics {

double rmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size()) {
        throw DataError("rmse: length mismatch (" + std::to_string(actual.size()) + " vs " +
                        std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) return 0.0;
    KahanSum sum;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double d = actual[t] - predicted[t];
        sum.add(d * d);
    }
    return std::sqrt(sum.value() / static_cast<double>(actual.size()));
}

PrecisionMatrix precision_matrix(const std::vector<double>& actual,
                                 const std::vector<double>& predicted,
                                 int max_delay, int max_threshold) {
    if (actual.size() != predicted.size()) throw DataError("precision_matrix: length mismatch");
    if (max_threshold < 1) throw ConfigError("precision_matrix: max threshold must be >= 1");
    if (max_delay < 0) throw ConfigError("precision_matrix: max delay must be >= 0");

    PrecisionMatrix pm;
    pm.max_delay = max_delay;
    pm.max_threshold = max_threshold;
    pm.slots_at_threshold.assign(static_cast<std::size_t>(max_threshold), 0);
    pm.hits_at_threshold.assign(static_cast<std::size_t>(max_threshold),
                                std::vector<long>(static_cast<std::size_t>(max_delay) + 1, 0));
    pm.beta.assign(static_cast<std::size_t>(max_threshold),
                   std::vector<double>(static_cast<std::size_t>(max_delay) + 1,
                                       std::numeric_limits<double>::quiet_NaN()));

    const long len = static_cast<long>(actual.size());
    for (int i = 1; i <= max_threshold; ++i) {
        const auto row = static_cast<std::size_t>(i - 1);
        for (long t = 0; t < len; ++t) {
            if (actual[static_cast<std::size_t>(t)] < i) continue;
            ++pm.slots_at_threshold[row];
            // Delay budget d admits a predicted hit anywhere in {t-d, ..., t};
            // d = 0 therefore means an exact-slot match.
            int earliest_hit = -1;
            for (long s = t; s >= std::max<long>(0, t - max_delay); --s) {
                if (predicted[static_cast<std::size_t>(s)] >= i) {
                    earliest_hit = static_cast<int>(t - s);
                    break;
                }
            }
            if (earliest_hit >= 0) {
                for (int d = earliest_hit; d <= max_delay; ++d) {
                    ++pm.hits_at_threshold[row][static_cast<std::size_t>(d)];
                }
            }
        }
        if (pm.slots_at_threshold[row] > 0) {
            for (int d = 0; d <= max_delay; ++d) {
                pm.beta[row][static_cast<std::size_t>(d)] =
                    static_cast<double>(pm.hits_at_threshold[row][static_cast<std::size_t>(d)]) /
                    static_cast<double>(pm.slots_at_threshold[row]);
            }
        }
    }
    return pm;
}

Spectrum spectrum(const std::vector<double>& series, double bin_width_hours) {
    if (series.size() < 2) throw DataError("spectrum: series must have at least 2 samples");
    if (!(bin_width_hours > 0.0)) throw ConfigError("spectrum: bin width must be positive");
    const std::size_t n = series.size();
    Spectrum sp;
    sp.frequency.reserve(n - 1);
    sp.power.reserve(n - 1);
    const double two_pi_over_n = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = two_pi_over_n * static_cast<double>(k) * static_cast<double>(t);
            re += series[t] * std::cos(angle);
            im -= series[t] * std::sin(angle);
        }
        const double power = (re * re + im * im) / static_cast<double>(n);
        if (k == 0) {
            sp.dc_power = power;
        } else {
            sp.frequency.push_back(static_cast<double>(k) /
                                   (static_cast<double>(n) * bin_width_hours));
            sp.power.push_back(power);
        }
    }
    return sp;
}

void save_precision_matrix(const PrecisionMatrix& pm, const std::string& path, bool long_format) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    if (long_format) {
        out << "threshold,delay,beta,slots,hits\n";
        for (int i = 1; i <= pm.max_threshold; ++i) {
            const auto row = static_cast<std::size_t>(i - 1);
            for (int d = 0; d <= pm.max_delay; ++d) {
                out << i << ',' << d << ',';
                if (pm.defined(i)) out << format_double(pm.beta[row][static_cast<std::size_t>(d)]);
                else out << "NA";
                out << ',' << pm.slots_at_threshold[row] << ','
                    << pm.hits_at_threshold[row][static_cast<std::size_t>(d)] << '\n';
            }
        }
    } else {
        out << "threshold";
        for (int d = 0; d <= pm.max_delay; ++d) out << ",delay" << d;
        out << '\n';
        for (int i = 1; i <= pm.max_threshold; ++i) {
            const auto row = static_cast<std::size_t>(i - 1);
            out << i;
            for (int d = 0; d <= pm.max_delay; ++d) {
                out << ',';
                if (pm.defined(i)) out << format_double(pm.beta[row][static_cast<std::size_t>(d)]);
                else out << "NA";
            }
            out << '\n';
        }
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

} // namespace stcast::metrics
