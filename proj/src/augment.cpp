#include "stcast/augment.hpp"

#include "stcast/errors.hpp"

#include <string>

namespace stcast::augment {

namespace {

void check_period(int period) {
    if (period < 2) throw ConfigError("augmentation period must be at least 2 steps per day");
}

// Returns the usable length after applying the pad policy; `values` may be
// extended in place for ZeroPad.
std::size_t resolve_blocks(std::vector<std::vector<double>>& values, std::size_t len,
                           std::size_t period, PadPolicy pad) {
    const std::size_t rem = len % period;
    if (rem == 0) return len;
    switch (pad) {
        case PadPolicy::Error:
            throw DataError("series length " + std::to_string(len) +
                            " is not a multiple of the period " + std::to_string(period));
        case PadPolicy::DropPartial:
            return len - rem;
        case PadPolicy::ZeroPad: {
            const std::size_t padded = len + (period - rem);
            for (auto& node : values) node.resize(padded, 0.0);
            return padded;
        }
    }
    return len;
}

} // namespace

NodeSeries cumulate(const NodeSeries& raw, int period, PadPolicy pad) {
    check_period(period);
    if (raw.state != SeriesState::Raw) {
        throw DataError("cumulate expects a raw series, got state '" + to_string(raw.state) + "'");
    }
    NodeSeries out = raw;
    const auto T = static_cast<std::size_t>(period);
    const std::size_t len = resolve_blocks(out.values, out.length(), T, pad);
    for (auto& node : out.values) {
        node.resize(len);
        for (std::size_t start = 0; start < len; start += T) {
            for (std::size_t k = 1; k < T; ++k) node[start + k] += node[start + k - 1];
        }
    }
    out.period = period;
    out.state = SeriesState::DiurnalCumulative;
    return out;
}

NodeSeries decumulate(const NodeSeries& cumulative, int period) {
    check_period(period);
    if (cumulative.state != SeriesState::DiurnalCumulative) {
        throw DataError("decumulate expects a diurnal-cumulative series, got state '" +
                        to_string(cumulative.state) + "'");
    }
    const auto T = static_cast<std::size_t>(period);
    const std::size_t len = cumulative.length();
    if (len % T != 0) {
        throw DataError("cumulative series length is not a multiple of the period");
    }
    NodeSeries out = cumulative;
    for (std::size_t u = 0; u < out.values.size(); ++u) {
        auto& node = out.values[u];
        const auto& src = cumulative.values[u];
        for (std::size_t start = 0; start < len; start += T) {
            for (std::size_t k = T; k-- > 1;) {
                if (src[start + k] < src[start + k - 1]) {
                    throw DataError("decumulate: series decreases within a day block at node " +
                                    std::to_string(u) + ", step " + std::to_string(start + k));
                }
                node[start + k] = src[start + k] - src[start + k - 1];
            }
        }
    }
    out.state = SeriesState::Raw;
    return out;
}

NodeSeries super_resolve(const NodeSeries& cumulative, int period) {
    check_period(period);
    if (cumulative.state != SeriesState::DiurnalCumulative) {
        throw DataError("super_resolve expects a diurnal-cumulative series, got state '" +
                        to_string(cumulative.state) + "'");
    }
    const auto T = static_cast<std::size_t>(period);
    const std::size_t len = cumulative.length();
    if (len % T != 0) throw DataError("series length is not a multiple of the period");
    const std::size_t blocks = len / T;
    const std::size_t sr_period = 2 * T - 1;

    NodeSeries out;
    out.bin_width = cumulative.bin_width / 2.0;
    out.period = static_cast<int>(sr_period);
    out.state = SeriesState::SuperResolved;
    out.values.assign(cumulative.values.size(), std::vector<double>(blocks * sr_period, 0.0));
    for (std::size_t u = 0; u < cumulative.values.size(); ++u) {
        const auto& src = cumulative.values[u];
        auto& dst = out.values[u];
        for (std::size_t n = 0; n < blocks; ++n) {
            const std::size_t si = n * T;
            const std::size_t di = n * sr_period;
            for (std::size_t k = 0; k < T; ++k) dst[di + 2 * k] = src[si + k];
            // Midpoints exist only between samples of the same day, hence
            // k <= T-2; there is no cross-day interpolation.
            for (std::size_t k = 0; k + 1 < T; ++k) {
                dst[di + 2 * k + 1] = 0.5 * (src[si + k] + src[si + k + 1]);
            }
        }
    }
    return out;
}

NodeSeries downsample(const NodeSeries& super_resolved, int period) {
    check_period(period);
    if (super_resolved.state != SeriesState::SuperResolved) {
        throw DataError("downsample expects a super-resolved series, got state '" +
                        to_string(super_resolved.state) + "'");
    }
    const auto T = static_cast<std::size_t>(period);
    const std::size_t sr_period = 2 * T - 1;
    const std::size_t len = super_resolved.length();
    if (len % sr_period != 0) {
        throw DataError("super-resolved length " + std::to_string(len) +
                        " is not a multiple of the block length " + std::to_string(sr_period));
    }
    const std::size_t blocks = len / sr_period;

    NodeSeries out;
    out.bin_width = super_resolved.bin_width * 2.0;
    out.period = period;
    out.state = SeriesState::DiurnalCumulative;
    out.values.assign(super_resolved.values.size(), std::vector<double>(blocks * T, 0.0));
    for (std::size_t u = 0; u < super_resolved.values.size(); ++u) {
        const auto& src = super_resolved.values[u];
        auto& dst = out.values[u];
        for (std::size_t n = 0; n < blocks; ++n) {
            for (std::size_t k = 0; k < T; ++k) dst[n * T + k] = src[n * sr_period + 2 * k];
        }
    }
    return out;
}

} // namespace stcast::augment
