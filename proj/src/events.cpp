#include "stcast/events.hpp"

#include "stcast/errors.hpp"
#include "stcast/ioutil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stcast {

EventSequence::EventSequence(std::vector<Event> events, double horizon, int num_nodes)
    : events_(std::move(events)), horizon_(horizon), num_nodes_(num_nodes) {
    if (num_nodes_ <= 0) throw DataError("EventSequence: num_nodes must be positive");
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw DataError("EventSequence: horizon must be positive and finite");
    }
    for (const Event& e : events_) {
        if (!std::isfinite(e.time) || e.time < 0.0) {
            throw DataError("EventSequence: event time must be finite and nonnegative");
        }
        if (e.node < 0 || e.node >= num_nodes_) {
            throw DataError("EventSequence: node " + std::to_string(e.node) + " outside [0, " +
                            std::to_string(num_nodes_) + ")");
        }
        if (e.time > horizon_) {
            throw DataError("EventSequence: event time exceeds horizon");
        }
    }
    // Stable sort keeps input order for simultaneous events at the same node.
    std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.node < b.node;
    });
}

std::string to_string(SeriesState s) {
    switch (s) {
        case SeriesState::Raw: return "raw";
        case SeriesState::DiurnalCumulative: return "diurnal_cumulative";
        case SeriesState::SuperResolved: return "super_resolved";
    }
    return "raw";
}

SeriesState series_state_from_string(const std::string& s) {
    if (s == "raw") return SeriesState::Raw;
    if (s == "diurnal_cumulative") return SeriesState::DiurnalCumulative;
    if (s == "super_resolved") return SeriesState::SuperResolved;
    throw DataError("unknown series state tag '" + s + "'");
}

EventSequence load_events(const std::string& path, int num_nodes, double horizon_override) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open event file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("event file '" + path + "' is empty (missing header)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time,node") {
        throw DataError("event file '" + path + "': expected header 'time,node', got '" + line + "'");
    }

    std::vector<Event> events;
    double max_time = 0.0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != 2) {
            throw DataError("event file '" + path + "': line " + std::to_string(line_no) +
                            " has " + std::to_string(fields.size()) + " fields, expected 2");
        }
        const std::string ctx = "at line " + std::to_string(line_no) + " of '" + path + "'";
        Event e;
        e.time = parse_double(fields[0], ctx);
        e.node = static_cast<int>(parse_long(fields[1], ctx));
        if (e.node < 0 || e.node >= num_nodes) {
            throw DataError("event file '" + path + "': line " + std::to_string(line_no) +
                            ": node " + std::to_string(e.node) + " outside [0, " +
                            std::to_string(num_nodes) + ")");
        }
        max_time = std::max(max_time, e.time);
        events.push_back(e);
    }

    // floor(t)+1 is the smallest whole hour strictly above t, so integer event
    // times stay strictly inside the half-open window.
    const double horizon = horizon_override > 0.0 ? horizon_override : std::floor(max_time) + 1.0;
    return EventSequence(std::move(events), horizon, num_nodes);
}

void save_events(const EventSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "time,node\n";
    for (const Event& e : seq.events()) {
        out << format_double(e.time) << ',' << e.node << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

NodeSeries bin_counts(const EventSequence& seq, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError("bin_counts: bin_width must be positive");
    const auto num_bins = static_cast<std::size_t>(std::ceil(seq.horizon() / bin_width));
    NodeSeries series;
    series.bin_width = bin_width;
    series.state = SeriesState::Raw;
    series.values.assign(static_cast<std::size_t>(seq.num_nodes()), std::vector<double>(num_bins, 0.0));
    for (const Event& e : seq.events()) {
        if (e.time >= seq.horizon()) continue; // half-open window
        auto k = static_cast<std::size_t>(std::floor(e.time / bin_width));
        if (k >= num_bins) k = num_bins - 1; // guard against float rounding at bin edges
        series.values[static_cast<std::size_t>(e.node)][k] += 1.0;
    }
    return series;
}

NodeSeries load_node_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open series file '" + path + "'");

    NodeSeries series;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t num_cols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            // `#state=<tag> bin_width=<hours> period=<steps>`
            std::istringstream meta(line.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "state") series.state = series_state_from_string(value);
                else if (key == "bin_width") series.bin_width = parse_double(value, "in series metadata");
                else if (key == "period") series.period = static_cast<int>(parse_long(value, "in series metadata"));
            }
            continue;
        }
        const auto fields = split_csv_row(line);
        if (!header_seen) {
            if (fields.empty() || fields[0] != "t") {
                throw DataError("series file '" + path + "': expected header 't,node0,...'");
            }
            num_cols = fields.size();
            if (num_cols < 2) throw DataError("series file '" + path + "': no node columns");
            series.values.assign(num_cols - 1, {});
            header_seen = true;
            continue;
        }
        if (fields.size() != num_cols) {
            throw DataError("series file '" + path + "': line " + std::to_string(line_no) +
                            " has " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(num_cols));
        }
        const std::string ctx = "at line " + std::to_string(line_no) + " of '" + path + "'";
        for (std::size_t u = 0; u + 1 < fields.size(); ++u) {
            series.values[u].push_back(parse_double(fields[u + 1], ctx));
        }
    }
    if (!header_seen) throw DataError("series file '" + path + "' has no header row");
    return series;
}

void save_node_series(const NodeSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "#state=" << to_string(series.state) << " bin_width=" << format_double(series.bin_width)
        << " period=" << series.period << '\n';
    out << 't';
    for (int u = 0; u < series.num_nodes(); ++u) out << ",node" << u;
    out << '\n';
    const std::size_t len = series.length();
    for (std::size_t t = 0; t < len; ++t) {
        out << t;
        for (int u = 0; u < series.num_nodes(); ++u) {
            out << ',' << format_double(series.values[static_cast<std::size_t>(u)][t]);
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

} // namespace stcast
