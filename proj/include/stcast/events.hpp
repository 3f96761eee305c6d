#pragma once

#include <string>
#include <vector>

namespace stcast {

// One timestamped event on a node. Times are hours since the start of the
// observation window.
struct Event {
    double time = 0.0;
    int node = 0;
};

// Events sorted ascending by time (ties by node index, then input order) on
// the horizon [0, T). Immutable after construction.
class EventSequence {
public:
    EventSequence() = default;

    // Sorts, validates bounds and finiteness. Events with time > horizon are
    // rejected; an event exactly at the horizon is kept in storage but all
    // consumers treat the window as half-open [0, T).
    EventSequence(std::vector<Event> events, double horizon, int num_nodes);

    const std::vector<Event>& events() const { return events_; }
    double horizon() const { return horizon_; }
    int num_nodes() const { return num_nodes_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

private:
    std::vector<Event> events_;
    double horizon_ = 0.0;
    int num_nodes_ = 0;
};

enum class SeriesState { Raw, DiurnalCumulative, SuperResolved };

std::string to_string(SeriesState s);
SeriesState series_state_from_string(const std::string& s);

// Regular-interval per-node series. `period` is the number of steps per day
// block for the augmentation maps (0 = not set). The state tag travels with
// the CSV form so pipelines cannot double-augment.
struct NodeSeries {
    std::vector<std::vector<double>> values; // [node][timestep]
    double bin_width = 1.0;                  // hours
    int period = 0;                          // steps per day block
    SeriesState state = SeriesState::Raw;

    int num_nodes() const { return static_cast<int>(values.size()); }
    std::size_t length() const { return values.empty() ? 0 : values[0].size(); }
};

// Reads `time,node` CSV. Horizon defaults to the smallest whole hour strictly
// greater than the last event time (so every event stays inside the half-open
// window); pass horizon_override > 0 to pin it.
EventSequence load_events(const std::string& path, int num_nodes, double horizon_override = 0.0);

void save_events(const EventSequence& seq, const std::string& path);

// Histogram of events into bins of `bin_width` hours covering [0, horizon).
// Total count is conserved; events exactly at the horizon are excluded.
NodeSeries bin_counts(const EventSequence& seq, double bin_width);

NodeSeries load_node_series(const std::string& path);
void save_node_series(const NodeSeries& series, const std::string& path);

} // namespace stcast
