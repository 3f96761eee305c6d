#pragma once

#include <string>
#include <vector>

namespace stcast {

// Directed weighted graph with a class label per node. Edge {src, dst}
// means events at src influence dst, so pooling for node i reads the
// in-edges with dst == i.
struct GraphEdge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;
};

struct WeightedGraph {
    int num_nodes = 0;
    std::vector<GraphEdge> edges;
    std::vector<int> node_class; // length num_nodes, labels in [0, K)

    int num_classes() const;
    void validate() const; // throws DataError on duplicates, bad weights, bad labels
};

WeightedGraph load_graph(const std::string& path);
void save_graph(const WeightedGraph& graph, const std::string& path);

} // namespace stcast
