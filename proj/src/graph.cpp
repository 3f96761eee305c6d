#include "stcast/graph.hpp"

#include "stcast/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace stcast {

int WeightedGraph::num_classes() const {
    int k = 0;
    for (int c : node_class) k = std::max(k, c + 1);
    return k;
}

void WeightedGraph::validate() const {
    if (num_nodes <= 0) throw DataError("WeightedGraph: num_nodes must be positive");
    if (static_cast<int>(node_class.size()) != num_nodes) {
        throw DataError("WeightedGraph: node_class must have one label per node");
    }
    for (int c : node_class) {
        if (c < 0) throw DataError("WeightedGraph: class labels must be nonnegative");
    }
    std::set<std::pair<int, int>> seen;
    for (const GraphEdge& e : edges) {
        if (e.src < 0 || e.src >= num_nodes || e.dst < 0 || e.dst >= num_nodes) {
            throw DataError("WeightedGraph: edge endpoint out of range");
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw DataError("WeightedGraph: edge weights must be positive and finite");
        }
        if (!seen.insert({e.src, e.dst}).second) {
            throw DataError("WeightedGraph: duplicate directed edge " + std::to_string(e.src) +
                            "->" + std::to_string(e.dst));
        }
    }
}

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("graph file '" + path + "': " + e.what());
    }
    WeightedGraph g;
    if (!j.contains("classes")) throw DataError("graph file '" + path + "' missing 'classes'");
    g.node_class = j.at("classes").get<std::vector<int>>();
    g.num_nodes = static_cast<int>(g.node_class.size());
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
        g.edges.push_back(GraphEdge{e.at("src").get<int>(), e.at("dst").get<int>(),
                                    e.at("weight").get<double>()});
    }
    g.validate();
    return g;
}

void save_graph(const WeightedGraph& graph, const std::string& path) {
    nlohmann::json j;
    nlohmann::json edges = nlohmann::json::array();
    for (const GraphEdge& e : graph.edges) {
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"weight", e.weight}});
    }
    j["edges"] = std::move(edges);
    j["classes"] = graph.node_class;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

} // namespace stcast
