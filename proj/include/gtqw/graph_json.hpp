#ifndef GTQW_GRAPH_JSON_HPP
#define GTQW_GRAPH_JSON_HPP

#include <string>

#include <json.hpp>

#include "gtqw/error.hpp"
#include "gtqw/graphs.hpp"

namespace gtqw {

// Schema:
//   { "B": int, "n": int, "seed": uint64,
//     "nodes": [ {"id": int, "column": int}, ... ],   // ids 0..N-1
//     "edges": [ [id, id], ... ],
//     "entrance": id, "exit": id }

inline nlohmann::json graph_to_json(const GluedTreeGraph& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t id = 0; id < g.node_count(); ++id) {
        nodes.push_back({{"id", id}, {"column", g.column[id]}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) {
        edges.push_back({a, b});
    }
    nlohmann::json out;
    out["B"] = g.branching;
    out["n"] = g.depth;
    out["seed"] = g.seed;
    out["nodes"] = std::move(nodes);
    out["edges"] = std::move(edges);
    out["entrance"] = g.entrance;
    out["exit"] = g.exit;
    return out;
}

/// Parses the schema above. Structural validity is left to validate_gluing.
inline GluedTreeGraph graph_from_json(const nlohmann::json& j) {
    try {
        GluedTreeGraph g;
        g.branching = j.at("B").get<int>();
        g.depth = j.at("n").get<int>();
        g.seed = j.at("seed").get<std::uint64_t>();
        const auto& nodes = j.at("nodes");
        g.column.assign(nodes.size(), -1);
        for (const auto& node : nodes) {
            const auto id = node.at("id").get<std::size_t>();
            if (id >= g.column.size()) {
                throw IoError("graph json: node id " + std::to_string(id) + " out of range");
            }
            g.column[id] = node.at("column").get<int>();
        }
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw IoError("graph json: edges must be [id, id] pairs");
            }
            g.edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
        }
        g.entrance = j.at("entrance").get<NodeId>();
        g.exit = j.at("exit").get<NodeId>();
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("graph json: ") + e.what());
    }
}

}  // namespace gtqw

#endif
