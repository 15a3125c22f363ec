#pragma once

#include "qns/core.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qns {

enum class ComponentKind { EndNode, EGI, Junction, Backbone };

std::string to_string(ComponentKind k);
ComponentKind component_kind_from_string(const std::string& s);

using Edge = std::pair<ComponentId, ComponentId>; // normalized: first < second

inline Edge make_edge(ComponentId a, ComponentId b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Undirected graph of schedulable network components. Vertices are typed
// (end node / EGI / junction / backbone); edges are logical connections.
struct ResourceGraph {
    std::map<ComponentId, ComponentKind> vertices;
    std::set<Edge> edges;
    std::set<ComponentId> discoverable; // end nodes operated as servers

    bool has_vertex(ComponentId v) const { return vertices.count(v) != 0; }
    ComponentKind kind_of(ComponentId v) const { return vertices.at(v); }
    bool is_end_node(ComponentId v) const {
        auto it = vertices.find(v);
        return it != vertices.end() && it->second == ComponentKind::EndNode;
    }

    std::vector<ComponentId> end_nodes() const;
    std::vector<ComponentId> internal_resources() const; // EGIs, junctions, backbones
    std::vector<ComponentId> of_kind(ComponentKind k) const;
    std::vector<ComponentId> neighbors(ComponentId v) const;
};

struct EdgeCheck {
    Edge edge;
    bool allowed;
};

// Report produced by validate_graph. Callers reject graphs for which
// ok() is false.
struct GraphValidationReport {
    std::vector<EdgeCheck> edge_checks;
    std::vector<Edge> forbidden_edges;
    bool internally_connected = false;
    bool structurally_valid = true; // no self loops, endpoints exist

    bool ok() const {
        return structurally_valid && forbidden_edges.empty() && internally_connected;
    }
};

// Allowed edges: (end node, EGI), (EGI, junction), (junction, backbone).
bool is_allowed_edge(ComponentKind a, ComponentKind b);

// Classifies every edge and checks internal connectivity (paths between
// all vertex pairs that avoid interior end nodes).
GraphValidationReport validate_graph(const ResourceGraph& graph);

// Maximal internally connected sub-components after removing backbone
// vertices and their incident edges. End nodes join the area of their EGI.
// Areas are indexed by ascending smallest internal component id.
struct LocalAreaSet {
    std::vector<std::set<ComponentId>> areas;

    // -1 if the vertex is a backbone or in no area
    int area_of(ComponentId v) const;
};

LocalAreaSet compute_local_areas(const ResourceGraph& graph);

// JSON (de)serialization of topology files:
// {"vertices":[{"id":1,"kind":"end_node","discoverable":true},...],
//  "edges":[[1,2],...]}
std::string graph_to_json(const ResourceGraph& graph);
ResourceGraph graph_from_json(const std::string& text);

} // namespace qns
