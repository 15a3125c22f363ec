#include "qns/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <limits>

namespace qns {

std::string to_string(ComponentKind k) {
    switch (k) {
    case ComponentKind::EndNode: return "end_node";
    case ComponentKind::EGI: return "egi";
    case ComponentKind::Junction: return "junction";
    case ComponentKind::Backbone: return "backbone";
    }
    return "?";
}

ComponentKind component_kind_from_string(const std::string& s) {
    if (s == "end_node") return ComponentKind::EndNode;
    if (s == "egi") return ComponentKind::EGI;
    if (s == "junction") return ComponentKind::Junction;
    if (s == "backbone") return ComponentKind::Backbone;
    throw std::invalid_argument("unknown component kind: " + s);
}

std::vector<ComponentId> ResourceGraph::end_nodes() const {
    return of_kind(ComponentKind::EndNode);
}

std::vector<ComponentId> ResourceGraph::internal_resources() const {
    std::vector<ComponentId> out;
    for (const auto& [id, kind] : vertices)
        if (kind != ComponentKind::EndNode) out.push_back(id);
    return out;
}

std::vector<ComponentId> ResourceGraph::of_kind(ComponentKind k) const {
    std::vector<ComponentId> out;
    for (const auto& [id, kind] : vertices)
        if (kind == k) out.push_back(id);
    return out;
}

std::vector<ComponentId> ResourceGraph::neighbors(ComponentId v) const {
    std::vector<ComponentId> out;
    for (const auto& [a, b] : edges) {
        if (a == v) out.push_back(b);
        else if (b == v) out.push_back(a);
    }
    return out;
}

bool is_allowed_edge(ComponentKind a, ComponentKind b) {
    auto pair_is = [&](ComponentKind x, ComponentKind y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    return pair_is(ComponentKind::EndNode, ComponentKind::EGI) ||
           pair_is(ComponentKind::EGI, ComponentKind::Junction) ||
           pair_is(ComponentKind::Junction, ComponentKind::Backbone);
}

namespace {

// Connectivity where interior vertices may not be end nodes: BFS that only
// expands through non-end-node vertices.
bool internally_connected(const ResourceGraph& g) {
    if (g.vertices.size() < 2) return true;

    std::map<ComponentId, std::vector<ComponentId>> adj;
    for (const auto& [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    ComponentId start = g.vertices.begin()->first;
    std::set<ComponentId> seen{start};
    std::deque<ComponentId> frontier{start};
    while (!frontier.empty()) {
        ComponentId v = frontier.front();
        frontier.pop_front();
        if (g.is_end_node(v) && v != start) continue; // end nodes are leaves
        for (ComponentId w : adj[v]) {
            if (seen.insert(w).second) frontier.push_back(w);
        }
    }
    return seen.size() == g.vertices.size();
}

} // namespace

GraphValidationReport validate_graph(const ResourceGraph& graph) {
    GraphValidationReport report;
    for (const auto& edge : graph.edges) {
        auto [a, b] = edge;
        if (a == b || !graph.has_vertex(a) || !graph.has_vertex(b)) {
            report.structurally_valid = false;
            report.edge_checks.push_back({edge, false});
            report.forbidden_edges.push_back(edge);
            continue;
        }
        bool allowed = is_allowed_edge(graph.kind_of(a), graph.kind_of(b));
        report.edge_checks.push_back({edge, allowed});
        if (!allowed) report.forbidden_edges.push_back(edge);
    }
    report.internally_connected = internally_connected(graph);
    return report;
}

int LocalAreaSet::area_of(ComponentId v) const {
    for (std::size_t i = 0; i < areas.size(); ++i)
        if (areas[i].count(v)) return static_cast<int>(i);
    return -1;
}

LocalAreaSet compute_local_areas(const ResourceGraph& graph) {
    // Remove backbone vertices and their incident edges, then take the
    // internally connected components of what remains. Union-find over the
    // surviving edges does the job because end nodes have degree edges only
    // to EGIs and cannot bridge two otherwise separate components... except
    // through multi-EGI attachment, which the family restricts to one area.
    std::map<ComponentId, ComponentId> parent;
    auto find = [&](ComponentId v) {
        ComponentId r = v;
        while (parent[r] != r) r = parent[r];
        while (parent[v] != r) {
            ComponentId next = parent[v];
            parent[v] = r;
            v = next;
        }
        return r;
    };

    for (const auto& [id, kind] : graph.vertices)
        if (kind != ComponentKind::Backbone) parent[id] = id;

    for (const auto& [a, b] : graph.edges) {
        if (graph.kind_of(a) == ComponentKind::Backbone ||
            graph.kind_of(b) == ComponentKind::Backbone)
            continue;
        ComponentId ra = find(a), rb = find(b);
        if (ra != rb) parent[ra] = rb;
    }

    std::map<ComponentId, std::set<ComponentId>> groups;
    for (const auto& [id, _] : parent) groups[find(id)].insert(id);

    // Order areas by their smallest internal component id so indices are
    // stable across runs.
    std::vector<std::pair<ComponentId, std::set<ComponentId>>> ordered;
    for (auto& [root, members] : groups) {
        ComponentId lowest_internal = std::numeric_limits<ComponentId>::max();
        for (ComponentId v : members)
            if (!graph.is_end_node(v)) lowest_internal = std::min(lowest_internal, v);
        ordered.emplace_back(lowest_internal, std::move(members));
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    LocalAreaSet out;
    for (auto& [key, members] : ordered) out.areas.push_back(std::move(members));
    return out;
}

std::string graph_to_json(const ResourceGraph& graph) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const auto& [id, kind] : graph.vertices) {
        nlohmann::json v{{"id", id}, {"kind", to_string(kind)}};
        if (graph.discoverable.count(id)) v["discoverable"] = true;
        j["vertices"].push_back(v);
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : graph.edges) j["edges"].push_back({a, b});
    return j.dump(2);
}

ResourceGraph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ResourceGraph g;
    for (const auto& v : j.at("vertices")) {
        ComponentId id = v.at("id").get<ComponentId>();
        g.vertices[id] = component_kind_from_string(v.at("kind").get<std::string>());
        if (v.value("discoverable", false)) g.discoverable.insert(id);
    }
    for (const auto& e : j.at("edges")) {
        g.edges.insert(make_edge(e.at(0).get<ComponentId>(), e.at(1).get<ComponentId>()));
    }
    return g;
}

} // namespace qns
