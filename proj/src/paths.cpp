#include "qns/paths.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace qns {

Path::Path(std::vector<ComponentId> v) : vertices(std::move(v)) {
    if (vertices.size() >= 2 && vertices.front() > vertices.back())
        std::reverse(vertices.begin(), vertices.end());
}

std::vector<ComponentId> Path::internal(const ResourceGraph& g) const {
    std::vector<ComponentId> out;
    for (ComponentId v : vertices)
        if (!g.is_end_node(v)) out.push_back(v);
    return out;
}

std::size_t Path::backbone_count(const ResourceGraph& g) const {
    std::size_t n = 0;
    for (ComponentId v : vertices)
        if (g.kind_of(v) == ComponentKind::Backbone) ++n;
    return n;
}

std::string path_to_string(const Path& p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        if (i) os << '-';
        os << p.vertices[i];
    }
    return os.str();
}

std::string to_string(const CellKey& key) {
    switch (key.kind) {
    case CellKey::Kind::Backbone: return "backbone";
    case CellKey::Kind::Junction: return "junction:" + std::to_string(key.index);
    case CellKey::Kind::Interface: return "interface:" + std::to_string(key.index);
    }
    return "?";
}

std::optional<CellKey> PathPartition::cell_of(const Path& p) const {
    for (const auto& [key, paths] : cells) {
        if (std::binary_search(paths.begin(), paths.end(), p)) return key;
    }
    return std::nullopt;
}

std::size_t PathPartition::path_count() const {
    std::size_t n = 0;
    for (const auto& [key, paths] : cells) n += paths.size();
    return n;
}

const std::set<ComponentId>& AssociatedResourceMap::of(const CellKey& key) const {
    static const std::set<ComponentId> empty;
    auto it = by_cell.find(key);
    return it == by_cell.end() ? empty : it->second;
}

namespace {

struct PairSearch {
    const ResourceGraph& graph;
    const std::map<ComponentId, std::vector<ComponentId>>& adj;
    ComponentId target;
    std::size_t backbone_budget;
    std::vector<ComponentId> stack;
    std::set<ComponentId> on_stack;
    std::size_t backbones_used = 0;
    std::vector<Path>* out;

    void dfs(ComponentId v) {
        if (v == target) {
            out->emplace_back(stack);
            return;
        }
        auto it = adj.find(v);
        if (it == adj.end()) return;
        for (ComponentId w : it->second) {
            if (on_stack.count(w)) continue;
            bool is_end = graph.is_end_node(w);
            if (is_end && w != target) continue; // no interior end nodes
            std::size_t cost = graph.kind_of(w) == ComponentKind::Backbone ? 1 : 0;
            if (backbones_used + cost > backbone_budget) continue;
            backbones_used += cost;
            stack.push_back(w);
            on_stack.insert(w);
            dfs(w);
            on_stack.erase(w);
            stack.pop_back();
            backbones_used -= cost;
        }
    }
};

// Minimum number of backbone vertices on any valid path between two end
// nodes; nullopt when no valid path exists. 0-1 BFS, interior end nodes
// excluded.
std::optional<std::size_t> min_backbones(
    const ResourceGraph& graph,
    const std::map<ComponentId, std::vector<ComponentId>>& adj, ComponentId src,
    ComponentId dst) {
    std::map<ComponentId, std::size_t> dist;
    std::deque<ComponentId> dq;
    dist[src] = 0;
    dq.push_back(src);
    while (!dq.empty()) {
        ComponentId v = dq.front();
        dq.pop_front();
        if (v == dst) return dist[v];
        if (graph.is_end_node(v) && v != src) continue;
        auto it = adj.find(v);
        if (it == adj.end()) continue;
        for (ComponentId w : it->second) {
            if (graph.is_end_node(w) && w != dst) continue;
            std::size_t cost = graph.kind_of(w) == ComponentKind::Backbone ? 1 : 0;
            std::size_t nd = dist[v] + cost;
            auto [dit, inserted] = dist.emplace(w, nd);
            if (!inserted) {
                if (nd >= dit->second) continue;
                dit->second = nd;
            }
            if (cost == 0) dq.push_front(w);
            else dq.push_back(w);
        }
    }
    auto it = dist.find(dst);
    if (it == dist.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> per_area_egi_counts(const Path& p, const ResourceGraph& g,
                                             const LocalAreaSet& areas) {
    std::vector<std::size_t> counts(areas.areas.size(), 0);
    for (ComponentId v : p.vertices) {
        if (g.kind_of(v) != ComponentKind::EGI) continue;
        int a = areas.area_of(v);
        if (a >= 0) ++counts[static_cast<std::size_t>(a)];
    }
    return counts;
}

} // namespace

std::vector<Path> enumerate_allowed_paths(const ResourceGraph& graph,
                                          const LocalAreaSet& areas) {
    std::map<ComponentId, std::vector<ComponentId>> adj;
    for (const auto& [a, b] : graph.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& [v, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());

    std::vector<Path> all;
    const auto ends = graph.end_nodes();
    for (std::size_t i = 0; i < ends.size(); ++i) {
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
            ComponentId e = ends[i], f = ends[j];
            auto bstar = min_backbones(graph, adj, e, f);
            if (!bstar) continue;

            std::vector<Path> candidates;
            PairSearch search{graph, adj, f, *bstar, {e}, {e}, 0, &candidates};
            search.dfs(e);

            // keep only the paths that use exactly b* backbones
            std::erase_if(candidates, [&](const Path& p) {
                return p.backbone_count(graph) != *bstar;
            });

            // Pareto filter on per-area EGI counts. When a path achieving
            // the per-area minimum in every area exists, this yields exactly
            // those paths.
            std::vector<std::vector<std::size_t>> counts;
            counts.reserve(candidates.size());
            for (const Path& p : candidates)
                counts.push_back(per_area_egi_counts(p, graph, areas));

            std::vector<Path> kept;
            for (std::size_t a = 0; a < candidates.size(); ++a) {
                bool dominated = false;
                for (std::size_t b = 0; b < candidates.size() && !dominated; ++b) {
                    if (a == b) continue;
                    bool le_all = true, lt_any = false;
                    for (std::size_t k = 0; k < counts[a].size(); ++k) {
                        if (counts[b][k] > counts[a][k]) { le_all = false; break; }
                        if (counts[b][k] < counts[a][k]) lt_any = true;
                    }
                    dominated = le_all && lt_any;
                }
                if (!dominated) kept.push_back(candidates[a]);
            }
            all.insert(all.end(), kept.begin(), kept.end());
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

std::pair<PathPartition, AssociatedResourceMap>
build_path_partition(const std::vector<Path>& paths, const ResourceGraph& graph,
                     const LocalAreaSet& areas) {
    PathPartition partition;
    // Retain empty cells so class containers exist with zero paths.
    if (!graph.of_kind(ComponentKind::Backbone).empty())
        partition.cells[{CellKey::Kind::Backbone, 0}];
    for (std::size_t a = 0; a < areas.areas.size(); ++a) {
        bool has_junction = false;
        for (ComponentId v : areas.areas[a])
            if (graph.kind_of(v) == ComponentKind::Junction) has_junction = true;
        if (has_junction)
            partition.cells[{CellKey::Kind::Junction, static_cast<std::uint32_t>(a)}];
    }
    for (ComponentId egi : graph.of_kind(ComponentKind::EGI))
        partition.cells[{CellKey::Kind::Interface, egi}];

    for (const Path& p : paths) {
        CellKey key;
        if (p.backbone_count(graph) > 0) {
            key = {CellKey::Kind::Backbone, 0};
        } else {
            std::optional<ComponentId> junction, egi;
            for (ComponentId v : p.vertices) {
                if (graph.kind_of(v) == ComponentKind::Junction && !junction) junction = v;
                if (graph.kind_of(v) == ComponentKind::EGI && !egi) egi = v;
            }
            if (junction) {
                int a = areas.area_of(*junction);
                if (a < 0) throw std::logic_error("junction outside every local area");
                key = {CellKey::Kind::Junction, static_cast<std::uint32_t>(a)};
            } else if (egi) {
                key = {CellKey::Kind::Interface, *egi};
            } else {
                throw std::logic_error("path fits no partition cell: " + path_to_string(p));
            }
        }
        partition.cells[key].push_back(p);
    }
    for (auto& [key, cell_paths] : partition.cells)
        std::sort(cell_paths.begin(), cell_paths.end());

    AssociatedResourceMap xi;
    for (const auto& [key, cell_paths] : partition.cells) {
        auto& resources = xi.by_cell[key];
        for (const Path& p : cell_paths)
            for (ComponentId v : p.internal(graph)) resources.insert(v);
    }
    return {std::move(partition), std::move(xi)};
}

bool xi_greater(const AssociatedResourceMap& xi, const CellKey& a, const CellKey& b) {
    const auto& ra = xi.of(a);
    const auto& rb = xi.of(b);
    if (rb.empty() || ra.size() <= rb.size()) return false;
    return std::includes(ra.begin(), ra.end(), rb.begin(), rb.end());
}

bool is_well_behaved(const AssociatedResourceMap& xi) {
    std::vector<const std::set<ComponentId>*> sets;
    for (const auto& [key, resources] : xi.by_cell)
        if (!resources.empty()) sets.push_back(&resources);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            const auto& a = *sets[i];
            const auto& b = *sets[j];
            if (a == b) return false;
            bool intersect = false;
            for (ComponentId v : a)
                if (b.count(v)) { intersect = true; break; }
            if (!intersect) continue;
            bool a_in_b = std::includes(b.begin(), b.end(), a.begin(), a.end());
            bool b_in_a = std::includes(a.begin(), a.end(), b.begin(), b.end());
            if (!a_in_b && !b_in_a) return false;
        }
    }
    return true;
}

} // namespace qns
