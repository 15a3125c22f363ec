#include "qns/topology.hpp"

#include <algorithm>

namespace qns {

ResourceGraph random_topology(const TopologyParams& params, std::uint64_t seed) {
    const std::uint32_t areas = params.local_areas;
    const std::uint32_t backbones = params.backbones;
    const std::uint32_t ends = params.end_nodes;

    if (areas < 1) throw InfeasibleTopology("need at least one local area");
    if (ends < 2) throw InfeasibleTopology("need at least two end nodes");
    if (areas > 1 && backbones + 1 < areas)
        throw InfeasibleTopology("area connectivity needs at least areas-1 backbones");

    RngStream rng = make_stream(seed, "topology");
    ResourceGraph g;
    ComponentId next_id = 1;

    // Backbones joining areas: a spanning tree over the areas first, then
    // the remaining backbones between random area pairs. Each backbone gets
    // its own junction (border node) in both areas it joins.
    struct BackboneLink {
        std::uint32_t area_a, area_b;
    };
    std::vector<BackboneLink> links;
    for (std::uint32_t b = 0; b < backbones; ++b) {
        if (areas == 1) {
            links.push_back({0, 0});
        } else if (b + 1 < areas) {
            // attach area b+1 to a random earlier area
            std::uint32_t prev = static_cast<std::uint32_t>(rng.uniform_int(b + 1));
            links.push_back({prev, b + 1});
        } else {
            std::uint32_t x = static_cast<std::uint32_t>(rng.uniform_int(areas));
            std::uint32_t y = static_cast<std::uint32_t>(rng.uniform_int(areas));
            if (x == y) y = (y + 1) % areas;
            links.push_back({std::min(x, y), std::max(x, y)});
        }
    }

    // EGIs per area: 1-3, but a junction-less area cannot bridge multiple
    // EGIs, so areas with no incident backbone get exactly one.
    std::vector<std::uint32_t> junction_count(areas, 0);
    for (const auto& link : links) {
        ++junction_count[link.area_a];
        if (link.area_b != link.area_a) ++junction_count[link.area_b];
        else ++junction_count[link.area_a];
    }

    std::vector<std::vector<ComponentId>> area_egis(areas);
    std::vector<std::vector<ComponentId>> area_junctions(areas);
    for (std::uint32_t a = 0; a < areas; ++a) {
        std::uint32_t n_egi =
            junction_count[a] == 0 ? 1 : 1 + static_cast<std::uint32_t>(rng.uniform_int(3));
        for (std::uint32_t i = 0; i < n_egi; ++i) {
            ComponentId id = next_id++;
            g.vertices[id] = ComponentKind::EGI;
            area_egis[a].push_back(id);
        }
    }
    for (std::uint32_t a = 0; a < areas; ++a) {
        for (std::uint32_t k = 0; k < junction_count[a]; ++k) {
            ComponentId id = next_id++;
            g.vertices[id] = ComponentKind::Junction;
            area_junctions[a].push_back(id);
            for (ComponentId egi : area_egis[a]) g.edges.insert(make_edge(id, egi));
        }
    }
    std::vector<std::uint32_t> junction_cursor(areas, 0);
    for (const auto& link : links) {
        ComponentId id = next_id++;
        g.vertices[id] = ComponentKind::Backbone;
        ComponentId ja = area_junctions[link.area_a][junction_cursor[link.area_a]++];
        ComponentId jb = area_junctions[link.area_b][junction_cursor[link.area_b]++];
        g.edges.insert(make_edge(id, ja));
        g.edges.insert(make_edge(id, jb));
    }

    // End nodes: ceil(ends/areas) per area, each attached to one EGI of its
    // area, spread round-robin with a random start offset.
    std::uint32_t per_area = (ends + areas - 1) / areas;
    std::uint32_t produced = 0;
    for (std::uint32_t a = 0; a < areas && produced < ends; ++a) {
        std::uint32_t offset = static_cast<std::uint32_t>(rng.uniform_int(area_egis[a].size()));
        for (std::uint32_t k = 0; k < per_area && produced < ends; ++k, ++produced) {
            ComponentId id = next_id++;
            g.vertices[id] = ComponentKind::EndNode;
            ComponentId egi = area_egis[a][(offset + k) % area_egis[a].size()];
            g.edges.insert(make_edge(id, egi));
            if (rng.uniform() < params.discoverable_fraction) g.discoverable.insert(id);
        }
    }

    return g;
}

ResourceGraph dumbbell_topology() {
    ResourceGraph g;
    // Internal resources first so local-area indices follow hub order.
    const ComponentId i1 = 1, i2 = 2, i3 = 3, j1 = 4, j2 = 5, b1 = 6;
    g.vertices[i1] = ComponentKind::EGI;
    g.vertices[i2] = ComponentKind::EGI;
    g.vertices[i3] = ComponentKind::EGI;
    g.vertices[j1] = ComponentKind::Junction;
    g.vertices[j2] = ComponentKind::Junction;
    g.vertices[b1] = ComponentKind::Backbone;
    g.edges.insert(make_edge(i1, j1));
    g.edges.insert(make_edge(i2, j1));
    g.edges.insert(make_edge(i3, j2));
    g.edges.insert(make_edge(j1, b1));
    g.edges.insert(make_edge(j2, b1));

    ComponentId next = 10;
    for (ComponentId egi : {i1, i2, i3}) {
        for (int k = 0; k < 5; ++k) {
            ComponentId e = next++;
            g.vertices[e] = ComponentKind::EndNode;
            g.edges.insert(make_edge(e, egi));
        }
    }
    // one server-style node per hub
    g.discoverable.insert(10);
    g.discoverable.insert(20);
    return g;
}

} // namespace qns
