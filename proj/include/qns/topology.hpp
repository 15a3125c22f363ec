#pragma once

#include "qns/graph.hpp"

namespace qns {

struct TopologyParams {
    std::uint32_t backbones = 1;
    std::uint32_t local_areas = 2;
    std::uint32_t end_nodes = 15;
    double discoverable_fraction = 0.25;
};

struct InfeasibleTopology : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Random graph from the supported family: allowed edges only, internally
// connected, with the requested component counts. Deterministic per seed.
// Throws InfeasibleTopology when the counts cannot yield an internally
// connected graph (fewer than areas-1 backbones, multiple areas with no
// backbone, fewer than 2 end nodes).
ResourceGraph random_topology(const TopologyParams& params, std::uint64_t seed);

// The two-hub reference network: 15 end nodes on three EGIs (5 each), one
// junction per hub, one backbone joining the hubs.
ResourceGraph dumbbell_topology();

} // namespace qns
