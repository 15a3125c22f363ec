#pragma once

#include "qns/paths.hpp"

namespace qns {

struct CapabilityEntry {
    double rate = 0.0;     // mean successful end-to-end generations per second
    double fidelity = 0.0; // minimum entangled-pair fidelity
};

struct CapabilityModel {
    double base_rate_mean = 3.0;
    double base_rate_std = 0.6;
    double base_fid_mean = 0.93;
    double base_fid_std = 0.015;
    double per_hop_rate_factor = 0.9;       // per internal hop beyond the first
    double per_backbone_rate_factor = 0.35; // per backbone traversed
    double per_hop_fid_penalty = 0.004;
    double per_backbone_fid_penalty = 0.02;
};

// One capability entry per allowed path. The version increments with each
// regeneration; demands carrying a stale version are rejected at intake.
struct CapabilitiesTable {
    std::map<Path, CapabilityEntry> entries;
    std::uint64_t version = 1;
};

// Samples a base (rate, fidelity) per path from truncated normals, then
// scales by path length: multiplicative rate decay per internal hop and per
// backbone, subtractive fidelity penalties. Deterministic per seed.
CapabilitiesTable generate_capabilities(const PathPartition& partition,
                                        const ResourceGraph& graph,
                                        const CapabilityModel& model,
                                        std::uint64_t seed,
                                        std::uint64_t version = 1);

// Paths between src and dst with fidelity >= min_fidelity, sorted by
// descending rate (ties by canonical path order).
std::vector<Path> feasible_paths(const CapabilitiesTable& table, ComponentId src,
                                 ComponentId dst, double min_fidelity);

// CSV columns: path, hops, backbones, rate, fidelity
std::string capabilities_to_csv(const CapabilitiesTable& table, const ResourceGraph& graph);

} // namespace qns
