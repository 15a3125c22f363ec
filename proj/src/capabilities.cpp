#include "qns/capabilities.hpp"

#include <algorithm>
#include <sstream>

namespace qns {

CapabilitiesTable generate_capabilities(const PathPartition& partition,
                                        const ResourceGraph& graph,
                                        const CapabilityModel& model,
                                        std::uint64_t seed, std::uint64_t version) {
    CapabilitiesTable table;
    table.version = version;

    // Collect paths in canonical global order so sampling is stable.
    std::vector<Path> paths;
    for (const auto& [key, cell_paths] : partition.cells)
        paths.insert(paths.end(), cell_paths.begin(), cell_paths.end());
    std::sort(paths.begin(), paths.end());

    RngStream rng = make_stream(seed, "capabilities");
    for (const Path& p : paths) {
        double base_rate = rng.normal(model.base_rate_mean, model.base_rate_std);
        double base_fid = rng.normal(model.base_fid_mean, model.base_fid_std);
        base_rate = std::max(base_rate, 1e-9);
        base_fid = std::clamp(base_fid, 0.25, 1.0);

        auto hops = static_cast<double>(p.internal(graph).size());
        auto bbs = static_cast<double>(p.backbone_count(graph));
        double rate = base_rate * std::pow(model.per_hop_rate_factor, hops - 1.0) *
                      std::pow(model.per_backbone_rate_factor, bbs);
        double fid = base_fid - model.per_hop_fid_penalty * (hops - 1.0) -
                     model.per_backbone_fid_penalty * bbs;

        CapabilityEntry entry;
        entry.rate = std::max(rate, 1e-9);
        entry.fidelity = std::clamp(fid, 0.0, 1.0);
        table.entries.emplace(p, entry);
    }
    return table;
}

std::vector<Path> feasible_paths(const CapabilitiesTable& table, ComponentId src,
                                 ComponentId dst, double min_fidelity) {
    if (src > dst) std::swap(src, dst); // canonical orientation
    std::vector<std::pair<double, Path>> hits;
    for (const auto& [path, entry] : table.entries) {
        if (path.src() != src || path.dst() != dst) continue;
        if (entry.fidelity < min_fidelity) continue;
        hits.emplace_back(entry.rate, path);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<Path> out;
    out.reserve(hits.size());
    for (auto& [rate, path] : hits) out.push_back(std::move(path));
    return out;
}

std::string capabilities_to_csv(const CapabilitiesTable& table, const ResourceGraph& graph) {
    std::ostringstream os;
    os << "path,hops,backbones,rate,fidelity\n";
    for (const auto& [path, entry] : table.entries) {
        os << path_to_string(path) << ',' << path.internal(graph).size() << ','
           << path.backbone_count(graph) << ',' << entry.rate << ',' << entry.fidelity
           << '\n';
    }
    return os.str();
}

} // namespace qns
