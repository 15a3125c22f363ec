#pragma once

#include "qns/graph.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace qns {

// An entanglement generation path: distinct end nodes at both ends, no
// interior end node, consecutive vertices joined by graph edges. Stored in
// canonical orientation (lower endpoint id first).
struct Path {
    std::vector<ComponentId> vertices;

    Path() = default;
    explicit Path(std::vector<ComponentId> v);

    ComponentId src() const { return vertices.front(); }
    ComponentId dst() const { return vertices.back(); }
    std::size_t hop_count() const { return vertices.size() - 2; } // interior vertices

    std::vector<ComponentId> internal(const ResourceGraph& g) const;
    std::size_t backbone_count(const ResourceGraph& g) const;

    auto operator<=>(const Path&) const = default;
};

std::string path_to_string(const Path& p);

// Key of one cell of the disjoint path partition.
struct CellKey {
    enum class Kind { Backbone = 0, Junction = 1, Interface = 2 };
    Kind kind = Kind::Backbone;
    std::uint32_t index = 0; // local-area index for Junction, EGI id for Interface

    auto operator<=>(const CellKey&) const = default;
};

std::string to_string(const CellKey& key);

// Disjoint partition of the allowed paths: one backbone cell, one junction
// cell per local area, one interface cell per EGI. Empty cells are retained
// so filling-class containers exist even with zero paths.
struct PathPartition {
    std::map<CellKey, std::vector<Path>> cells; // paths sorted within a cell
    std::uint64_t version = 1;

    std::optional<CellKey> cell_of(const Path& p) const;
    std::size_t path_count() const;
};

// Internal resources appearing on at least one path of each cell.
struct AssociatedResourceMap {
    std::map<CellKey, std::set<ComponentId>> by_cell;

    const std::set<ComponentId>& of(const CellKey& key) const;
};

// All allowed paths of the graph: for every end node pair, the valid paths
// that minimize the number of backbones traversed and, among those, are
// Pareto-minimal in per-local-area EGI counts. Each unordered pair is
// represented once, in canonical orientation.
std::vector<Path> enumerate_allowed_paths(const ResourceGraph& graph,
                                          const LocalAreaSet& areas);

std::pair<PathPartition, AssociatedResourceMap>
build_path_partition(const std::vector<Path>& paths, const ResourceGraph& graph,
                     const LocalAreaSet& areas);

// Strict-superset order on cells: a > b iff xi(b) is a proper subset of
// xi(a). Cells with empty resource sets compare unordered against everything.
bool xi_greater(const AssociatedResourceMap& xi, const CellKey& a, const CellKey& b);

// Well-behavedness of the cell resource sets: nonempty sets are pairwise
// distinct, and intersecting sets are strictly nested.
bool is_well_behaved(const AssociatedResourceMap& xi);

} // namespace qns
