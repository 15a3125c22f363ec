#pragma once

#include "qns/demand.hpp"

#include <functional>
#include <span>

namespace qns {

// Active PGTs whose paths share one cell of the path partition. Tasks stay
// ordered by nondecreasing min_alloc (ties by pgt id).
struct FillingClass {
    CellKey cell;
    std::vector<Pgt> tasks;
    mutable std::optional<Nanos> required_time; // cached R(Z)

    void insert_sorted(Pgt pgt);
    bool erase(PgtId id);
};

// All filling classes of one partition version plus the associated-resource
// map used for ordering and admission accounting.
struct FillingClassSet {
    std::map<CellKey, FillingClass> classes;
    AssociatedResourceMap xi;
    std::map<Path, CellKey> path_cell;
    std::uint64_t partition_version = 0;

    std::optional<CellKey> cell_of(const Path& p) const;
    std::size_t active_count() const;
    std::vector<const Pgt*> all_tasks() const;
    Nanos cached_required(const CellKey& key) const;
};

// Upper bound on the minimum duration of a sequentially valid schedule
// holding min_alloc PGAs of every task. Input must be sorted by
// nondecreasing min_alloc.
Nanos calculate_required_time(std::span<const Pgt> sorted_tasks);

// Builds empty class containers for every partition cell.
FillingClassSet build_filling_classes(const PathPartition& partition,
                                      const AssociatedResourceMap& xi);

struct UpdateOutcome {
    FillingClassSet classes;
    std::vector<Pgt> removed;                       // no surviving path, demand removed
    std::vector<std::pair<PgtId, Pgt>> rehomed;     // old id -> replacement task
};

// Per-interval maintenance: drops terminated and expired tasks, rebuilds
// containers when the partition version changed, and applies the missing
// path rule (try re-admitting via alternatives_for, else remove).
UpdateOutcome update_filling_classes(
    const FillingClassSet& prev, const std::set<PgtId>& terminated,
    const PathPartition& partition, const AssociatedResourceMap& xi, Nanos now_ns,
    Nanos t_si_ns,
    const std::function<std::vector<Pgt>(const Pgt&)>& alternatives_for = nullptr);

struct AdmitOutcome {
    std::vector<std::pair<DemandId, Pgt>> accepted;
    std::vector<DemandId> rejected;
};

// Admission control: per-resource available time starts at T_SI, the
// required time of every class is reserved on all its associated resources,
// and an incoming task is accepted only if the tentative class required
// time fits the remaining availability on every associated resource.
// Accepting a task drops the demand's remaining alternatives.
AdmitOutcome admit_tasks(const std::vector<GammaD>& intake, FillingClassSet& classes,
                         Nanos t_si_ns);

// Independent accounting bound: maximum over totally ordered cell chains of
// the summed class required times (the executable form of the soundness
// theorem; must stay <= T_SI after every admission round).
Nanos good_accounting_bound(const FillingClassSet& classes);

} // namespace qns
