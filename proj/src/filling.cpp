#include "qns/filling.hpp"

#include <algorithm>

namespace qns {

namespace {

bool task_order(const Pgt& a, const Pgt& b) {
    if (a.min_alloc != b.min_alloc) return a.min_alloc < b.min_alloc;
    return a.pgt_id < b.pgt_id;
}

} // namespace

void FillingClass::insert_sorted(Pgt pgt) {
    auto it = std::upper_bound(tasks.begin(), tasks.end(), pgt, task_order);
    tasks.insert(it, std::move(pgt));
    required_time.reset();
}

bool FillingClass::erase(PgtId id) {
    auto it = std::find_if(tasks.begin(), tasks.end(),
                           [&](const Pgt& t) { return t.pgt_id == id; });
    if (it == tasks.end()) return false;
    tasks.erase(it);
    required_time.reset();
    return true;
}

std::optional<CellKey> FillingClassSet::cell_of(const Path& p) const {
    auto it = path_cell.find(p);
    if (it == path_cell.end()) return std::nullopt;
    return it->second;
}

std::size_t FillingClassSet::active_count() const {
    std::size_t n = 0;
    for (const auto& [key, fc] : classes) n += fc.tasks.size();
    return n;
}

std::vector<const Pgt*> FillingClassSet::all_tasks() const {
    std::vector<const Pgt*> out;
    for (const auto& [key, fc] : classes)
        for (const Pgt& t : fc.tasks) out.push_back(&t);
    return out;
}

Nanos FillingClassSet::cached_required(const CellKey& key) const {
    const auto& fc = classes.at(key);
    if (!fc.required_time)
        fc.required_time = calculate_required_time(fc.tasks);
    return *fc.required_time;
}

Nanos calculate_required_time(std::span<const Pgt> sorted_tasks) {
    const std::size_t m = sorted_tasks.size();
    if (m == 0) return 0;

    // suffix max of E + minsep and suffix sum of E give every cycle length
    std::vector<Nanos> suffix_max(m + 1, 0), suffix_sum(m + 1, 0);
    for (std::size_t x = m; x-- > 0;) {
        const Pgt& t = sorted_tasks[x];
        suffix_max[x] = std::max(suffix_max[x + 1], t.pga_duration_ns + t.minsep_ns);
        suffix_sum[x] = suffix_sum[x + 1] + t.pga_duration_ns;
    }

    Nanos total = 0;
    std::uint32_t prev_alloc = 1;
    for (std::size_t x = 0; x < m; ++x) {
        const Pgt& t = sorted_tasks[x];
        const Nanos cycle = std::max(suffix_max[x], suffix_sum[x]);
        const std::uint32_t cycles = t.min_alloc - prev_alloc; // n_0 = l_0 - 1
        total += static_cast<Nanos>(cycles) * cycle + t.pga_duration_ns;
        prev_alloc = t.min_alloc;
    }
    return total;
}

FillingClassSet build_filling_classes(const PathPartition& partition,
                                      const AssociatedResourceMap& xi) {
    FillingClassSet set;
    set.xi = xi;
    set.partition_version = partition.version;
    for (const auto& [key, paths] : partition.cells) {
        FillingClass fc;
        fc.cell = key;
        set.classes.emplace(key, std::move(fc));
        for (const Path& p : paths) set.path_cell.emplace(p, key);
    }
    return set;
}

namespace {

// shared reservation bookkeeping for admit_tasks and the missing-path rule
struct Reservations {
    std::map<ComponentId, Nanos> available;

    static Reservations from(const FillingClassSet& classes, Nanos t_si_ns) {
        Reservations r;
        for (const auto& [key, resources] : classes.xi.by_cell)
            for (ComponentId id : resources) r.available.emplace(id, t_si_ns);
        for (const auto& [key, fc] : classes.classes) {
            Nanos required = classes.cached_required(key);
            if (required == 0) continue;
            for (ComponentId id : classes.xi.of(key)) r.available[id] -= required;
        }
        return r;
    }

    void credit(const std::set<ComponentId>& resources, Nanos amount) {
        for (ComponentId id : resources) available[id] += amount;
    }
    void debit(const std::set<ComponentId>& resources, Nanos amount) {
        for (ComponentId id : resources) available[id] -= amount;
    }
    bool fits(const std::set<ComponentId>& resources, Nanos required) const {
        for (ComponentId id : resources) {
            auto it = available.find(id);
            Nanos have = it == available.end() ? 0 : it->second;
            if (have - required < 0) return false;
        }
        return true;
    }
};

// try to place one task; returns true when accepted and committed
bool try_admit(FillingClassSet& classes, Reservations& res, const Pgt& pgt,
               Nanos /*t_si_ns*/) {
    auto cell = classes.cell_of(pgt.path);
    if (!cell) return false;
    auto& fc = classes.classes.at(*cell);
    const auto& resources = classes.xi.of(*cell);
    const Nanos old_required = classes.cached_required(*cell);

    std::vector<Pgt> tentative = fc.tasks;
    auto it = std::upper_bound(tentative.begin(), tentative.end(), pgt, task_order);
    tentative.insert(it, pgt);
    const Nanos new_required = calculate_required_time(tentative);

    res.credit(resources, old_required); // cancel the old reservation
    if (!res.fits(resources, new_required)) {
        res.debit(resources, old_required); // restore
        return false;
    }
    fc.tasks = std::move(tentative);
    fc.required_time = new_required;
    res.debit(resources, new_required);
    return true;
}

} // namespace

UpdateOutcome update_filling_classes(
    const FillingClassSet& prev, const std::set<PgtId>& terminated,
    const PathPartition& partition, const AssociatedResourceMap& xi, Nanos now_ns,
    Nanos t_si_ns, const std::function<std::vector<Pgt>(const Pgt&)>& alternatives_for) {
    UpdateOutcome out;
    const bool rebuilt = partition.version != prev.partition_version;

    if (!rebuilt) {
        out.classes = prev;
        for (auto& [key, fc] : out.classes.classes) {
            auto before = fc.tasks.size();
            std::erase_if(fc.tasks, [&](const Pgt& t) {
                return terminated.count(t.pgt_id) != 0 || t.expiry_ns <= now_ns;
            });
            if (fc.tasks.size() != before) fc.required_time.reset();
        }
        return out;
    }

    out.classes = build_filling_classes(partition, xi);
    std::vector<Pgt> orphans;
    for (const auto& [key, fc] : prev.classes) {
        for (const Pgt& t : fc.tasks) {
            if (terminated.count(t.pgt_id) || t.expiry_ns <= now_ns) continue;
            if (auto cell = out.classes.cell_of(t.path)) {
                out.classes.classes.at(*cell).insert_sorted(t);
            } else {
                orphans.push_back(t);
            }
        }
    }

    // missing path rule: re-admit on an alternative surviving path when the
    // remaining capacity allows, otherwise the demand is removed
    Reservations res = Reservations::from(out.classes, t_si_ns);
    for (const Pgt& orphan : orphans) {
        bool placed = false;
        if (alternatives_for) {
            for (const Pgt& alt : alternatives_for(orphan)) {
                if (try_admit(out.classes, res, alt, t_si_ns)) {
                    out.rehomed.emplace_back(orphan.pgt_id, alt);
                    placed = true;
                    break;
                }
            }
        }
        if (!placed) out.removed.push_back(orphan);
    }
    return out;
}

AdmitOutcome admit_tasks(const std::vector<GammaD>& intake, FillingClassSet& classes,
                         Nanos t_si_ns) {
    AdmitOutcome out;
    Reservations res = Reservations::from(classes, t_si_ns);

    for (const GammaD& gamma : intake) {
        bool accepted = false;
        for (const Pgt& alternative : gamma.alternatives) {
            if (try_admit(classes, res, alternative, t_si_ns)) {
                out.accepted.emplace_back(gamma.demand_id, alternative);
                accepted = true;
                break; // remaining alternatives of this demand are dropped
            }
        }
        if (!accepted) out.rejected.push_back(gamma.demand_id);
    }
    return out;
}

Nanos good_accounting_bound(const FillingClassSet& classes) {
    // longest chain sum over the strict-superset order of the cells
    std::vector<CellKey> keys;
    for (const auto& [key, fc] : classes.classes) keys.push_back(key);

    std::map<CellKey, Nanos> best;
    // cells are iterated in canonical order (backbone, junctions,
    // interfaces), which is a linear extension of the order: a chain tops
    // out at earlier keys.
    std::function<Nanos(const CellKey&)> chain = [&](const CellKey& key) -> Nanos {
        auto it = best.find(key);
        if (it != best.end()) return it->second;
        Nanos below = 0;
        for (const CellKey& other : keys) {
            if (other == key) continue;
            if (xi_greater(classes.xi, key, other))
                below = std::max(below, chain(other));
        }
        Nanos value = classes.cached_required(key) + below;
        best[key] = value;
        return value;
    };

    Nanos bound = 0;
    for (const CellKey& key : keys) bound = std::max(bound, chain(key));
    return bound;
}

} // namespace qns
