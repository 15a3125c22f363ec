#include "qns/validate.hpp"

#include <algorithm>

namespace qns {

ScheduleReport validate_schedule(const NetworkSchedule& schedule,
                                 const std::vector<Pgt>& tasks, Nanos t_si_ns) {
    ScheduleReport report;

    std::map<PgtId, const Pgt*> by_id;
    for (const Pgt& t : tasks) by_id.emplace(t.pgt_id, &t);

    // resource conflicts: sort each resource list independently by start
    // and compare neighbors
    for (const auto& [resource, list] : schedule.per_resource) {
        std::vector<Pga> sorted = list;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Pga& a, const Pga& b) { return a.start_ns < b.start_ns; });
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            if (sorted[i + 1].start_ns < sorted[i].end_ns)
                report.conflicts.push_back({resource, sorted[i], sorted[i + 1]});
        }
        for (const Pga& pga : sorted) report.max_end_ns = std::max(report.max_end_ns, pga.end_ns);
    }

    // per-task PGA sequences: take the first internal resource of the
    // task's path as the reference copy
    std::map<PgtId, std::vector<Pga>> per_task;
    for (const Pgt& t : tasks) {
        if (t.path.vertices.size() < 3) continue;
        ComponentId ref = t.path.vertices[1];
        auto it = schedule.per_resource.find(ref);
        if (it == schedule.per_resource.end()) continue;
        for (const Pga& pga : it->second)
            if (pga.pgt_id == t.pgt_id) per_task[t.pgt_id].push_back(pga);
    }
    // stray tasks present in the schedule but not in the task list still
    // get counted from whatever resource mentions them
    for (const auto& [resource, list] : schedule.per_resource) {
        for (const Pga& pga : list) {
            if (by_id.count(pga.pgt_id) || per_task.count(pga.pgt_id)) continue;
            per_task[pga.pgt_id].push_back(pga);
        }
    }

    for (auto& [pgt_id, list] : per_task) {
        std::sort(list.begin(), list.end(),
                  [](const Pga& a, const Pga& b) { return a.start_ns < b.start_ns; });
        report.pga_counts[pgt_id] = list.size();

        auto it = by_id.find(pgt_id);
        if (it == by_id.end()) continue;
        const Pgt& task = *it->second;
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            Nanos separation = list[i + 1].start_ns - list[i].end_ns;
            if (separation < task.minsep_ns)
                report.minsep_violations.push_back(
                    {pgt_id, list[i], list[i + 1], separation, task.minsep_ns});
        }
        if (list.size() < task.min_alloc) report.under_allocated.push_back(pgt_id);
    }

    // alignment completeness without a graph: use the task paths directly;
    // interior path vertices are the schedulable resources
    for (const Pgt& t : tasks) {
        if (t.path.vertices.size() < 3) continue;
        const auto& ref_list = per_task[t.pgt_id];
        for (std::size_t vi = 1; vi + 1 < t.path.vertices.size(); ++vi) {
            ComponentId r = t.path.vertices[vi];
            auto it = schedule.per_resource.find(r);
            std::vector<Pga> copies;
            if (it != schedule.per_resource.end()) {
                for (const Pga& pga : it->second)
                    if (pga.pgt_id == t.pgt_id) copies.push_back(pga);
            }
            if (copies.size() != ref_list.size()) {
                report.alignment_failures.push_back(t.pgt_id);
                break;
            }
            std::sort(copies.begin(), copies.end(),
                      [](const Pga& a, const Pga& b) { return a.start_ns < b.start_ns; });
            bool mismatch = false;
            for (std::size_t i = 0; i < copies.size(); ++i) {
                if (copies[i].start_ns != ref_list[i].start_ns ||
                    copies[i].end_ns != ref_list[i].end_ns)
                    mismatch = true;
            }
            if (mismatch) {
                report.alignment_failures.push_back(t.pgt_id);
                break;
            }
        }
        if (report.pga_counts.find(t.pgt_id) == report.pga_counts.end())
            report.pga_counts[t.pgt_id] = 0;
        if (report.pga_counts[t.pgt_id] < t.min_alloc &&
            std::find(report.under_allocated.begin(), report.under_allocated.end(),
                      t.pgt_id) == report.under_allocated.end())
            report.under_allocated.push_back(t.pgt_id);
    }

    report.duration_ok = report.max_end_ns <= t_si_ns;
    return report;
}

} // namespace qns
