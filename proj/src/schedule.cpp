#include "qns/schedule.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cassert>
#include <limits>
#include <sstream>

namespace qns {

Nanos NetworkSchedule::max_end() const {
    Nanos end = 0;
    for (const auto& [id, pgas] : per_resource)
        if (!pgas.empty()) end = std::max(end, pgas.back().end_ns);
    return end;
}

std::uint64_t NetworkSchedule::total_minimal() const {
    std::uint64_t n = 0;
    for (const auto& [id, c] : minimal_pga_count) n += c;
    return n;
}

std::uint64_t NetworkSchedule::total_bonus() const {
    std::uint64_t n = 0;
    for (const auto& [id, c] : bonus_pga_count) n += c;
    return n;
}

namespace {

std::vector<ComponentId> internal_path(const Pgt& pgt, const ResourceGraph& graph) {
    return pgt.path.internal(graph);
}

void append_pga(NetworkSchedule& s, const Pgt& pgt, const ResourceGraph& graph,
                Nanos start) {
    Pga pga{pgt.pgt_id, pgt.demand_id, start, start + pgt.pga_duration_ns};
    for (ComponentId r : internal_path(pgt, graph)) {
        auto& list = s.per_resource[r];
        assert(list.empty() || list.back().start_ns <= start);
        list.push_back(pga);
    }
}

void insert_pga(NetworkSchedule& s, const Pgt& pgt, const ResourceGraph& graph,
                Nanos start) {
    Pga pga{pgt.pgt_id, pgt.demand_id, start, start + pgt.pga_duration_ns};
    for (ComponentId r : internal_path(pgt, graph)) {
        auto& list = s.per_resource[r];
        auto it = std::upper_bound(list.begin(), list.end(), pga,
                                   [](const Pga& a, const Pga& b) {
                                       return a.start_ns < b.start_ns;
                                   });
        list.insert(it, pga);
    }
}

} // namespace

void direct_allocation(const FillingClass& fc, const ResourceGraph& graph,
                       NetworkSchedule& schedule, Nanos t0) {
    const auto& tasks = fc.tasks;
    const std::size_t m = tasks.size();
    if (m == 0) return;

    std::vector<Nanos> suffix_max(m + 1, 0), suffix_sum(m + 1, 0);
    for (std::size_t x = m; x-- > 0;) {
        suffix_max[x] =
            std::max(suffix_max[x + 1], tasks[x].pga_duration_ns + tasks[x].minsep_ns);
        suffix_sum[x] = suffix_sum[x + 1] + tasks[x].pga_duration_ns;
    }

    Nanos stage_start = t0;
    std::uint32_t prev_alloc = 1;
    for (std::size_t stage = 0; stage < m; ++stage) {
        const Nanos cycle = std::max(suffix_max[stage], suffix_sum[stage]);
        const std::uint32_t cycles = tasks[stage].min_alloc - prev_alloc;
        for (std::uint32_t k = 0; k < cycles; ++k) {
            Nanos offset = 0;
            for (std::size_t x = stage; x < m; ++x) {
                append_pga(schedule, tasks[x], graph,
                           stage_start + static_cast<Nanos>(k) * cycle + offset);
                ++schedule.minimal_pga_count[tasks[x].pgt_id];
                offset += tasks[x].pga_duration_ns;
            }
        }
        // final PGA of the dropping task
        append_pga(schedule, tasks[stage], graph,
                   stage_start + static_cast<Nanos>(cycles) * cycle);
        ++schedule.minimal_pga_count[tasks[stage].pgt_id];
        stage_start += static_cast<Nanos>(cycles) * cycle + tasks[stage].pga_duration_ns;
        prev_alloc = tasks[stage].min_alloc;
    }
}

NetworkSchedule minimal_allocation_phase(const FillingClassSet& classes,
                                         const ResourceGraph& graph, Nanos t_si_ns) {
    (void)t_si_ns; // admission already bounded the block chain sums
    NetworkSchedule schedule;
    for (const auto& [key, fc] : classes.classes) {
        if (fc.tasks.empty()) continue;
        Nanos start = 0;
        for (const auto& [other, other_fc] : classes.classes) {
            if (other == key) continue;
            if (xi_greater(classes.xi, other, key))
                start += classes.cached_required(other);
        }
        direct_allocation(fc, graph, schedule, start);
    }
    return schedule;
}

namespace {

bool resources_available(const NetworkSchedule& s,
                         const std::vector<ComponentId>& resources, Nanos start,
                         Nanos end) {
    for (ComponentId r : resources) {
        auto it = s.per_resource.find(r);
        if (it == s.per_resource.end()) continue;
        const auto& list = it->second;
        // first PGA with start >= end cannot conflict; check the predecessor
        auto pos = std::lower_bound(list.begin(), list.end(), end,
                                    [](const Pga& a, Nanos t) { return a.start_ns < t; });
        if (pos != list.begin()) {
            const Pga& before = *(pos - 1);
            if (before.end_ns > start) return false;
        }
    }
    return true;
}

// same-task PGAs whose interval intersects (lo, hi]; empty when lo >= hi.
// Per-resource lists are non-overlapping and start-sorted, so ends are
// sorted as well.
void collect_overlaps(const NetworkSchedule& s, ComponentId resource, PgtId pgt,
                      Nanos lo, Nanos hi, std::vector<Pga>& out) {
    if (lo >= hi) return;
    auto it = s.per_resource.find(resource);
    if (it == s.per_resource.end()) return;
    const auto& list = it->second;
    auto pos = std::upper_bound(list.begin(), list.end(), lo,
                                [](Nanos t, const Pga& a) { return t < a.end_ns; });
    for (; pos != list.end() && pos->start_ns <= hi; ++pos) {
        if (pos->pgt_id == pgt) out.push_back(*pos);
    }
}

Nanos next_start_time(const NetworkSchedule& s,
                      std::vector<std::optional<Nanos>>& releases, Nanos t) {
    Nanos best = std::numeric_limits<Nanos>::max();
    for (const auto& [r, list] : s.per_resource) {
        auto pos = std::upper_bound(list.begin(), list.end(), t,
                                    [](Nanos v, const Pga& a) { return v < a.end_ns; });
        if (pos != list.end()) best = std::min(best, pos->end_ns);
    }

    Nanos best_release = std::numeric_limits<Nanos>::max();
    std::size_t best_release_idx = releases.size();
    for (std::size_t i = 0; i < releases.size(); ++i) {
        if (releases[i] && *releases[i] > t && *releases[i] < best_release) {
            best_release = *releases[i];
            best_release_idx = i;
        }
    }
    if (best_release <= best && best_release_idx < releases.size()) {
        releases[best_release_idx].reset();
        return best_release;
    }
    return best;
}

} // namespace

void round_robin_bonus(const FillingClass& fc, const ResourceGraph& graph,
                       NetworkSchedule& schedule, Nanos t_si_ns,
                       const BonusBudget& budget) {
    const auto& tasks = fc.tasks;
    const std::size_t m = tasks.size();
    if (m == 0) return;

    std::vector<std::vector<ComponentId>> paths(m);
    for (std::size_t i = 0; i < m; ++i) paths[i] = internal_path(tasks[i], graph);

    std::vector<std::optional<Nanos>> releases(m);
    std::size_t resume = m - 1; // so the first round starts at task 0
    std::uint64_t iterations = 0;

    Nanos t = next_start_time(schedule, releases, 0);
    while (t < t_si_ns && t != std::numeric_limits<Nanos>::max()) {
        if ((++iterations & 63) == 0 && budget.expired()) break;
        for (std::size_t step = 0; step < m; ++step) {
            const std::size_t i = (resume + 1 + step) % m;
            const Pgt& task = tasks[i];
            const Nanos end = t + task.pga_duration_ns;

            bool available = resources_available(schedule, paths[i], t, end);
            std::vector<Pga> left, right;
            if (!paths[i].empty()) {
                // aligned copies make one path resource sufficient
                collect_overlaps(schedule, paths[i].front(), task.pgt_id,
                                 t - task.minsep_ns, t, left);
                // def-consistent right window: starts closer than E + minsep
                collect_overlaps(schedule, paths[i].front(), task.pgt_id, t,
                                 end + task.minsep_ns, right);
            }
            if (available && left.empty() && right.empty() && end < t_si_ns) {
                insert_pga(schedule, task, graph, t);
                ++schedule.bonus_pga_count[task.pgt_id];
                resume = i;
            } else if (!left.empty()) {
                Nanos latest = 0;
                for (const Pga& pga : left) latest = std::max(latest, pga.end_ns);
                Nanos release = latest + task.minsep_ns;
                if (!releases[i] || *releases[i] < release) releases[i] = release;
            }
        }
        t = next_start_time(schedule, releases, t);
    }
}

void bonus_allocation(const FillingClassSet& classes, const ResourceGraph& graph,
                      NetworkSchedule& schedule, Nanos t_si_ns,
                      const BonusBudget& budget) {
    for (const auto& [key, fc] : classes.classes) {
        if (budget.expired()) break;
        round_robin_bonus(fc, graph, schedule, t_si_ns, budget);
    }
}

CompiledSchedule compile_schedule(const NetworkSchedule& schedule,
                                  const FillingClassSet& classes) {
    CompiledSchedule out;
    for (const auto& [r, list] : schedule.per_resource) {
        auto& entries = out[r];
        entries.reserve(list.size());
        for (const Pga& pga : list)
            entries.push_back({pga.pgt_id, pga.demand_id, pga.start_ns, pga.end_ns});
    }

    // replicate each task's PGAs onto its end nodes
    for (const auto& [key, fc] : classes.classes) {
        for (const Pgt& task : fc.tasks) {
            if (task.path.vertices.size() < 3) continue;
            ComponentId probe = task.path.vertices[1]; // first internal resource
            auto it = schedule.per_resource.find(probe);
            if (it == schedule.per_resource.end()) continue;
            for (const Pga& pga : it->second) {
                if (pga.pgt_id != task.pgt_id) continue;
                CompiledEntry entry{pga.pgt_id, pga.demand_id, pga.start_ns, pga.end_ns};
                out[task.path.src()].push_back(entry);
                out[task.path.dst()].push_back(entry);
            }
        }
    }
    for (auto& [r, entries] : out) {
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return std::tie(a.start_ns, a.pgt_id) < std::tie(b.start_ns, b.pgt_id);
        });
    }
    return out;
}

void ScheduleStore::put(std::int64_t interval, std::uint64_t version,
                        CompiledSchedule compiled) {
    entries_[interval] = Entry{version, std::move(compiled)};
}

const CompiledSchedule* ScheduleStore::get(std::int64_t interval) const {
    auto it = entries_.find(interval);
    return it == entries_.end() ? nullptr : &it->second.compiled;
}

std::optional<std::uint64_t> ScheduleStore::version_of(std::int64_t interval) const {
    auto it = entries_.find(interval);
    if (it == entries_.end()) return std::nullopt;
    return it->second.version;
}

void ScheduleStore::drop_before(std::int64_t interval) {
    entries_.erase(entries_.begin(), entries_.lower_bound(interval));
}

std::string schedule_to_jsonl(const NetworkSchedule& schedule) {
    std::ostringstream os;
    for (const auto& [r, list] : schedule.per_resource) {
        nlohmann::json j;
        j["component_id"] = r;
        j["interval"] = schedule.interval_index;
        j["version"] = schedule.version;
        auto& pgas = j["pgas"] = nlohmann::json::array();
        for (const Pga& pga : list) {
            pgas.push_back({{"pgt", pga.pgt_id},
                            {"demand", pga.demand_id},
                            {"start_ns", pga.start_ns},
                            {"end_ns", pga.end_ns}});
        }
        os << j.dump() << '\n';
    }
    return os.str();
}

NetworkSchedule schedule_from_jsonl(const std::string& text) {
    NetworkSchedule schedule;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        schedule.interval_index = j.value("interval", 0);
        schedule.version = j.value("version", 0);
        auto& list = schedule.per_resource[j.at("component_id").get<ComponentId>()];
        for (const auto& p : j.at("pgas")) {
            list.push_back({p.at("pgt").get<PgtId>(), p.at("demand").get<DemandId>(),
                            p.at("start_ns").get<Nanos>(), p.at("end_ns").get<Nanos>()});
        }
    }
    return schedule;
}

std::string pgts_to_json(const std::vector<Pgt>& pgts) {
    nlohmann::json j = nlohmann::json::array();
    for (const Pgt& t : pgts) {
        j.push_back({{"pgt_id", t.pgt_id},
                     {"demand_id", t.demand_id},
                     {"pga_duration_ns", t.pga_duration_ns},
                     {"packet_success", t.packet_success},
                     {"min_alloc", t.min_alloc},
                     {"path", t.path.vertices},
                     {"minsep_ns", t.minsep_ns},
                     {"start_time_ns", t.start_time_ns},
                     {"expiry_ns", t.expiry_ns},
                     {"n_inst", t.n_inst},
                     {"service_epsilon", t.service_epsilon}});
    }
    return j.dump(2);
}

std::vector<Pgt> pgts_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<Pgt> out;
    for (const auto& e : j) {
        Pgt t;
        t.pgt_id = e.at("pgt_id").get<PgtId>();
        t.demand_id = e.at("demand_id").get<DemandId>();
        t.pga_duration_ns = e.at("pga_duration_ns").get<Nanos>();
        t.packet_success = e.at("packet_success").get<double>();
        t.min_alloc = e.at("min_alloc").get<std::uint32_t>();
        t.path = Path(e.at("path").get<std::vector<ComponentId>>());
        t.minsep_ns = e.at("minsep_ns").get<Nanos>();
        t.start_time_ns = e.at("start_time_ns").get<Nanos>();
        t.expiry_ns = e.at("expiry_ns").get<Nanos>();
        t.n_inst = e.value("n_inst", 0u);
        t.service_epsilon = e.value("service_epsilon", 0.0);
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace qns
