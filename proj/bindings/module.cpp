#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qns/bench.hpp"
#include "qns/sim.hpp"
#include "qns/validate.hpp"

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace qns;

namespace {

// json-string boundary keeps the binding surface small; the python package
// wraps these with dict conversions
std::string py_random_topology(std::uint32_t backbones, std::uint32_t local_areas,
                               std::uint32_t end_nodes, std::uint64_t seed,
                               double discoverable_fraction) {
    return graph_to_json(
        random_topology({backbones, local_areas, end_nodes, discoverable_fraction}, seed));
}

std::string py_dumbbell() { return graph_to_json(dumbbell_topology()); }

std::string py_validate_graph(const std::string& topology_json) {
    ResourceGraph g = graph_from_json(topology_json);
    auto report = validate_graph(g);
    nlohmann::json j;
    j["ok"] = report.ok();
    j["internally_connected"] = report.internally_connected;
    j["forbidden_edges"] = nlohmann::json::array();
    for (const auto& [a, b] : report.forbidden_edges) j["forbidden_edges"].push_back({a, b});
    return j.dump();
}

std::string py_allowed_paths(const std::string& topology_json) {
    ResourceGraph g = graph_from_json(topology_json);
    auto areas = compute_local_areas(g);
    auto paths = enumerate_allowed_paths(g, areas);
    nlohmann::json j = nlohmann::json::array();
    for (const Path& p : paths) j.push_back(p.vertices);
    return j.dump();
}

std::string py_path_partition(const std::string& topology_json) {
    ResourceGraph g = graph_from_json(topology_json);
    auto areas = compute_local_areas(g);
    auto paths = enumerate_allowed_paths(g, areas);
    auto [partition, xi] = build_path_partition(paths, g, areas);
    nlohmann::json j;
    for (const auto& [key, cell_paths] : partition.cells) {
        nlohmann::json cell;
        cell["paths"] = nlohmann::json::array();
        for (const Path& p : cell_paths) cell["paths"].push_back(p.vertices);
        cell["resources"] = xi.of(key);
        j[to_string(key)] = cell;
    }
    return j.dump();
}

double py_required_time(const std::string& pgts_json) {
    auto tasks = pgts_from_json(pgts_json);
    std::sort(tasks.begin(), tasks.end(), [](const Pgt& a, const Pgt& b) {
        return std::tie(a.min_alloc, a.pgt_id) < std::tie(b.min_alloc, b.pgt_id);
    });
    return nanos_to_seconds(calculate_required_time(tasks));
}

std::string py_run_scenario(const std::string& config_json, unsigned jobs) {
    ScenarioConfig config = scenario_from_json(config_json);
    ScenarioSummary summary = run_scenario(config, nullptr, jobs);
    return summary_to_json(summary);
}

std::string py_validate_schedule(const std::string& schedule_jsonl,
                                 const std::string& pgts_json, double t_si_s) {
    NetworkSchedule schedule = schedule_from_jsonl(schedule_jsonl);
    auto pgts = pgts_from_json(pgts_json);
    auto report = validate_schedule(schedule, pgts, seconds_to_nanos(t_si_s));
    nlohmann::json j;
    j["valid"] = report.valid();
    j["minimal_allocations_met"] = report.minimal_allocations_met();
    j["conflicts"] = report.conflicts.size();
    j["minsep_violations"] = report.minsep_violations.size();
    j["alignment_failures"] = report.alignment_failures.size();
    j["max_end_s"] = nanos_to_seconds(report.max_end_ns);
    return j.dump();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "core operations of the qnetsched controller and simulator";

    m.def("random_topology", &py_random_topology, py::arg("backbones"),
          py::arg("local_areas"), py::arg("end_nodes"), py::arg("seed") = 1,
          py::arg("discoverable_fraction") = 0.25,
          "generate a topology json string from the supported family");
    m.def("dumbbell_topology", &py_dumbbell, "the two-hub reference network");
    m.def("validate_graph", &py_validate_graph, py::arg("topology_json"));
    m.def("allowed_paths", &py_allowed_paths, py::arg("topology_json"));
    m.def("path_partition", &py_path_partition, py::arg("topology_json"));

    m.def("packet_success_probability", &packet_success_probability, py::arg("rate"),
          py::arg("window_s"), py::arg("pairs"), py::arg("pga_duration_s"),
          py::arg("attempt_period_s"));
    m.def(
        "minimal_allocation",
        [](double p, std::uint32_t n_inst, std::uint32_t n_si, double eps) -> py::object {
            auto l = minimal_allocation(p, n_inst, n_si, eps);
            if (!l) return py::none();
            return py::int_(*l);
        },
        py::arg("p_packet"), py::arg("n_inst"), py::arg("n_si"), py::arg("epsilon"));
    m.def("binomial_tail_below", &binomial_tail_below, py::arg("threshold"), py::arg("n"),
          py::arg("p"));

    m.def("required_time", &py_required_time, py::arg("pgts_json"));
    m.def("run_scenario", &py_run_scenario, py::arg("config_json"), py::arg("jobs") = 1);
    m.def("validate_schedule", &py_validate_schedule, py::arg("schedule_jsonl"),
          py::arg("pgts_json"), py::arg("t_si_s"));

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<InvalidWindow>(m, "InvalidWindow");
}
