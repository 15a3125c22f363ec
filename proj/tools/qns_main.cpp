#include "qns/bench.hpp"
#include "qns/sim.hpp"
#include "qns/validate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace qns;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::vector<int> parse_sweep(const std::string& text) {
    // "lo:hi:step" or comma separated values
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        int lo, hi, step;
        char c1, c2;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw std::runtime_error("bad sweep spec: " + text);
        for (int v = lo; v <= hi; v += step) out.push_back(v);
    } else {
        std::istringstream is(text);
        std::string item;
        while (std::getline(is, item, ',')) out.push_back(std::stoi(item));
    }
    return out;
}

void apply_override(ScenarioConfig& config, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("config: bad override " + spec);
    std::string key = spec.substr(0, eq);
    std::string value = spec.substr(eq + 1);
    if (key == "epsilon_service") config.epsilon_service = std::stod(value);
    else if (key == "T_SI_seconds") config.t_si_seconds = std::stod(value);
    else if (key == "horizon_intervals") config.horizon_intervals = std::stoll(value);
    else if (key == "bonus_enabled") config.bonus_enabled = (value == "true" || value == "1");
    else if (key == "check_invariants") config.check_invariants = (value == "true" || value == "1");
    else throw ConfigError("config: unknown override key " + key);
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, unsigned jobs,
            bool export_schedules) {
    ScenarioConfig config;
    try {
        config = scenario_from_json(read_file(config_path));
        for (const auto& o : overrides) apply_override(config, o);
        if (export_schedules) config.export_schedules = true;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
        return 2;
    }
    try {
        std::vector<RunResult> runs;
        ScenarioSummary summary = run_scenario(config, &runs, jobs);
        fs::path dir = out_dir.empty() ? fs::path(config_path).parent_path()
                                       : fs::path(out_dir);
        if (!dir.empty()) fs::create_directories(dir);
        write_file(dir / "metrics.csv", metrics_to_csv(runs));
        write_file(dir / "summary.json", summary_to_json(summary));
        write_file(dir / "events.jsonl", events_to_jsonl(runs));
        if (config.export_schedules) {
            for (const RunResult& run : runs) {
                if (run.last_schedule_jsonl.empty()) continue;
                write_file(dir / ("schedule_seed" + std::to_string(run.seed) + ".jsonl"),
                           run.last_schedule_jsonl);
                write_file(dir / ("pgts_seed" + std::to_string(run.seed) + ".json"),
                           run.last_pgts_json);
            }
        }
        std::cout << summary_to_json(summary) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 3;
    }
}

int cmd_gen_topology(std::uint32_t backbones, std::uint32_t areas, std::uint32_t ends,
                     double discoverable, std::uint64_t seed, bool dumbbell,
                     const std::string& out, const std::string& capabilities_csv) {
    try {
        ResourceGraph graph =
            dumbbell ? dumbbell_topology()
                     : random_topology({backbones, areas, ends, discoverable}, seed);
        auto report = validate_graph(graph);
        if (!report.ok()) {
            std::cerr << "generated graph failed validation\n";
            return 3;
        }
        std::string text = graph_to_json(graph);
        if (out.empty()) std::cout << text << "\n";
        else write_file(out, text);
        if (!capabilities_csv.empty()) {
            auto areas_set = compute_local_areas(graph);
            auto paths = enumerate_allowed_paths(graph, areas_set);
            auto [partition, xi] = build_path_partition(paths, graph, areas_set);
            auto table = generate_capabilities(partition, graph, CapabilityModel{}, seed);
            write_file(capabilities_csv, capabilities_to_csv(table, graph));
        }
        return 0;
    } catch (const InfeasibleTopology& e) {
        std::cerr << "infeasible topology: " << e.what() << "\n";
        return 2;
    }
}

int cmd_validate(const std::string& schedule_path, const std::string& pgts_path,
                 double t_si_s) {
    NetworkSchedule schedule;
    std::vector<Pgt> pgts;
    try {
        schedule = schedule_from_jsonl(read_file(schedule_path));
        pgts = pgts_from_json(read_file(pgts_path));
    } catch (const std::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }
    auto report = validate_schedule(schedule, pgts, seconds_to_nanos(t_si_s));
    std::cout << "conflicts: " << report.conflicts.size() << "\n";
    std::cout << "minsep_violations: " << report.minsep_violations.size() << "\n";
    std::cout << "alignment_failures: " << report.alignment_failures.size() << "\n";
    std::cout << "under_allocated: " << report.under_allocated.size() << "\n";
    std::cout << "max_end_s: " << nanos_to_seconds(report.max_end_ns) << "\n";
    std::cout << "duration_ok: " << (report.duration_ok ? "yes" : "no") << "\n";
    for (const auto& c : report.conflicts)
        std::cout << "  conflict resource=" << c.resource << " pgts=" << c.first.pgt_id
                  << "," << c.second.pgt_id << " at " << c.first.start_ns << "/"
                  << c.second.start_ns << "\n";
    for (const auto& v : report.minsep_violations)
        std::cout << "  minsep pgt=" << v.pgt_id << " separation_ns=" << v.separation_ns
                  << " required_ns=" << v.required_ns << "\n";
    bool ok = report.valid() && report.minimal_allocations_met();
    std::cout << (ok ? "VALID" : "INVALID") << "\n";
    return ok ? 0 : 1;
}

int cmd_bench_admit(const std::string& k_sweep, int n_fixed, const std::string& n_sweep,
                    int k_fixed, int repeats, std::uint64_t seed,
                    const std::string& out) {
    std::ostringstream csv;
    csv << "phase,x,mean_s,std_s,repeats\n";

    auto ks = parse_sweep(k_sweep);
    auto points_k = bench_admit_sweep_k(ks, n_fixed, repeats, seed);
    std::vector<double> xs, ys;
    for (const auto& p : points_k) {
        csv << "admit_k," << p.x << ',' << p.mean_s << ',' << p.std_s << ',' << p.repeats
            << "\n";
        xs.push_back(p.x);
        ys.push_back(p.mean_s);
    }
    PolyFit fit_k = polyfit(xs, ys, 3);
    std::cout << "k sweep (N=" << n_fixed << "): cubic fit R^2 = " << fit_k.r_squared
              << "\n";

    auto ns = parse_sweep(n_sweep);
    auto points_n = bench_admit_sweep_n(ns, k_fixed, repeats, seed + 1);
    xs.clear();
    ys.clear();
    for (const auto& p : points_n) {
        csv << "admit_n," << p.x << ',' << p.mean_s << ',' << p.std_s << ',' << p.repeats
            << "\n";
        xs.push_back(p.x);
        ys.push_back(p.mean_s);
    }
    PolyFit fit_n = polyfit(xs, ys, 2);
    std::cout << "N sweep (k=" << k_fixed << "): quadratic fit R^2 = " << fit_n.r_squared
              << "\n";

    double headline_std = 0.0;
    double headline = bench_admit_once(n_fixed, k_fixed, std::max(3, repeats / 2), seed + 2,
                                       &headline_std);
    std::cout << "admit k=" << k_fixed << " N=" << n_fixed << ": mean " << headline
              << " s (std " << headline_std << ")\n";

    if (!out.empty()) write_file(out, csv.str());
    else std::cout << csv.str();
    return 0;
}

int cmd_bench_schedule(int n_min, int n_max, int n_step, int repeats, std::uint64_t seed,
                       const std::string& out) {
    auto points = bench_schedule_sweep(n_min, n_max, n_step, repeats, seed);
    std::vector<double> xs, minimal, total;
    for (const auto& p : points) {
        xs.push_back(p.n);
        minimal.push_back(p.minimal_mean_s);
        total.push_back(p.total_mean_s);
    }
    PolyFit fit_min = polyfit(xs, minimal, 2);
    PolyFit fit_total = polyfit(xs, total, 3);
    std::cout << "minimal phase quadratic fit R^2 = " << fit_min.r_squared << "\n";
    std::cout << "overall cubic fit R^2 = " << fit_total.r_squared << "\n";
    std::cout << "bonus local max at N = " << bonus_local_max_n(points) << "\n";
    std::cout << "bonus reaches zero at N = " << bonus_zero_n(points) << "\n";

    std::string csv = schedule_bench_to_csv(points);
    if (!out.empty()) write_file(out, csv);
    else std::cout << csv;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate-when-requested quantum network controller and simulator"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::uint64_t seed = 1;
    std::string out;
    app.add_option("--seed", seed, "global random seed")->capture_default_str();
    app.add_option("--out", out, "output file or directory");

    auto* run = app.add_subcommand("run", "run a scenario config");
    std::string config_path;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
    run->add_option("config", config_path, "scenario config (json)")->required();
    run->add_option("--override", overrides, "key=value config override");
    run->add_option("--jobs", jobs, "parallel seeds")->capture_default_str();
    bool export_schedules = false;
    run->add_flag("--export-schedules", export_schedules,
                  "write the final interval schedule and pgt set per seed");

    auto* gen = app.add_subcommand("gen-topology", "generate a topology json");
    std::uint32_t backbones = 1, areas = 2, ends = 15;
    double discoverable = 0.25;
    bool dumbbell = false;
    gen->add_option("--backbones", backbones)->capture_default_str();
    gen->add_option("--local-areas", areas)->capture_default_str();
    gen->add_option("--end-nodes", ends)->capture_default_str();
    gen->add_option("--discoverable-fraction", discoverable)->capture_default_str();
    gen->add_flag("--dumbbell", dumbbell, "emit the reference two-hub network");
    std::string capabilities_csv;
    gen->add_option("--with-capabilities", capabilities_csv,
                    "also write a sampled capabilities table csv");

    auto* val = app.add_subcommand("validate", "validate an exported schedule");
    std::string schedule_path, pgts_path;
    double t_si_s = 1800.0;
    val->add_option("schedule", schedule_path, "schedule jsonl")->required();
    val->add_option("pgts", pgts_path, "pgt set json")->required();
    val->add_option("--t-si", t_si_s, "scheduling interval seconds")->capture_default_str();

    auto* ba = app.add_subcommand("bench-admit", "admission control benchmark");
    std::string k_sweep = "100:1000:100", n_sweep = "100:1000:100";
    int n_fixed = 1000, k_fixed = 1000, repeats = 10;
    ba->add_option("--k-sweep", k_sweep)->capture_default_str();
    ba->add_option("--n-fixed", n_fixed)->capture_default_str();
    ba->add_option("--n-sweep", n_sweep)->capture_default_str();
    ba->add_option("--k-fixed", k_fixed)->capture_default_str();
    ba->add_option("--repeats", repeats)->capture_default_str();

    auto* bs = app.add_subcommand("bench-schedule", "schedule computation benchmark");
    int n_min = 5, n_max = 400, n_step = 5, s_repeats = 10;
    bs->add_option("--n-min", n_min)->capture_default_str();
    bs->add_option("--n-max", n_max)->capture_default_str();
    bs->add_option("--n-step", n_step)->capture_default_str();
    bs->add_option("--repeats", s_repeats)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out, overrides, jobs, export_schedules);
        if (gen->parsed())
            return cmd_gen_topology(backbones, areas, ends, discoverable, seed, dumbbell, out, capabilities_csv);
        if (val->parsed()) return cmd_validate(schedule_path, pgts_path, t_si_s);
        if (ba->parsed())
            return cmd_bench_admit(k_sweep, n_fixed, n_sweep, k_fixed, repeats, seed, out);
        if (bs->parsed())
            return cmd_bench_schedule(n_min, n_max, n_step, s_repeats, seed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
