#include "qns/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qns {

namespace {

using Clock = std::chrono::steady_clock;
constexpr int kWarmup = 3;

struct AdmitFixture {
    ResourceGraph graph;
    PathPartition partition;
    AssociatedResourceMap xi;
    FillingClassSet base_classes;
    std::vector<GammaD> intake;
    Nanos t_si_ns;
};

Pgt random_task(RngStream& rng, const std::vector<Path>& paths, PgtId id,
                Nanos horizon_ns) {
    Pgt t;
    t.pgt_id = id;
    t.demand_id = id;
    t.path = paths[rng.uniform_int(paths.size())];
    t.pga_duration_ns = seconds_to_nanos(1.0 + rng.uniform() * 4.0);
    t.minsep_ns = seconds_to_nanos(rng.uniform() * 10.0);
    t.min_alloc = 1 + static_cast<std::uint32_t>(rng.uniform_int(3));
    t.packet_success = 0.5;
    t.start_time_ns = 0;
    t.expiry_ns = horizon_ns;
    t.n_inst = 10;
    t.service_epsilon = 1e-3;
    return t;
}

AdmitFixture make_admit_fixture(int n_active, int k_incoming, std::uint64_t seed) {
    AdmitFixture fx;
    fx.graph = random_topology({2, 2, 20, 0.2}, split_seed(seed, "bench-topo"));
    auto areas = compute_local_areas(fx.graph);
    auto paths = enumerate_allowed_paths(fx.graph, areas);
    std::tie(fx.partition, fx.xi) = build_path_partition(paths, fx.graph, areas);
    fx.base_classes = build_filling_classes(fx.partition, fx.xi);

    // generous interval so admission exercises the full accounting path
    fx.t_si_ns = seconds_to_nanos(40.0 * (n_active + k_incoming) + 1000.0);

    RngStream rng = make_stream(seed, "bench-tasks");
    PgtId id = 1;
    for (int i = 0; i < n_active; ++i) {
        Pgt t = random_task(rng, paths, id++, fx.t_si_ns * 4);
        auto cell = fx.base_classes.cell_of(t.path);
        fx.base_classes.classes.at(*cell).insert_sorted(std::move(t));
    }
    for (int i = 0; i < k_incoming; ++i) {
        GammaD gamma;
        gamma.demand_id = id;
        gamma.alternatives.push_back(random_task(rng, paths, id, fx.t_si_ns * 4));
        ++id;
        fx.intake.push_back(std::move(gamma));
    }
    return fx;
}

BenchPoint time_admit(int n_active, int k_incoming, int repeats, std::uint64_t seed) {
    std::vector<double> times;
    for (int r = 0; r < repeats + kWarmup; ++r) {
        AdmitFixture fx = make_admit_fixture(n_active, k_incoming, seed + r);
        FillingClassSet classes = fx.base_classes;
        auto t0 = Clock::now();
        auto outcome = admit_tasks(fx.intake, classes, fx.t_si_ns);
        double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        (void)outcome;
        if (r >= kWarmup) times.push_back(dt);
    }
    BenchPoint p;
    p.repeats = repeats;
    p.mean_s = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    double var = 0.0;
    for (double t : times) var += (t - p.mean_s) * (t - p.mean_s);
    p.std_s = times.size() > 1 ? std::sqrt(var / (times.size() - 1)) : 0.0;
    return p;
}

} // namespace

std::vector<BenchPoint> bench_admit_sweep_k(const std::vector<int>& k_values,
                                            int n_active, int repeats,
                                            std::uint64_t seed) {
    std::vector<BenchPoint> out;
    for (int k : k_values) {
        BenchPoint p = time_admit(n_active, k, repeats, seed);
        p.x = k;
        out.push_back(p);
    }
    return out;
}

std::vector<BenchPoint> bench_admit_sweep_n(const std::vector<int>& n_values,
                                            int k_incoming, int repeats,
                                            std::uint64_t seed) {
    std::vector<BenchPoint> out;
    for (int n : n_values) {
        BenchPoint p = time_admit(n, k_incoming, repeats, seed);
        p.x = n;
        out.push_back(p);
    }
    return out;
}

double bench_admit_once(int n_active, int k_incoming, int repeats, std::uint64_t seed,
                        double* std_out) {
    BenchPoint p = time_admit(n_active, k_incoming, repeats, seed);
    if (std_out) *std_out = p.std_s;
    return p.mean_s;
}

namespace {

struct StressFixture {
    ResourceGraph graph;
    FillingClassSet classes;
    Nanos t_si_ns = seconds_to_nanos(8000.0);
};

StressFixture make_stress_fixture(int n_tasks) {
    StressFixture fx;
    const ComponentId egi = 1, e1 = 10, e2 = 11;
    fx.graph.vertices[egi] = ComponentKind::EGI;
    fx.graph.vertices[e1] = ComponentKind::EndNode;
    fx.graph.vertices[e2] = ComponentKind::EndNode;
    fx.graph.edges.insert(make_edge(e1, egi));
    fx.graph.edges.insert(make_edge(e2, egi));

    Path path(std::vector<ComponentId>{e1, egi, e2});
    PathPartition partition;
    partition.cells[{CellKey::Kind::Interface, egi}] = {path};
    AssociatedResourceMap xi;
    xi.by_cell[{CellKey::Kind::Interface, egi}] = {egi};
    fx.classes = build_filling_classes(partition, xi);

    auto& fc = fx.classes.classes.begin()->second;
    for (int i = 0; i < n_tasks; ++i) {
        Pgt t;
        t.pgt_id = static_cast<PgtId>(i + 1);
        t.demand_id = t.pgt_id;
        t.path = path;
        t.pga_duration_ns = seconds_to_nanos(1.0);
        t.minsep_ns = seconds_to_nanos(i == 0 ? 200.0 : 0.0);
        t.min_alloc = 20;
        t.packet_success = 0.5;
        t.expiry_ns = fx.t_si_ns * 100;
        fc.insert_sorted(std::move(t));
    }
    return fx;
}

} // namespace

std::vector<ScheduleBenchPoint> bench_schedule_sweep(int n_min, int n_max, int n_step,
                                                     int repeats, std::uint64_t seed) {
    (void)seed; // the stress set is deterministic
    std::vector<ScheduleBenchPoint> out;
    for (int n = n_min; n <= n_max; n += n_step) {
        StressFixture fx = make_stress_fixture(n);
        ScheduleBenchPoint point;
        point.n = n;
        point.repeats = repeats;
        std::vector<double> minimal_times, bonus_times;
        // batch sub-millisecond minimal phases so the clock resolution and
        // scheduling jitter do not dominate the fit
        int inner = 1;
        {
            auto t0 = Clock::now();
            NetworkSchedule probe = minimal_allocation_phase(fx.classes, fx.graph, fx.t_si_ns);
            double est = std::chrono::duration<double>(Clock::now() - t0).count();
            (void)probe;
            if (est < 4e-3) inner = static_cast<int>(std::min(64.0, 4e-3 / std::max(est, 1e-7)));
            inner = std::max(inner, 1);
        }
        for (int r = 0; r < repeats + kWarmup; ++r) {
            auto t0 = Clock::now();
            for (int i = 0; i < inner; ++i) {
                NetworkSchedule schedule =
                    minimal_allocation_phase(fx.classes, fx.graph, fx.t_si_ns);
                (void)schedule;
            }
            double t_minimal =
                std::chrono::duration<double>(Clock::now() - t0).count() / inner;

            NetworkSchedule schedule =
                minimal_allocation_phase(fx.classes, fx.graph, fx.t_si_ns);
            t0 = Clock::now();
            bonus_allocation(fx.classes, fx.graph, schedule, fx.t_si_ns);
            double t_bonus = std::chrono::duration<double>(Clock::now() - t0).count();
            if (r >= kWarmup) {
                minimal_times.push_back(t_minimal);
                bonus_times.push_back(t_bonus);
                point.bonus_pgas = schedule.total_bonus();
            }
        }
        auto stats = [](std::vector<double> v, double& mean, double& sd) {
            std::sort(v.begin(), v.end());
            // trim the extremes so one scheduling hiccup cannot skew a point
            if (v.size() >= 5) {
                v.erase(v.begin());
                v.pop_back();
            }
            mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
            double var = 0.0;
            for (double t : v) var += (t - mean) * (t - mean);
            sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
        };
        stats(minimal_times, point.minimal_mean_s, point.minimal_std_s);
        stats(bonus_times, point.bonus_mean_s, point.bonus_std_s);
        point.total_mean_s = point.minimal_mean_s + point.bonus_mean_s;
        out.push_back(point);
    }
    return out;
}

PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    PolyFit fit;
    const std::size_t n = x.size();
    if (n == 0 || degree < 0) return fit;
    const int terms = degree + 1;

    double x_scale = *std::max_element(x.begin(), x.end());
    if (x_scale == 0.0) x_scale = 1.0;

    // normal equations on scaled x
    std::vector<std::vector<double>> a(terms, std::vector<double>(terms + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double xs = x[i] / x_scale;
        std::vector<double> powers(terms, 1.0);
        for (int t = 1; t < terms; ++t) powers[t] = powers[t - 1] * xs;
        for (int r = 0; r < terms; ++r) {
            for (int c = 0; c < terms; ++c) a[r][c] += powers[r] * powers[c];
            a[r][terms] += powers[r] * y[i];
        }
    }
    // gaussian elimination with partial pivoting
    for (int col = 0; col < terms; ++col) {
        int pivot = col;
        for (int r = col + 1; r < terms; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-14) continue;
        for (int r = 0; r < terms; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c <= terms; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> coeffs(terms, 0.0);
    for (int t = 0; t < terms; ++t)
        coeffs[t] = std::abs(a[t][t]) < 1e-14 ? 0.0 : a[t][terms] / a[t][t];

    double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double xs = x[i] / x_scale, pred = 0.0, pw = 1.0;
        for (int t = 0; t < terms; ++t) {
            pred += coeffs[t] * pw;
            pw *= xs;
        }
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
        ss_res += (y[i] - pred) * (y[i] - pred);
    }
    fit.coefficients = std::move(coeffs);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

int bonus_local_max_n(const std::vector<ScheduleBenchPoint>& points) {
    const std::size_t n = points.size();
    if (n < 3) return -1;
    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = points[i].bonus_mean_s;
        int cnt = 1;
        if (i > 0) { sum += points[i - 1].bonus_mean_s; ++cnt; }
        if (i + 1 < n) { sum += points[i + 1].bonus_mean_s; ++cnt; }
        smooth[i] = sum / cnt;
    }
    int best = -1;
    double best_value = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (smooth[i] >= smooth[i - 1] && smooth[i] >= smooth[i + 1] &&
            smooth[i] > best_value) {
            best_value = smooth[i];
            best = points[i].n;
        }
    }
    return best;
}

int bonus_zero_n(const std::vector<ScheduleBenchPoint>& points) {
    for (const auto& p : points)
        if (p.bonus_pgas == 0) return p.n;
    return -1;
}

std::string bench_points_to_csv(const std::string& phase,
                                const std::vector<BenchPoint>& points) {
    std::ostringstream os;
    os << "phase,x,mean_s,std_s,repeats\n";
    for (const auto& p : points)
        os << phase << ',' << p.x << ',' << p.mean_s << ',' << p.std_s << ','
           << p.repeats << '\n';
    return os.str();
}

std::string schedule_bench_to_csv(const std::vector<ScheduleBenchPoint>& points) {
    std::ostringstream os;
    os << "phase,x,mean_s,std_s,repeats\n";
    for (const auto& p : points)
        os << "minimal," << p.n << ',' << p.minimal_mean_s << ',' << p.minimal_std_s
           << ',' << p.repeats << '\n';
    for (const auto& p : points)
        os << "bonus," << p.n << ',' << p.bonus_mean_s << ',' << p.bonus_std_s << ','
           << p.repeats << '\n';
    for (const auto& p : points)
        os << "total," << p.n << ',' << p.total_mean_s << ",0," << p.repeats << '\n';
    return os.str();
}

} // namespace qns
