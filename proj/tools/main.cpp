// command-line harness: generate | simulate | verify | sweep | bounds | plot
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msched/analysis.hpp"
#include "msched/brute.hpp"
#include "msched/dist.hpp"
#include "msched/model.hpp"
#include "msched/policy.hpp"
#include "msched/sim.hpp"
#include "msched/workload.hpp"

namespace fs = std::filesystem;
using namespace msched;

namespace {

constexpr int EXIT_OK = 0;
constexpr int EXIT_VALIDATION = 1;
constexpr int EXIT_RUNTIME = 2;
constexpr int EXIT_VIOLATION = 3;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::vector<std::string> parse_string_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary); // LF endings everywhere
    if (!f) throw std::runtime_error("cannot open output file: " + p.string());
    return f;
}

double percentile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    std::size_t i = static_cast<std::size_t>(q * (sorted.size() - 1) + 0.5);
    return sorted[std::min(i, sorted.size() - 1)];
}

void write_reports_csv(const fs::path& path, const std::vector<BoundReport>& reports) {
    auto f = open_out(path);
    f << "name,satisfied,bound,observed,margin,inputs\n";
    for (const BoundReport& r : reports) {
        std::string inputs;
        for (const auto& [k, v] : r.inputs) {
            if (!inputs.empty()) inputs += ';';
            inputs += k + "=" + num(v);
        }
        f << r.name << ',' << (r.satisfied ? (*r.satisfied ? "1" : "0") : "") << ','
          << num(r.bound_value) << ','
          << (r.observed_value ? num(*r.observed_value) : "") << ','
          << (r.margin ? num(*r.margin) : "") << ',' << inputs << '\n';
    }
}

bool all_satisfied(const std::vector<BoundReport>& reports,
                   const std::string& skip_name = "") {
    for (const BoundReport& r : reports) {
        if (!skip_name.empty() && r.name == skip_name) continue;
        if (r.satisfied && !*r.satisfied) return false;
    }
    return true;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const std::string& dist_spec, double lambda, int jobs, int machines,
                 const std::string& split_spec, double np_frac,
                 std::optional<double> eta_cap, std::uint64_t seed, bool parallel,
                 const std::string& out) {
    SizeDistribution dist = SizeDistribution::parse(dist_spec);
    TaskSplit split = TaskSplit::parse(split_spec, np_frac, eta_cap);
    Instance inst = sample_instance(dist, split, lambda, jobs, machines, seed, parallel);
    save_instance(inst, out);
    std::cout << "wrote " << out << " (" << jobs << " jobs, rho="
              << num(rho(dist, lambda, machines)) << ")\n";
    return EXIT_OK;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& instance_path, const std::string& policy_str,
                 const std::string& events_csv, const std::string& jobs_csv,
                 const std::vector<double>& y_grid, const std::vector<double>& k_grid) {
    Instance inst = load_instance(instance_path);
    PolicySpec policy = PolicySpec::parse(policy_str);

    if (policy.kind == PolicyKind::BruteOpt) {
        BruteResult res = brute_force_optimal(inst);
        std::cout << "policy=brute total_flow=" << num(res.total_flow)
                  << " mean_flow=" << num(res.total_flow / inst.jobs.size()) << "\n";
        return EXIT_OK;
    }

    TraceConfig cfg;
    cfg.record_snapshots = !events_csv.empty();
    Trace tr = run(inst, policy, cfg);
    std::cout << "policy=" << policy.name() << " n_jobs=" << tr.jobs.size()
              << " total_flow=" << num(tr.total_flow())
              << " mean_flow=" << num(tr.mean_flow()) << "\n";

    if (!events_csv.empty()) {
        auto f = open_out(events_csv);
        f << "time,event_kind,job_id,remaining_total,n_alive";
        for (double k : k_grid) f << ",W_prefix_" << num(k);
        for (double y : y_grid) f << ",W_leq_" << num(y);
        f << "\n";
        for (const TraceEvent& e : tr.events) {
            const char* kind = e.kind == EventKind::Arrival    ? "arrival"
                               : e.kind == EventKind::TaskDone ? "task_done"
                                                               : "job_done";
            const Snapshot& s = tr.snapshot_at(e.time);
            double total = 0.0;
            for (const SnapshotEntry& je : s.jobs) total += je.remaining;
            f << num(e.time) << ',' << kind << ',' << e.job_id << ',' << num(total)
              << ',' << s.n_alive;
            for (double k : k_grid) f << ',' << num(tr.w_leq(e.time, std::ldexp(1.0, int(k))));
            for (double y : y_grid) f << ',' << num(tr.w_leq(e.time, y));
            f << "\n";
        }
    }
    if (!jobs_csv.empty()) {
        auto f = open_out(jobs_csv);
        f << "job_id,arrival,size,completion,flow\n";
        for (const JobRecord& r : tr.jobs)
            f << r.id << ',' << num(r.arrival) << ',' << num(r.size) << ','
              << num(r.completion) << ',' << num(r.flow()) << "\n";
    }
    return EXIT_OK;
}

// ---------------------------------------------------------------- sweep

struct SweepConfig {
    std::string name = "sweep";
    std::string dist = "exp:mu=1";
    std::string split = "single";
    double np_frac = 0.0;
    std::optional<double> eta_cap;
    int machines = 1;
    bool parallel_tasks = false;
    std::vector<std::string> policies = {"m-srpt", "srpt1n"};
    std::vector<double> rhos = {0.5};
    int reps = 2;
    int jobs = 1000;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool real_timings = false;
};

SweepConfig load_sweep_config(const std::string& path, SweepConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
    if (doc.contains("name")) base.name = doc["name"].get<std::string>();
    if (doc.contains("dist")) base.dist = doc["dist"].get<std::string>();
    if (doc.contains("split")) base.split = doc["split"].get<std::string>();
    if (doc.contains("np_frac")) base.np_frac = doc["np_frac"].get<double>();
    if (doc.contains("eta_cap")) base.eta_cap = doc["eta_cap"].get<double>();
    if (doc.contains("machines")) base.machines = doc["machines"].get<int>();
    if (doc.contains("parallel_tasks")) base.parallel_tasks = doc["parallel_tasks"].get<bool>();
    if (doc.contains("policies")) base.policies = doc["policies"].get<std::vector<std::string>>();
    if (doc.contains("rhos")) base.rhos = doc["rhos"].get<std::vector<double>>();
    if (doc.contains("reps")) base.reps = doc["reps"].get<int>();
    if (doc.contains("jobs")) base.jobs = doc["jobs"].get<int>();
    if (doc.contains("seed")) base.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out_dir")) base.out_dir = doc["out_dir"].get<std::string>();
    return base;
}

int run_sweep(const SweepConfig& cfg) {
    SizeDistribution dist = SizeDistribution::parse(cfg.dist);
    TaskSplit split = TaskSplit::parse(cfg.split, cfg.np_frac, cfg.eta_cap);
    for (double r : cfg.rhos)
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("sweep: rho " + num(r) + " is not stable (need (0,1))");
    if (cfg.reps < 1 || cfg.jobs < 1)
        throw std::invalid_argument("sweep: reps and jobs must be positive");
    for (const std::string& p : cfg.policies) PolicySpec::parse(p); // validate early

    fs::create_directories(cfg.out_dir);
    auto results = open_out(fs::path(cfg.out_dir) / (cfg.name + "_results.csv"));
    results << "policy,rho,seed,n_jobs,mean_flow,total_flow,p50_flow,p99_flow,"
               "mean_busy_period,wallclock_ms,error\n";
    bool any_failed = false;

    struct Cell { std::vector<double> rep_means; double busy_sum = 0; int busy_n = 0; };
    std::map<std::pair<std::string, double>, Cell> cells;

    for (std::size_t ri = 0; ri < cfg.rhos.size(); ++ri) {
        double rho_target = cfg.rhos[ri];
        double lambda = rho_target * cfg.machines / dist.mean();
        for (const std::string& pol : cfg.policies) {
            for (int rep = 0; rep < cfg.reps; ++rep) {
                std::uint64_t rep_seed = cfg.seed + 1000003ULL * rep + 104729ULL * ri;
                results << pol << ',' << num(rho_target) << ',' << rep_seed << ','
                        << cfg.jobs << ',';
                try {
                    Instance inst = sample_instance(dist, split, lambda, cfg.jobs,
                                                    cfg.machines, rep_seed,
                                                    cfg.parallel_tasks);
                    TraceConfig tc;
                    tc.record_events = false;
                    tc.validate = false;
                    auto t0 = std::chrono::steady_clock::now();
                    Trace tr = run(inst, PolicySpec::parse(pol), tc);
                    auto t1 = std::chrono::steady_clock::now();
                    std::vector<double> flows;
                    for (const JobRecord& jr : tr.jobs) flows.push_back(jr.flow());
                    std::sort(flows.begin(), flows.end());
                    double busy_mean = 0.0;
                    for (const BusyPeriod& bp : tr.busy_periods) busy_mean += bp.length;
                    if (!tr.busy_periods.empty()) busy_mean /= tr.busy_periods.size();
                    // wallclock breaks byte-determinism, so it is opt-in
                    long long ms = cfg.real_timings
                        ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                        : -1;
                    results << num(tr.mean_flow()) << ',' << num(tr.total_flow()) << ','
                            << num(percentile_sorted(flows, 0.50)) << ','
                            << num(percentile_sorted(flows, 0.99)) << ','
                            << num(busy_mean) << ',' << ms << ",\n";
                    Cell& c = cells[{pol, rho_target}];
                    c.rep_means.push_back(tr.mean_flow());
                    c.busy_sum += busy_mean;
                    ++c.busy_n;
                } catch (const std::exception& e) {
                    any_failed = true;
                    std::string msg = e.what();
                    std::replace(msg.begin(), msg.end(), ',', ';');
                    results << ",,,,,-1," << msg << "\n";
                }
            }
        }
    }

    auto summary = open_out(fs::path(cfg.out_dir) / (cfg.name + "_summary.csv"));
    summary << "policy,rho,reps,mean_flow,ci_lo,ci_hi,mean_busy_period\n";
    for (const auto& [key, cell] : cells) {
        double m = 0.0;
        for (double v : cell.rep_means) m += v;
        m /= cell.rep_means.size();
        double lo = m, hi = m;
        if (cell.rep_means.size() > 1) {
            auto ci = bootstrap_percentile_ci(cell.rep_means, 1000, cfg.seed ^ 0x5eedULL);
            lo = ci.first;
            hi = ci.second;
        }
        summary << key.first << ',' << num(key.second) << ',' << cell.rep_means.size()
                << ',' << num(m) << ',' << num(lo) << ',' << num(hi) << ','
                << num(cell.busy_n ? cell.busy_sum / cell.busy_n : 0.0) << "\n";
    }

    // ratio curve (m-srpt vs srpt1n on shared instances) for the same grid
    auto ratio = open_out(fs::path(cfg.out_dir) / (cfg.name + "_ratio.csv"));
    ratio << "rho,ratio,ci_lo,ci_hi,mean_flow_msrpt,mean_flow_srpt1n,gap\n";
    if (cfg.reps >= 10) {
        auto curve = heavy_traffic_ratio_curve(dist, split, cfg.machines, cfg.rhos,
                                               cfg.reps, cfg.jobs, cfg.seed);
        for (const HeavyTrafficPoint& pt : curve)
            ratio << num(pt.rho) << ',' << num(pt.ratio) << ',' << num(pt.ratio_ci_lo)
                  << ',' << num(pt.ratio_ci_hi) << ',' << num(pt.mean_flow_msrpt) << ','
                  << num(pt.mean_flow_srpt1n) << ',' << num(pt.gap) << "\n";
    }
    return any_failed ? EXIT_RUNTIME : EXIT_OK;
}

// ---------------------------------------------------------------- verify

int verify_lemma_workload(int n_instances, int n_jobs, std::uint64_t seed,
                          const std::string& out_dir, bool charging_too) {
    SizeDistribution dist = SizeDistribution::exponential(1.0);
    std::vector<BoundReport> all;
    bool ok = true;
    const int machine_choices[] = {1, 2, 4};
    for (int i = 0; i < n_instances; ++i) {
        int N = machine_choices[i % 3];
        double lambda = 0.8 * N / dist.mean();
        TaskSplit split = TaskSplit::parse("geom:q=0.5", 0.4, 1.0);
        Instance inst = sample_instance(dist, split, lambda, n_jobs, N, seed + i);
        InstanceParams params = instance_params(inst);
        std::vector<double> y_grid;
        for (int g = 0; g < 16; ++g)
            y_grid.push_back(params.p_min + (params.p_max - params.p_min) * (g + 1) / 16.0);
        auto [ta, tb] = coupled_run(inst, PolicySpec::parse("m-srpt"),
                                    PolicySpec::parse("srpt1n"));
        auto reports = audit_workload_lemma(ta, tb, N, params.eta, y_grid);
        if (!all_satisfied(reports, "class-diff-strict")) ok = false;
        if (charging_too) {
            auto ch = audit_charging_bounds(ta, inst);
            if (!all_satisfied(ch)) ok = false;
            reports.insert(reports.end(), ch.begin(), ch.end());
        }
        if (i < 5 || !ok) // keep files small: first few instances + any failure
            all.insert(all.end(), reports.begin(), reports.end());
        if (!ok) break;
    }
    write_reports_csv(fs::path(out_dir) / (charging_too ? "charging_reports.csv"
                                                        : "lemma_workload_reports.csv"),
                      all);
    std::cout << (ok ? "PASS" : "FAIL") << " (" << n_instances << " instances)\n";
    return ok ? EXIT_OK : EXIT_VIOLATION;
}

int verify_busy(int n_jobs, std::uint64_t seed, const std::string& out_dir) {
    SizeDistribution dist = SizeDistribution::exponential(1.0);
    TaskSplit split = TaskSplit::parse("single", 0.0, std::nullopt);
    std::vector<BoundReport> reports;
    bool ok = true;
    for (double r : {0.3, 0.5, 0.7}) {
        Instance inst = sample_instance(dist, split, r, n_jobs, 1, seed);
        TraceConfig cfg;
        cfg.record_events = false;
        Trace tr = run(inst, PolicySpec::parse("srpt1n"), cfg);
        std::vector<double> w, len;
        for (const BusyPeriod& bp : measure_busy_periods(tr)) {
            w.push_back(bp.initial_work);
            len.push_back(bp.length);
        }
        double slope = ols_slope(w, len);
        double expect = 1.0 / (1.0 - r);
        BoundReport rep;
        rep.name = "busy-period-slope";
        rep.inputs = {{"rho", r}, {"periods", double(w.size())}, {"expected", expect}};
        rep.bound_value = 0.05; // relative error tolerance
        rep.set_observed(std::abs(slope - expect) / expect);
        if (!*rep.satisfied) ok = false;
        reports.push_back(std::move(rep));
    }
    write_reports_csv(fs::path(out_dir) / "busy_reports.csv", reports);
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? EXIT_OK : EXIT_VIOLATION;
}

int verify_psjf(int n_jobs, std::uint64_t seed, const std::string& out_dir) {
    SizeDistribution dist = SizeDistribution::exponential(1.0);
    TaskSplit split = TaskSplit::parse("single", 0.0, std::nullopt);
    double lambda = 0.8;
    std::vector<double> xs = {0.5, 1.0, 2.0};
    Instance inst = sample_instance(dist, split, lambda, n_jobs, 1, seed);
    TraceConfig cfg;
    cfg.record_events = false;
    cfg.validate = false;
    cfg.orig_size_grid = xs;
    cfg.accum_start_time = 0.0;
    Trace tr = run(inst, PolicySpec::parse("psjf1n"), cfg);
    std::vector<BoundReport> reports;
    bool ok = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double analytic = psjf_workload_form(dist, lambda, xs[i]);
        double time_avg = tr.time_integral_w_leq[i] / tr.accum_duration;
        double pasta = tr.arrival_sampled_w_leq[i] / tr.n_sampled_arrivals;
        BoundReport a;
        a.name = "psjf-time-average";
        a.inputs = {{"x", xs[i]}, {"analytic", analytic}, {"simulated", time_avg}};
        a.bound_value = 0.05;
        a.set_observed(std::abs(time_avg - analytic) / analytic);
        if (!*a.satisfied) ok = false;
        reports.push_back(std::move(a));
        BoundReport p;
        p.name = "psjf-pasta";
        p.inputs = {{"x", xs[i]}, {"time_avg", time_avg}, {"arrival_avg", pasta}};
        p.bound_value = 0.02;
        p.set_observed(std::abs(pasta - time_avg) / time_avg);
        if (!*p.satisfied) ok = false;
        reports.push_back(std::move(p));
    }
    write_reports_csv(fs::path(out_dir) / "psjf_reports.csv", reports);
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? EXIT_OK : EXIT_VIOLATION;
}

int verify_cr_sweep(int max_jobs, int max_size, int max_arrival, int max_machines,
                    const std::string& out_dir);

int verify_heavy_traffic(int reps, int jobs, std::uint64_t seed,
                         const std::string& out_dir) {
    SizeDistribution dist = SizeDistribution::bounded_uniform(1.0, 2.0);
    TaskSplit split = TaskSplit::parse("geom:q=0.5", 0.3, 1.0);
    std::vector<double> rhos = {0.8, 0.9, 0.95, 0.99};
    auto curve = heavy_traffic_ratio_curve(dist, split, 2, rhos, reps, jobs, seed);
    auto f = open_out(fs::path(out_dir) / "heavy_traffic_ratio.csv");
    f << "rho,ratio,ci_lo,ci_hi,mean_flow_msrpt,mean_flow_srpt1n,gap\n";
    bool ok = true;
    for (const HeavyTrafficPoint& pt : curve) {
        f << num(pt.rho) << ',' << num(pt.ratio) << ',' << num(pt.ratio_ci_lo) << ','
          << num(pt.ratio_ci_hi) << ',' << num(pt.mean_flow_msrpt) << ','
          << num(pt.mean_flow_srpt1n) << ',' << num(pt.gap) << "\n";
        if (pt.ratio < 1.0 - (pt.ratio_ci_hi - pt.ratio_ci_lo)) ok = false; // lower bound
    }
    for (std::size_t i = 1; i < curve.size(); ++i) {
        bool overlap = curve[i].ratio_ci_lo <= curve[i - 1].ratio_ci_hi;
        if (curve[i].ratio > curve[i - 1].ratio && !overlap) ok = false;
    }
    if (!curve.empty() && curve.back().ratio >= curve.front().ratio) ok = false;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? EXIT_OK : EXIT_VIOLATION;
}

int cmd_verify(const std::string& suite, int instances, int jobs, int reps,
               std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (suite == "lemma-workload")
        return verify_lemma_workload(instances, jobs, seed, out_dir, false);
    if (suite == "charging")
        return verify_lemma_workload(instances, jobs, seed, out_dir, true);
    if (suite == "busy") return verify_busy(jobs, seed, out_dir);
    if (suite == "psjf") return verify_psjf(jobs, seed, out_dir);
    if (suite == "cr-sweep") return verify_cr_sweep(2, 3, 2, 2, out_dir);
    if (suite == "heavy-traffic") return verify_heavy_traffic(reps, jobs, seed, out_dir);
    throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

// ---------------------------------------------------------------- bounds

int cmd_bounds(const std::string& formula, const std::string& params_str) {
    std::map<std::string, std::string> kv;
    for (const std::string& item : parse_string_list(params_str)) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bounds: expected k=v, got '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    auto need = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end())
            throw std::invalid_argument("bounds: missing parameter '" + k + "'");
        return it->second;
    };
    auto needd = [&](const std::string& k) { return std::stod(need(k)); };

    double value;
    if (formula == "cr-upper") {
        value = cr_upper_bound(needd("alpha"), needd("beta"));
    } else if (formula == "busy-period-mean") {
        value = busy_period_mean(needd("w"), needd("rho"));
    } else if (formula == "mm1-lower") {
        value = mm1_srpt_bounds(needd("mu"), needd("rho")).first;
    } else if (formula == "mm1-upper") {
        value = mm1_srpt_bounds(needd("mu"), needd("rho")).second;
    } else if (formula == "exp-max") {
        value = exp_max_expectation(std::stoi(need("n")), needd("mu"));
    } else if (formula == "srpt-growth") {
        value = srpt_growth(SizeDistribution::parse(need("dist")), needd("rho"));
    } else if (formula == "psjf-workload") {
        value = psjf_workload_form(SizeDistribution::parse(need("dist")),
                                   needd("lambda"), needd("x"));
    } else {
        throw std::invalid_argument("unknown formula '" + formula + "'");
    }
    std::cout << num(value) << "\n";
    return EXIT_OK;
}

// ---------------------------------------------------------------- plot

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("plot: missing column '" + name + "'");
    }
};

CsvTable read_csv(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV: " + p.string());
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (line.empty()) continue;
        if (first) {
            t.header = fields;
            first = false;
        } else {
            t.rows.push_back(fields);
        }
    }
    return t;
}

struct PlotPoint { double x, y, lo, hi; };

void write_plot_file(const fs::path& p, const std::vector<PlotPoint>& pts) {
    auto f = open_out(p);
    f << "x,y,ci_lo,ci_hi\n";
    for (const PlotPoint& pt : pts)
        f << num(pt.x) << ',' << num(pt.y) << ',' << num(pt.lo) << ',' << num(pt.hi) << "\n";
}

void write_svg_chart(const fs::path& p, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     std::vector<PlotPoint> pts, bool logx, bool logy) {
    const int W = 640, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
    auto f = open_out(p);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
    if (!pts.empty()) {
        std::sort(pts.begin(), pts.end(),
                  [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
        auto tx = [&](double v) { return logx ? std::log10(std::max(v, 1e-300)) : v; };
        auto ty = [&](double v) { return logy ? std::log10(std::max(v, 1e-300)) : v; };
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const PlotPoint& pt : pts) {
            x0 = std::min(x0, tx(pt.x)); x1 = std::max(x1, tx(pt.x));
            y0 = std::min(y0, ty(std::min(pt.lo, pt.y)));
            y1 = std::max(y1, ty(std::max(pt.hi, pt.y)));
        }
        if (x1 <= x0) x1 = x0 + 1;
        if (y1 <= y0) y1 = y0 + 1;
        auto px = [&](double v) { return ML + (tx(v) - x0) / (x1 - x0) * (W - ML - MR); };
        auto py = [&](double v) { return H - MB - (ty(v) - y0) / (y1 - y0) * (H - MT - MB); };
        // axes
        f << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
          << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
        f << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
          << H - MB << "\" stroke=\"black\"/>\n";
        // CI whiskers then the line
        for (const PlotPoint& pt : pts)
            f << "<line x1=\"" << px(pt.x) << "\" y1=\"" << py(pt.lo) << "\" x2=\""
              << px(pt.x) << "\" y2=\"" << py(pt.hi)
              << "\" stroke=\"steelblue\" stroke-width=\"1\"/>\n";
        f << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" points=\"";
        for (const PlotPoint& pt : pts) f << px(pt.x) << ',' << py(pt.y) << ' ';
        f << "\"/>\n";
        for (const PlotPoint& pt : pts)
            f << "<circle cx=\"" << px(pt.x) << "\" cy=\"" << py(pt.y)
              << "\" r=\"3\" fill=\"crimson\"/>\n";
        // end-of-range tick labels
        f << "<text x=\"" << ML << "\" y=\"" << H - MB + 18
          << "\" font-size=\"11\">" << num(pts.front().x) << "</text>\n";
        f << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 18
          << "\" text-anchor=\"end\" font-size=\"11\">" << num(pts.back().x) << "</text>\n";
        f << "<text x=\"" << ML - 6 << "\" y=\"" << H - MB
          << "\" text-anchor=\"end\" font-size=\"11\">"
          << num(logy ? std::pow(10, y0) : y0) << "</text>\n";
        f << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 4
          << "\" text-anchor=\"end\" font-size=\"11\">"
          << num(logy ? std::pow(10, y1) : y1) << "</text>\n";
    }
    f << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    f << "<text x=\"16\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << H / 2 << ")\">" << ylabel << "</text>\n";
    f << "</svg>\n";
}

int cmd_plot(const std::string& summary_path, const std::string& ratio_path,
             const std::string& out_dir) {
    fs::create_directories(out_dir);
    CsvTable summary = read_csv(summary_path);
    if (summary.rows.empty())
        std::cerr << "warning: empty summary, emitting empty plot files\n";
    // validate schema up front so errors name the missing column
    int s_pol = summary.col("policy"), s_rho = summary.col("rho");
    int s_mf = summary.col("mean_flow"), s_lo = summary.col("ci_lo"),
        s_hi = summary.col("ci_hi");

    std::map<std::string, std::vector<PlotPoint>> per_policy;
    for (const auto& row : summary.rows) {
        double r = std::stod(row[s_rho]);
        per_policy[row[s_pol]].push_back({1.0 / (1.0 - r), std::stod(row[s_mf]),
                                          std::stod(row[s_lo]), std::stod(row[s_hi])});
    }
    for (const auto& [pol, pts] : per_policy) {
        write_plot_file(fs::path(out_dir) / ("plot_meanflow_" + pol + ".csv"), pts);
        write_svg_chart(fs::path(out_dir) / ("plot_meanflow_" + pol + ".svg"),
                        "mean flow vs 1/(1-rho): " + pol, "1/(1-rho)", "mean flow",
                        pts, true, true);
    }
    if (per_policy.empty()) {
        write_plot_file(fs::path(out_dir) / "plot_meanflow.csv", {});
        write_svg_chart(fs::path(out_dir) / "plot_meanflow.svg",
                        "mean flow vs 1/(1-rho)", "1/(1-rho)", "mean flow", {}, true, true);
    }

    if (!ratio_path.empty() && fs::exists(ratio_path)) {
        CsvTable ratio = read_csv(ratio_path);
        int r_rho = ratio.col("rho"), r_ratio = ratio.col("ratio"),
            r_lo = ratio.col("ci_lo"), r_hi = ratio.col("ci_hi"),
            r_gap = ratio.col("gap");
        std::vector<PlotPoint> rp, gp;
        for (const auto& row : ratio.rows) {
            double r = std::stod(row[r_rho]);
            rp.push_back({r, std::stod(row[r_ratio]), std::stod(row[r_lo]),
                          std::stod(row[r_hi])});
            double g = std::stod(row[r_gap]);
            gp.push_back({std::log(1.0 / (1.0 - r)), g, g, g});
        }
        write_plot_file(fs::path(out_dir) / "plot_ratio_vs_rho.csv", rp);
        write_svg_chart(fs::path(out_dir) / "plot_ratio_vs_rho.svg",
                        "flow ratio m-srpt / srpt1n", "rho", "ratio", rp, false, false);
        write_plot_file(fs::path(out_dir) / "plot_gap_vs_log.csv", gp);
        write_svg_chart(fs::path(out_dir) / "plot_gap_vs_log.svg",
                        "additive gap vs ln(1/(1-rho))", "ln(1/(1-rho))", "gap", gp,
                        false, false);
    }
    return EXIT_OK;
}

// exhaustive tiny-instance competitive-ratio sweep (shared with tests via the
// library; this CLI wrapper uses small default caps to stay interactive)
int verify_cr_sweep(int max_jobs, int max_size, int max_arrival, int max_machines,
                    const std::string& out_dir) {
    double worst = 0.0;
    long long n_checked = 0;
    bool ok = true;
    BoundReport worst_report;
    // all multisets of job shapes; a shape = (arrival, task sizes, np pattern)
    std::vector<Job> shapes;
    {
        std::vector<std::vector<int>> partitions;
        for (int a = 1; a <= max_size; ++a) {
            partitions.push_back({a});
            for (int b = a; a + b <= max_size; ++b) {
                partitions.push_back({a, b});
                for (int c = b; a + b + c <= max_size; ++c)
                    partitions.push_back({a, b, c});
            }
        }
        int id = 0;
        for (int arr = 0; arr <= max_arrival; ++arr)
            for (const auto& part : partitions)
                for (int mask = 0; mask < (1 << part.size()); ++mask) {
                    std::vector<Task> ts;
                    for (std::size_t i = 0; i < part.size(); ++i)
                        ts.push_back({int(i), double(part[i]), ((mask >> i) & 1) == 0,
                                      double(part[i])});
                    shapes.push_back(make_job(id++, double(arr), std::move(ts)));
                }
    }
    std::vector<int> pick;
    auto check = [&](const std::vector<int>& sel, int N) {
        Instance inst;
        inst.machines = N;
        inst.parallel_tasks = false;
        int id = 0;
        for (int si : sel) {
            Job j = shapes[si];
            j.id = id++;
            inst.jobs.push_back(std::move(j));
        }
        BoundReport r = competitive_ratio_check(inst);
        ++n_checked;
        if (*r.observed_value > worst) {
            worst = *r.observed_value;
            worst_report = r;
        }
        if (!*r.satisfied) ok = false;
    };
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (!pick.empty())
            for (int N = 1; N <= max_machines; ++N) check(pick, N);
        if (static_cast<int>(pick.size()) == max_jobs) return;
        for (std::size_t i = start; i < shapes.size(); ++i) {
            pick.push_back(static_cast<int>(i));
            self(self, i);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    std::vector<BoundReport> reports = {worst_report};
    write_reports_csv(fs::path(out_dir) / "cr_sweep_worst.csv", reports);
    std::cout << (ok ? "PASS" : "FAIL") << " checked=" << n_checked
              << " worst_ratio=" << num(worst) << "\n";
    return ok ? EXIT_OK : EXIT_VIOLATION;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiprocessor multitask scheduling simulator and bound checker"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    std::string config_path;
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--threads", threads, "replication parallelism (currently 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--config", config_path, "JSON config overriding flags");

    // generate
    auto* gen = app.add_subcommand("generate", "sample an M/GI/N instance to JSON");
    std::string g_dist = "exp:mu=1", g_split = "single", g_out = "instance.json";
    double g_lambda = 0.5, g_np = 0.0;
    int g_jobs = 100, g_machines = 1;
    bool g_parallel = false;
    std::optional<double> g_eta;
    double g_eta_raw = -1.0;
    gen->add_option("--dist", g_dist, "size distribution spec");
    gen->add_option("--lambda", g_lambda, "Poisson arrival rate");
    gen->add_option("--jobs", g_jobs, "number of jobs");
    gen->add_option("--machines", g_machines, "machine count N");
    gen->add_option("--split", g_split, "task split spec (single|fixed:k=|geom:q=)");
    gen->add_option("--np-frac", g_np, "non-preemptive task fraction");
    gen->add_option("--eta-cap", g_eta_raw, "cap on non-preemptive task size");
    gen->add_flag("--parallel-tasks", g_parallel, "allow intra-job parallelism");
    gen->add_option("--out", g_out, "output instance path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one policy on an instance");
    std::string s_inst, s_policy = "m-srpt", s_events, s_jobs;
    std::string s_ygrid, s_kgrid;
    sim->add_option("--instance", s_inst, "instance JSON path")->required();
    sim->add_option("--policy", s_policy, "m-srpt|m-chi-srpt:<chi>|srpt1n|psjf1n|fcfs|brute");
    sim->add_option("--events-csv", s_events, "trace CSV output path");
    sim->add_option("--jobs-csv", s_jobs, "per-job CSV output path");
    sim->add_option("--y-grid", s_ygrid, "comma list of y for W_leq columns");
    sim->add_option("--k-grid", s_kgrid, "comma list of k for W_prefix columns");

    // verify
    auto* ver = app.add_subcommand("verify", "run a bound-verification suite");
    std::string v_suite;
    int v_instances = 50, v_jobs = 50, v_reps = 10;
    ver->add_option("--suite", v_suite,
                    "lemma-workload|charging|busy|psjf|cr-sweep|heavy-traffic")
        ->required();
    ver->add_option("--instances", v_instances, "random instances to audit");
    ver->add_option("--jobs", v_jobs, "jobs per instance / per run");
    ver->add_option("--reps", v_reps, "replications (heavy-traffic)");

    // sweep
    auto* swp = app.add_subcommand("sweep", "policy x rho experiment grid");
    SweepConfig sc;
    std::string w_policies = "m-srpt,srpt1n", w_rhos = "0.5";
    swp->add_option("--name", sc.name, "experiment name (output prefix)");
    swp->add_option("--dist", sc.dist, "size distribution spec");
    swp->add_option("--split", sc.split, "task split spec");
    swp->add_option("--np-frac", sc.np_frac, "non-preemptive fraction");
    double w_eta_raw = -1.0;
    swp->add_option("--eta-cap", w_eta_raw, "cap on non-preemptive task size");
    swp->add_option("--machines", sc.machines, "machine count");
    swp->add_flag("--parallel-tasks", sc.parallel_tasks, "allow intra-job parallelism");
    swp->add_option("--policies", w_policies, "comma list of policies");
    swp->add_option("--rhos", w_rhos, "comma list of target loads");
    swp->add_option("--reps", sc.reps, "replications per cell");
    swp->add_option("--jobs", sc.jobs, "jobs per replication");
    swp->add_flag("--real-timings", sc.real_timings,
                  "record wallclock_ms (breaks byte determinism)");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "evaluate one analytic formula");
    std::string b_formula, b_params;
    bnd->add_option("--formula", b_formula,
                    "cr-upper|busy-period-mean|mm1-lower|mm1-upper|exp-max|"
                    "srpt-growth|psjf-workload")
        ->required();
    bnd->add_option("--params", b_params, "comma list k=v");

    // plot
    auto* plt = app.add_subcommand("plot", "emit plot data + SVG from sweep CSVs");
    std::string p_summary, p_ratio;
    plt->add_option("--summary", p_summary, "summary CSV from sweep")->required();
    plt->add_option("--ratio", p_ratio, "ratio CSV from sweep (optional)");

    // let global flags (--seed, --out-dir, ...) appear after the subcommand
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            if (g_eta_raw > 0.0) g_eta = g_eta_raw;
            return cmd_generate(g_dist, g_lambda, g_jobs, g_machines, g_split, g_np,
                                g_eta, seed, g_parallel, g_out);
        }
        if (*sim)
            return cmd_simulate(s_inst, s_policy, s_events, s_jobs,
                                parse_double_list(s_ygrid), parse_double_list(s_kgrid));
        if (*ver) return cmd_verify(v_suite, v_instances, v_jobs, v_reps, seed, out_dir);
        if (*swp) {
            sc.policies = parse_string_list(w_policies);
            sc.rhos = parse_double_list(w_rhos);
            if (w_eta_raw > 0.0) sc.eta_cap = w_eta_raw;
            sc.seed = seed;
            sc.out_dir = out_dir;
            if (!config_path.empty()) sc = load_sweep_config(config_path, sc);
            return run_sweep(sc);
        }
        if (*bnd) return cmd_bounds(b_formula, b_params);
        if (*plt) return cmd_plot(p_summary, p_ratio, out_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_VALIDATION;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_VALIDATION;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_RUNTIME;
    }
    return EXIT_OK;
}
