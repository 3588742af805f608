#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msched/dist.hpp"
#include "msched/model.hpp"
#include "msched/sim.hpp"
#include "msched/workload.hpp"

namespace msched {

struct BoundReport {
    std::string name;
    std::map<std::string, double> inputs;
    double bound_value = 0.0;
    std::optional<double> observed_value;
    std::optional<bool> satisfied;
    std::optional<double> margin; // bound - observed

    void set_observed(double v) {
        observed_value = v;
        satisfied = v <= bound_value + 1e-9 * std::abs(bound_value);
        margin = bound_value - v;
    }
};

// Theorem-level competitive-ratio bound: 4 log2(alpha) + 2 beta + 8
double cr_upper_bound(double alpha, double beta);

// Workload-difference audits between a coupled (m-srpt, srpt1n) trace pair:
// W^A_{<=y}(t) - W^B_{<=y}(t) <= N (2y + eta) at every event time and y in
// y_grid, plus the dyadic class variant at y = 2^k with bound N(2^{k+1}+eta)
// (and the looser +N constant; reports record which of the two holds).
std::vector<BoundReport> audit_workload_lemma(const Trace& msrpt, const Trace& srpt1n,
                                              int machines, double eta,
                                              const std::vector<double>& y_grid);

// Charging-argument audit on an m-srpt trace (needs snapshots): per job x,
//   (a) waste  <= (N-1) p_x   (idle/larger-remaining time while x in service)
//   (b) non-pm <= (N^2+N) eta + N p_x  (time on jobs that out-sized x at r_x,
//       while x is not in service)
std::vector<BoundReport> audit_charging_bounds(const Trace& trace, const Instance& inst);

double busy_period_mean(double w, double rho);

const std::vector<BusyPeriod>& measure_busy_periods(const Trace& trace);

std::pair<double, double> mm1_srpt_bounds(double mu, double rho);

double srpt_growth(const SizeDistribution& dist, double rho);

// min over s of (log(mean_total_tasks) + log mgf(s)) / s; mgf returns +inf or
// NaN outside its domain.
double eta_mgf_bound(double mean_total_tasks, const std::function<double(double)>& mgf);

double exp_max_expectation(int n, double mu);

double psjf_workload_form(const SizeDistribution& dist, double lambda, double x);

struct HeavyTrafficPoint {
    double rho;
    double mean_flow_msrpt;
    double mean_flow_srpt1n;
    double ratio;
    double ratio_ci_lo;
    double ratio_ci_hi;
    double gap; // mean_flow_msrpt - mean_flow_srpt1n
};

std::vector<HeavyTrafficPoint> heavy_traffic_ratio_curve(
    const SizeDistribution& dist, const TaskSplit& split, int machines,
    const std::vector<double>& rho_grid, int reps, int horizon_jobs,
    std::uint64_t seed);

// total_flow(m-srpt) / brute-force optimum vs cr_upper_bound of the instance
BoundReport competitive_ratio_check(const Instance& inst);

// small stats helpers shared by the harness and tests
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys);
std::pair<double, double> bootstrap_percentile_ci(const std::vector<double>& values,
                                                  int resamples = 1000,
                                                  std::uint64_t seed = 1234);

} // namespace msched
