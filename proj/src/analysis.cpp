#include "msched/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "msched/policy.hpp"
#include "msched/brute.hpp"
#include "msched/rng.hpp"

namespace msched {

double cr_upper_bound(double alpha, double beta) {
    if (alpha < 1.0) throw std::domain_error("cr_upper_bound: alpha must be >= 1");
    if (beta < 0.0) throw std::domain_error("cr_upper_bound: beta must be >= 0");
    return 4.0 * std::log2(alpha) + 2.0 * beta + 8.0;
}

namespace {

void check_same_instance(const Trace& a, const Trace& b) {
    if (a.jobs.size() != b.jobs.size())
        throw std::invalid_argument("audit: traces come from different instances");
    for (std::size_t i = 0; i < a.jobs.size(); ++i) {
        const JobRecord& x = a.jobs[i];
        const JobRecord& y = b.jobs[i];
        if (x.id != y.id || x.arrival != y.arrival || x.size != y.size)
            throw std::invalid_argument("audit: traces come from different instances");
    }
}

// times where some served job's remaining crosses level y, plus all snapshot
// times; a hair before each point is added since W_{<=y} jumps up at crossings
std::vector<double> evaluation_times(const Trace& a, const Trace& b,
                                     const std::vector<double>& levels) {
    std::set<double> pts;
    for (const Trace* tr : {&a, &b}) {
        for (std::size_t i = 0; i < tr->snapshots.size(); ++i) {
            const Snapshot& s = tr->snapshots[i];
            double t1 = (i + 1 < tr->snapshots.size()) ? tr->snapshots[i + 1].time
                                                       : tr->end_time;
            pts.insert(s.time);
            for (const SnapshotEntry& e : s.jobs) {
                if (e.rate <= 0.0) continue;
                double end_rem = e.remaining - e.rate * (t1 - s.time);
                for (double y : levels)
                    if (e.remaining > y && end_rem < y)
                        pts.insert(s.time + (e.remaining - y) / e.rate);
            }
        }
        pts.insert(tr->end_time);
    }
    double t0 = pts.empty() ? 0.0 : *pts.begin();
    std::vector<double> out;
    for (double t : pts) {
        double before = t - 1e-9 * std::max(1.0, std::abs(t));
        if (before > t0) out.push_back(before);
        out.push_back(t);
    }
    return out;
}

} // namespace

std::vector<BoundReport> audit_workload_lemma(const Trace& msrpt, const Trace& srpt1n,
                                              int machines, double eta,
                                              const std::vector<double>& y_grid) {
    check_same_instance(msrpt, srpt1n);
    double max_size = 0.0, min_size = std::numeric_limits<double>::infinity();
    for (const JobRecord& r : msrpt.jobs) {
        max_size = std::max(max_size, r.size);
        min_size = std::min(min_size, r.size);
    }
    std::vector<int> ks;
    for (int k = class_index(min_size); k <= class_index(max_size); ++k) ks.push_back(k);

    std::vector<double> levels = y_grid;
    for (int k : ks) levels.push_back(std::ldexp(1.0, k));
    std::vector<double> times = evaluation_times(msrpt, srpt1n, levels);

    auto max_diff = [&](double y) {
        double best = -std::numeric_limits<double>::infinity();
        double at = 0.0;
        for (double t : times) {
            double d = msrpt.w_leq(t, y) - srpt1n.w_leq(t, y);
            if (d > best) {
                best = d;
                at = t;
            }
        }
        return std::make_pair(best, at);
    };

    std::vector<BoundReport> reports;
    for (double y : y_grid) {
        auto [d, at] = max_diff(y);
        BoundReport r;
        r.name = "workload-diff";
        r.inputs = {{"y", y}, {"N", double(machines)}, {"eta", eta}, {"witness_t", at}};
        r.bound_value = machines * (2.0 * y + eta);
        r.set_observed(d);
        reports.push_back(std::move(r));
    }
    for (int k : ks) {
        double yk = std::ldexp(1.0, k);
        auto [d, at] = max_diff(yk);
        BoundReport strict;
        strict.name = "class-diff-strict";
        strict.inputs = {{"k", double(k)}, {"N", double(machines)}, {"eta", eta},
                         {"witness_t", at}};
        strict.bound_value = machines * (2.0 * yk + eta);
        strict.set_observed(d);
        reports.push_back(std::move(strict));
        BoundReport loose;
        loose.name = "class-diff-loose";
        loose.inputs = {{"k", double(k)}, {"N", double(machines)}, {"eta", eta},
                        {"witness_t", at}};
        loose.bound_value = machines * (2.0 * yk + eta + 1.0);
        loose.set_observed(d);
        reports.push_back(std::move(loose));
    }
    return reports;
}

std::vector<BoundReport> audit_charging_bounds(const Trace& trace, const Instance& inst) {
    if (trace.snapshots.empty())
        throw std::invalid_argument("charging audit needs snapshots");
    InstanceParams params = instance_params(inst);
    int N = inst.machines;
    double eta = params.eta;

    std::vector<BoundReport> reports;
    for (const JobRecord& rec : trace.jobs) {
        double px = rec.size, rx = rec.arrival, cx = rec.completion;
        // jobs already out-sizing the tagged one at its arrival
        std::set<int> big_at_rx;
        {
            const Snapshot& s0 = trace.snapshot_at(rx);
            double dt = rx - s0.time;
            for (const SnapshotEntry& e : s0.jobs)
                if (e.remaining - e.rate * dt > px) big_at_rx.insert(e.job_id);
        }
        double waste = 0.0, nonpm = 0.0;
        for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
            const Snapshot& s = trace.snapshots[i];
            double t1 = (i + 1 < trace.snapshots.size()) ? trace.snapshots[i + 1].time
                                                         : trace.end_time;
            double a = std::max(s.time, rx), b = std::min(t1, cx);
            if (b <= a) continue;
            double len = b - a;
            bool in_service = false;
            for (const MachineSlot& sl : s.slots)
                if (!sl.idle() && sl.job == rec.id) in_service = true;
            for (const MachineSlot& sl : s.slots) {
                if (sl.idle()) {
                    if (in_service) waste += len;
                    continue;
                }
                if (sl.job == rec.id) continue;
                if (in_service) {
                    // time within [a,b] where this job's remaining stays > px
                    const SnapshotEntry* e = nullptr;
                    for (const SnapshotEntry& se : s.jobs)
                        if (se.job_id == sl.job) e = &se;
                    if (!e) continue;
                    double rem_a = e->remaining - e->rate * (a - s.time);
                    if (rem_a > px)
                        waste += (e->rate > 0.0) ? std::min(len, (rem_a - px) / e->rate)
                                                 : len;
                } else if (big_at_rx.count(sl.job)) {
                    nonpm += len;
                }
            }
        }
        BoundReport w;
        w.name = "charging-waste";
        w.inputs = {{"job", double(rec.id)}, {"p", px}, {"N", double(N)}};
        w.bound_value = (N - 1) * px;
        w.set_observed(waste);
        reports.push_back(std::move(w));
        BoundReport n;
        n.name = "charging-nonpm";
        n.inputs = {{"job", double(rec.id)}, {"p", px}, {"N", double(N)}, {"eta", eta}};
        n.bound_value = double(N) * N * eta + N * eta + N * px;
        n.set_observed(nonpm);
        reports.push_back(std::move(n));
    }
    return reports;
}

double busy_period_mean(double w, double rho) {
    if (rho < 0.0 || rho >= 1.0) throw std::domain_error("busy_period_mean: need rho in [0,1)");
    if (!(w > 0.0)) throw std::domain_error("busy_period_mean: need positive work");
    return w / (1.0 - rho);
}

const std::vector<BusyPeriod>& measure_busy_periods(const Trace& trace) {
    if (!trace.complete) throw std::invalid_argument("measure_busy_periods: incomplete trace");
    return trace.busy_periods;
}

std::pair<double, double> mm1_srpt_bounds(double mu, double rho) {
    if (!(mu > 0.0)) throw std::domain_error("mm1_srpt_bounds: mu must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("mm1_srpt_bounds: rho must be in (0,1)");
    double denom = mu * (1.0 - rho) * std::log(1.0 / (1.0 - rho));
    return {1.0 / (18.0 * std::exp(1.0)) / denom, 7.0 / denom};
}

double srpt_growth(const SizeDistribution& dist, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("srpt_growth: rho must be in (0,1)");
    double g = dist.G_inv(rho);
    if (!(g > 0.0) || !std::isfinite(g))
        throw std::domain_error("srpt_growth: G_inv degenerate for this distribution");
    return 1.0 / ((1.0 - rho) * g);
}

double eta_mgf_bound(double mean_total_tasks, const std::function<double(double)>& mgf) {
    if (!(mean_total_tasks > 0.0))
        throw std::domain_error("eta_mgf_bound: mean task count must be positive");
    auto finite = [&](double s) {
        double m = mgf(s);
        return std::isfinite(m) && m > 0.0;
    };
    double s_lo = 1e-4;
    if (!finite(s_lo)) throw std::domain_error("eta_mgf_bound: empty MGF domain");
    double s_hi = s_lo;
    while (s_hi < 1e8 && finite(2.0 * s_hi)) s_hi *= 2.0;
    double s_max = 2.0 * s_hi; // open edge; grid stays strictly inside

    double log_n = std::log(mean_total_tasks);
    auto objective = [&](double s) {
        if (!finite(s)) return std::numeric_limits<double>::infinity();
        return (log_n + std::log(mgf(s))) / s;
    };

    constexpr int GRID = 64;
    std::vector<double> grid(GRID);
    double ratio = std::pow(s_max / s_lo, 1.0 / GRID);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < GRID; ++i) {
        grid[i] = s_lo * std::pow(ratio, i);
        double v = objective(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (!std::isfinite(best_val)) throw std::domain_error("eta_mgf_bound: empty MGF domain");

    // golden-section refinement around the best grid point
    double a = grid[std::max(0, best - 1)];
    double b = grid[std::min(GRID - 1, best + 1)];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 100 && b - a > 1e-12 * b; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a); f1 = objective(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a); f2 = objective(x2);
        }
    }
    return std::min(best_val, std::min(f1, f2));
}

double exp_max_expectation(int n, double mu) {
    if (n < 1) throw std::domain_error("exp_max_expectation: need n >= 1");
    if (!(mu > 0.0)) throw std::domain_error("exp_max_expectation: need positive rate");
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    return h / mu;
}

double psjf_workload_form(const SizeDistribution& dist, double lambda, double x) {
    if (x < 0.0) throw std::domain_error("psjf_workload_form: x must be nonnegative");
    double rx = rho_of_y(dist, lambda, x);
    if (rx >= 1.0) throw std::domain_error("psjf_workload_form: rho(x) >= 1");
    return lambda * dist.partial_second_moment(x) / (2.0 * (1.0 - rx));
}

std::vector<HeavyTrafficPoint> heavy_traffic_ratio_curve(
    const SizeDistribution& dist, const TaskSplit& split, int machines,
    const std::vector<double>& rho_grid, int reps, int horizon_jobs,
    std::uint64_t seed) {
    if (reps < 10) throw std::invalid_argument("heavy_traffic_ratio_curve: need reps >= 10");
    std::vector<HeavyTrafficPoint> out;
    for (std::size_t ri = 0; ri < rho_grid.size(); ++ri) {
        double rho = rho_grid[ri];
        if (!(rho > 0.0 && rho < 1.0))
            throw std::invalid_argument("heavy_traffic_ratio_curve: rho must be in (0,1)");
        double lambda = rho * machines / dist.mean();
        std::vector<double> mean_a(reps), mean_b(reps), ratios(reps);
        for (int rep = 0; rep < reps; ++rep) {
            std::uint64_t s = seed + 1000003ULL * rep + 104729ULL * ri;
            Instance inst = sample_instance(dist, split, lambda, horizon_jobs, machines, s);
            TraceConfig cfg;
            cfg.record_events = false;
            cfg.validate = false;
            Trace ta = run(inst, PolicySpec::parse("m-srpt"), cfg);
            Trace tb = run(inst, PolicySpec::parse("srpt1n"), cfg);
            std::size_t skip = horizon_jobs / 10; // warm-up discard
            double sa = 0.0, sb = 0.0;
            std::size_t n = 0;
            for (std::size_t i = skip; i < ta.jobs.size(); ++i) {
                sa += ta.jobs[i].flow();
                sb += tb.jobs[i].flow();
                ++n;
            }
            mean_a[rep] = sa / n;
            mean_b[rep] = sb / n;
            ratios[rep] = mean_a[rep] / mean_b[rep];
        }
        HeavyTrafficPoint pt;
        pt.rho = rho;
        pt.mean_flow_msrpt = 0.0;
        pt.mean_flow_srpt1n = 0.0;
        pt.ratio = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            pt.mean_flow_msrpt += mean_a[rep] / reps;
            pt.mean_flow_srpt1n += mean_b[rep] / reps;
            pt.ratio += ratios[rep] / reps;
        }
        auto [lo, hi] = bootstrap_percentile_ci(ratios, 1000, seed ^ 0xabcdefULL);
        pt.ratio_ci_lo = lo;
        pt.ratio_ci_hi = hi;
        pt.gap = pt.mean_flow_msrpt - pt.mean_flow_srpt1n;
        out.push_back(pt);
    }
    return out;
}

BoundReport competitive_ratio_check(const Instance& inst) {
    InstanceParams params = instance_params(inst);
    BruteResult opt = brute_force_optimal(inst);
    TraceConfig cfg;
    cfg.record_events = false;
    Trace tr = run(inst, PolicySpec::parse("m-srpt"), cfg);
    BoundReport r;
    r.name = "competitive-ratio";
    r.inputs = {{"alpha", params.alpha}, {"beta", params.beta},
                {"N", double(inst.machines)}, {"opt", opt.total_flow},
                {"alg", tr.total_flow()}};
    r.bound_value = cr_upper_bound(std::max(1.0, params.alpha), params.beta);
    r.set_observed(tr.total_flow() / opt.total_flow);
    return r;
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("ols_slope: need two same-length samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate x values");
    return sxy / sxx;
}

std::pair<double, double> bootstrap_percentile_ci(const std::vector<double>& values,
                                                  int resamples, std::uint64_t seed) {
    if (values.empty()) throw std::invalid_argument("bootstrap: empty sample");
    std::vector<double> means(resamples);
    for (int b = 0; b < resamples; ++b) {
        RandomStream rs(seed, static_cast<std::uint64_t>(b));
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::size_t idx = static_cast<std::size_t>(rs.uniform(i) * values.size());
            if (idx >= values.size()) idx = values.size() - 1;
            s += values[idx];
        }
        means[b] = s / values.size();
    }
    std::sort(means.begin(), means.end());
    auto pick = [&](double q) {
        int i = static_cast<int>(q * (resamples - 1));
        return means[i];
    };
    return {pick(0.025), pick(0.975)};
}

} // namespace msched
