#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "msched/model.hpp"
#include "msched/policy.hpp"

namespace msched {

enum class EventKind { Arrival, TaskDone, JobDone };

struct TraceEvent {
    double time;
    EventKind kind;
    int job_id;
};

struct SnapshotEntry {
    int job_id;
    double remaining;
    double rate; // current drain rate of this job (sum over its machines)
};

// State at one decision instant; remaining work is affine between snapshots,
// so W_{<=y}(t) can be evaluated exactly at any t from the enclosing snapshot.
struct Snapshot {
    double time;
    std::vector<SnapshotEntry> jobs; // alive jobs only
    std::vector<MachineSlot> slots;
    int n_alive;
};

struct JobRecord {
    int id;
    double arrival;
    double size;
    double completion; // < 0 if never completed (cannot happen on full runs)
    double flow() const { return completion - arrival; }
};

struct BusyPeriod {
    double start;
    double length;
    double initial_work; // total remaining at the instant the period opened
};

struct TraceConfig {
    bool record_events = true;
    bool record_snapshots = false;
    bool validate = true; // audit every assignment against the invariants
    // original-size thresholds for time-average / arrival-sampled W_{<=x}
    std::vector<double> orig_size_grid;
    double accum_start_time = 0.0; // warm-up cutoff for the accumulators
};

struct Trace {
    std::vector<JobRecord> jobs; // in arrival order
    std::vector<TraceEvent> events;
    std::vector<Snapshot> snapshots;
    std::vector<BusyPeriod> busy_periods;
    double end_time = 0.0;
    double total_injected = 0.0;
    bool complete = false;

    // accumulators over [accum_start_time, end_time], keyed by orig_size_grid:
    std::vector<double> orig_size_grid;
    std::vector<double> time_integral_w_leq;   // integral of W_{size<=x} dt
    std::vector<double> arrival_sampled_w_leq; // sum of W_{size<=x} seen by arrivals
    long long n_sampled_arrivals = 0;
    double accum_duration = 0.0;

    double total_flow() const;
    double mean_flow() const;

    // W_{<=y}(t): total remaining of jobs whose remaining lies in (0, y] at
    // time t; requires snapshots. Exact between events (affine decrease).
    double w_leq(double t, double y) const;
    const Snapshot& snapshot_at(double t) const;
};

// Deterministic continuous-time event-driven simulation of one policy.
Trace run(const Instance& inst, const PolicySpec& policy,
          const TraceConfig& config = {});

// Runs two policies independently on the same instance with snapshots
// enabled, so W_{<=y} differences are well-defined at all merged event times.
std::pair<Trace, Trace> coupled_run(const Instance& inst, const PolicySpec& a,
                                    const PolicySpec& b,
                                    TraceConfig config = {});

double total_flow(const Trace& t);
double mean_flow(const Trace& t);

// Live simulation state, exposed read-only to the policy decision functions.
class SimState {
public:
    using OrderedSet = std::set<std::pair<double, int>>; // (key, job id)

    int machines() const { return machines_; }
    double speed() const { return speed_; }
    bool parallel_tasks() const { return parallel_; }
    double now() const { return now_; }

    const OrderedSet& by_remaining() const { return by_remaining_; }
    const OrderedSet& by_arrival() const { return by_arrival_; }
    const OrderedSet& by_size() const { return by_size_; }
    const OrderedSet& chi_pool() const { return chi_pool_; } // (arrival, id)

    const Job& job(int id) const { return jobs_[index_of(id)]; }
    const std::vector<std::optional<std::pair<int, int>>>& pins() const { return pins_; }

    int alive_count() const { return static_cast<int>(by_remaining_.size()); }
    int alive_task_count() const { return alive_tasks_; }

    // shortest-remaining alive task of a job, ties by task id; -1 if none
    int shortest_alive_task(int job_id) const;
    // lowest-index alive task; -1 if none
    int first_alive_task(int job_id) const;

private:
    friend Trace run(const Instance&, const PolicySpec&, const TraceConfig&);
    friend class Engine;

    int index_of(int id) const { return id_to_index_.at(id); }

    std::vector<Job> jobs_;
    std::unordered_map<int, int> id_to_index_;
    std::vector<std::optional<std::pair<int, int>>> pins_; // per machine (job id, task id)
    OrderedSet by_remaining_;
    OrderedSet by_arrival_;
    OrderedSet by_size_;
    OrderedSet chi_pool_;
    bool track_chi_pool_ = false;
    double chi_ = 0.0;
    int machines_ = 1;
    double speed_ = 1.0;
    bool parallel_ = false;
    double now_ = 0.0;
    int alive_tasks_ = 0;
};

} // namespace msched
