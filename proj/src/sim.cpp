#include "msched/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace msched {

namespace {
constexpr double NEGATIVE_WORK_TRAP = -1e-9;
}

double Trace::total_flow() const {
    if (!complete) throw std::runtime_error("trace incomplete: not all jobs finished");
    double s = 0.0;
    for (const JobRecord& r : jobs) s += r.flow();
    return s;
}

double Trace::mean_flow() const {
    return total_flow() / static_cast<double>(jobs.size());
}

double total_flow(const Trace& t) { return t.total_flow(); }
double mean_flow(const Trace& t) { return t.mean_flow(); }

const Snapshot& Trace::snapshot_at(double t) const {
    if (snapshots.empty())
        throw std::runtime_error("trace has no snapshots; enable record_snapshots");
    auto it = std::upper_bound(snapshots.begin(), snapshots.end(), t,
                               [](double v, const Snapshot& s) { return v < s.time; });
    if (it == snapshots.begin())
        throw std::runtime_error("time precedes first snapshot");
    return *std::prev(it);
}

double Trace::w_leq(double t, double y) const {
    const Snapshot& s = snapshot_at(t);
    double dt = t - s.time;
    double sum = 0.0;
    for (const SnapshotEntry& e : s.jobs) {
        double w = e.remaining - e.rate * dt;
        if (w > EVENT_MERGE_EPS && w <= y) sum += w;
    }
    return sum;
}

int SimState::shortest_alive_task(int job_id) const {
    const Job& j = jobs_[index_of(job_id)];
    int best = -1;
    for (const Task& t : j.tasks)
        if (!t.done() && (best < 0 || t.remaining < j.tasks[best].remaining))
            best = t.id;
    return best;
}

int SimState::first_alive_task(int job_id) const {
    const Job& j = jobs_[index_of(job_id)];
    for (const Task& t : j.tasks)
        if (!t.done()) return t.id;
    return -1;
}

class Engine {
public:
    Engine(const Instance& inst, const PolicySpec& policy, const TraceConfig& cfg)
        : policy_(policy), cfg_(cfg) {
        validate_instance(inst);
        if (policy.kind == PolicyKind::BruteOpt)
            throw std::invalid_argument("brute oracle cannot drive the event engine");
        st_.jobs_ = inst.jobs;
        std::stable_sort(st_.jobs_.begin(), st_.jobs_.end(), [](const Job& a, const Job& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.id < b.id;
        });
        for (std::size_t i = 0; i < st_.jobs_.size(); ++i) {
            Job& j = st_.jobs_[i];
            j.remaining = 0.0;
            for (Task& t : j.tasks) {
                t.remaining = t.size;
                j.remaining += t.size;
            }
            j.completion = -1.0;
            st_.id_to_index_[j.id] = static_cast<int>(i);
        }
        if (policy.single_fast()) {
            st_.machines_ = 1;
            st_.speed_ = static_cast<double>(inst.machines);
        } else {
            st_.machines_ = inst.machines;
            st_.speed_ = 1.0;
        }
        st_.parallel_ = inst.parallel_tasks;
        st_.pins_.assign(st_.machines_, std::nullopt);
        if (policy.kind == PolicyKind::MChiSrpt) {
            st_.track_chi_pool_ = true;
            st_.chi_ = policy.chi;
        }
        tr_.orig_size_grid = cfg_.orig_size_grid;
        tr_.time_integral_w_leq.assign(cfg_.orig_size_grid.size(), 0.0);
        tr_.arrival_sampled_w_leq.assign(cfg_.orig_size_grid.size(), 0.0);
        w_sum_.assign(cfg_.orig_size_grid.size(), 0.0);
        for (const Job& j : st_.jobs_) tr_.total_injected += j.total_size;
    }

    Trace run() {
        asg_.slots.assign(st_.machines_, MachineSlot{});
        asg_.rate = st_.speed_;
        step_arrivals_and_completions(/*served=*/{});
        decide_and_record();
        int stall = 0;
        double last_now = -1.0;
        while (true) {
            if (st_.now_ == last_now) {
                if (++stall > 10000) dump_stall();
            } else {
                stall = 0;
                last_now = st_.now_;
            }
            double dt_arr = std::numeric_limits<double>::infinity();
            if (next_arrival_ < st_.jobs_.size())
                dt_arr = st_.jobs_[next_arrival_].arrival - st_.now_;
            double dt_done = std::numeric_limits<double>::infinity();
            bool serving = false;
            for (const MachineSlot& s : asg_.slots) {
                if (s.idle()) continue;
                serving = true;
                const Task& t = task_ref(s.job, s.task);
                dt_done = std::min(dt_done, t.remaining / st_.speed_);
            }
            if (!serving) {
                if (next_arrival_ >= st_.jobs_.size()) {
                    if (st_.alive_count() > 0)
                        throw std::logic_error("engine: alive jobs but nothing scheduled");
                    break;
                }
                advance(dt_arr, /*serving=*/false);
            } else {
                advance(std::max(0.0, std::min(dt_arr, dt_done)), /*serving=*/true);
            }
            decide_and_record();
        }
        close_busy_period();
        tr_.end_time = st_.now_;
        tr_.accum_duration = std::max(0.0, st_.now_ - cfg_.accum_start_time);
        for (const Job& j : st_.jobs_)
            tr_.jobs.push_back({j.id, j.arrival, j.total_size, j.completion});
        tr_.complete = std::all_of(st_.jobs_.begin(), st_.jobs_.end(),
                                   [](const Job& j) { return j.completed(); });
        return std::move(tr_);
    }

private:
    Task& task_ref(int job_id, int task_id) {
        return st_.jobs_[st_.index_of(job_id)].tasks[task_id];
    }

    void accumulate_interval(double dt) {
        if (dt <= 0.0) return;
        double t0 = st_.now_;
        // busy-period bookkeeping (assignment constant over the interval)
        int busy = 0;
        for (const MachineSlot& s : asg_.slots)
            if (!s.idle()) ++busy;
        bool all_busy = (busy == st_.machines_);
        if (all_busy && !in_busy_period_) {
            in_busy_period_ = true;
            busy_start_ = t0;
            busy_initial_work_ = w_total_;
        } else if (!all_busy && in_busy_period_) {
            in_busy_period_ = false;
            tr_.busy_periods.push_back({busy_start_, t0 - busy_start_, busy_initial_work_});
        }
        // exact integral of W_{size<=x} over the overlap with the accumulation window
        if (!w_sum_.empty()) {
            double a = std::max(t0, cfg_.accum_start_time);
            double b = t0 + dt;
            if (b > a) {
                double len = b - a;
                for (std::size_t i = 0; i < w_sum_.size(); ++i) {
                    int ci = 0;
                    for (const MachineSlot& s : asg_.slots)
                        if (!s.idle() && st_.job(s.job).total_size <= tr_.orig_size_grid[i])
                            ++ci;
                    double w_at_a = w_sum_[i] - ci * st_.speed_ * (a - t0);
                    tr_.time_integral_w_leq[i] += len * w_at_a - ci * st_.speed_ * len * len / 2.0;
                }
            }
        }
    }

    void adjust_sums(const Job& j, double delta) {
        w_total_ += delta;
        for (std::size_t i = 0; i < w_sum_.size(); ++i)
            if (j.total_size <= tr_.orig_size_grid[i]) w_sum_[i] += delta;
    }

    void advance(double dt, bool serving) {
        accumulate_interval(dt);
        std::vector<int> served; // distinct job ids with a machine
        if (serving && dt >= 0.0) {
            for (const MachineSlot& s : asg_.slots) {
                if (s.idle()) continue;
                if (std::find(served.begin(), served.end(), s.job) == served.end())
                    served.push_back(s.job);
            }
            for (int id : served) {
                const Job& j = st_.jobs_[st_.index_of(id)];
                st_.by_remaining_.erase({j.remaining, id});
                if (st_.track_chi_pool_) st_.chi_pool_.erase({j.arrival, id});
            }
            if (dt > 0.0) {
                for (int m = 0; m < st_.machines_; ++m) {
                    const MachineSlot& s = asg_.slots[m];
                    if (s.idle()) continue;
                    Task& t = task_ref(s.job, s.task);
                    t.remaining -= st_.speed_ * dt;
                    if (t.remaining < NEGATIVE_WORK_TRAP)
                        throw std::logic_error("engine: task remaining went negative");
                    // a non-preemptive task that has received service is pinned
                    if (!policy_.single_fast() && !t.preemptive && !t.done())
                        st_.pins_[m] = std::make_pair(s.job, s.task);
                }
            }
        }
        // settle job totals and the W accumulators before arrivals are
        // processed, so arriving jobs sample the current workload (PASTA)
        for (int id : served) {
            Job& j = st_.jobs_[st_.index_of(id)];
            double old_rem = j.remaining;
            double new_rem = 0.0;
            for (const Task& t : j.tasks) new_rem += t.remaining;
            j.remaining = new_rem;
            adjust_sums(j, new_rem - old_rem);
        }
        st_.now_ += dt;
        step_arrivals_and_completions(served);
    }

    void step_arrivals_and_completions(const std::vector<int>& served) {
        // arrivals first at equal timestamps: they only add work
        while (next_arrival_ < st_.jobs_.size() &&
               st_.jobs_[next_arrival_].arrival <= st_.now_ + EVENT_MERGE_EPS) {
            Job& j = st_.jobs_[next_arrival_];
            if (!w_sum_.empty() && j.arrival >= cfg_.accum_start_time) {
                for (std::size_t i = 0; i < w_sum_.size(); ++i)
                    tr_.arrival_sampled_w_leq[i] += w_sum_[i];
                ++tr_.n_sampled_arrivals;
            }
            st_.by_remaining_.insert({j.remaining, j.id});
            st_.by_arrival_.insert({j.arrival, j.id});
            st_.by_size_.insert({j.total_size, j.id});
            if (st_.track_chi_pool_ && j.remaining <= st_.chi_)
                st_.chi_pool_.insert({j.arrival, j.id});
            for (const Task& t : j.tasks)
                if (!t.done()) ++st_.alive_tasks_;
            adjust_sums(j, j.remaining);
            if (cfg_.record_events) tr_.events.push_back({st_.now_, EventKind::Arrival, j.id});
            ++next_arrival_;
        }
        // task completions happen only on machines that just served them
        for (const MachineSlot& s : asg_.slots) {
            if (s.idle()) continue;
            Task& t = task_ref(s.job, s.task);
            // a retired task never reappears in a slot, so done() here means
            // it finished just now (possibly landing on exactly 0.0)
            if (t.done()) retire_task(s.job, t);
        }
        // then settle each served job (currently out of by_remaining)
        for (int id : served) {
            Job& j = st_.jobs_[st_.index_of(id)];
            double old_rem = j.remaining;
            double new_rem = 0.0;
            for (const Task& t : j.tasks) new_rem += t.remaining;
            j.remaining = new_rem;
            adjust_sums(j, new_rem - old_rem);
            if (new_rem <= COMPLETION_EPS * j.total_size) {
                // float residue may leave some task fractionally alive
                for (Task& t : j.tasks)
                    if (t.remaining != 0.0) retire_task(id, t);
                adjust_sums(j, -new_rem);
                j.remaining = 0.0;
                j.completion = st_.now_;
                st_.by_arrival_.erase({j.arrival, id});
                st_.by_size_.erase({j.total_size, id});
                if (cfg_.record_events)
                    tr_.events.push_back({st_.now_, EventKind::JobDone, id});
            } else {
                st_.by_remaining_.insert({j.remaining, id});
                if (st_.track_chi_pool_ && j.remaining <= st_.chi_)
                    st_.chi_pool_.insert({j.arrival, id});
            }
        }
    }

    void retire_task(int job_id, Task& t) {
        t.remaining = 0.0;
        --st_.alive_tasks_;
        for (auto& pin : st_.pins_)
            if (pin && pin->first == job_id && pin->second == t.id) pin.reset();
        if (cfg_.record_events) tr_.events.push_back({st_.now_, EventKind::TaskDone, job_id});
    }

    void decide_and_record() {
        asg_ = decide(st_, policy_);
        if (cfg_.validate) validate_assignment(st_, asg_);
        if (cfg_.record_snapshots) {
            Snapshot snap;
            snap.time = st_.now_;
            snap.n_alive = st_.alive_count();
            snap.slots = asg_.slots;
            snap.jobs.reserve(st_.by_remaining_.size());
            for (const auto& [rem, id] : st_.by_remaining_) {
                double rate = 0.0;
                for (const MachineSlot& s : asg_.slots)
                    if (!s.idle() && s.job == id) rate += st_.speed_;
                snap.jobs.push_back({id, rem, rate});
            }
            tr_.snapshots.push_back(std::move(snap));
        }
    }

    [[noreturn]] void dump_stall() const {
        std::string msg = "engine stalled at t=" + std::to_string(st_.now_) + ";";
        for (int m = 0; m < st_.machines_; ++m) {
            const MachineSlot& s = asg_.slots[m];
            msg += " slot" + std::to_string(m) + "=";
            if (s.idle()) {
                msg += "idle";
            } else {
                const Job& j = st_.jobs_[st_.id_to_index_.at(s.job)];
                msg += "(j" + std::to_string(s.job) + ",t" + std::to_string(s.task) +
                       ",rem=" + std::to_string(j.tasks[s.task].remaining) +
                       ",jrem=" + std::to_string(j.remaining) + ")";
            }
            if (st_.pins_[m])
                msg += " pin=(j" + std::to_string(st_.pins_[m]->first) + ",t" +
                       std::to_string(st_.pins_[m]->second) + ")";
        }
        throw std::logic_error(msg);
    }

    void close_busy_period() {
        if (in_busy_period_) {
            in_busy_period_ = false;
            tr_.busy_periods.push_back({busy_start_, st_.now_ - busy_start_, busy_initial_work_});
        }
    }

    SimState st_;
    PolicySpec policy_;
    TraceConfig cfg_;
    Assignment asg_;
    Trace tr_;
    std::size_t next_arrival_ = 0;
    std::vector<double> w_sum_; // current W_{size<=x} per grid point
    double w_total_ = 0.0;
    bool in_busy_period_ = false;
    double busy_start_ = 0.0;
    double busy_initial_work_ = 0.0;
};

Trace run(const Instance& inst, const PolicySpec& policy, const TraceConfig& config) {
    Engine eng(inst, policy, config);
    return eng.run();
}

std::pair<Trace, Trace> coupled_run(const Instance& inst, const PolicySpec& a,
                                    const PolicySpec& b, TraceConfig config) {
    config.record_snapshots = true;
    return {run(inst, a, config), run(inst, b, config)};
}

} // namespace msched
