#include "msched/brute.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace msched {

namespace {

constexpr long long NODE_CAP = 10'000'000;
constexpr double INF = std::numeric_limits<double>::infinity();

struct TaskRef {
    int job;  // index into jobs (arrival order)
    int task; // index within job
    int size; // integer size in quanta
    bool preemptive;
};

struct Key {
    std::uint64_t lo, hi;
    bool operator==(const Key& o) const { return lo == o.lo && hi == o.hi; }
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::uint64_t x = k.lo * 0x9e3779b97f4a7c15ULL ^ k.hi;
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        return static_cast<std::size_t>(x);
    }
};

struct Solver {
    std::vector<int> arrivals;           // per job, in quanta
    std::vector<std::vector<int>> tasks; // tasks[j] -> indices into flat
    std::vector<TaskRef> flat;
    int n_jobs = 0;
    int machines = 1;
    bool parallel = false;
    int last_arrival = 0;
    long long nodes = 0;
    std::unordered_map<Key, double, KeyHash> memo;

    Key make_key(int t, const std::vector<int>& rem) const {
        Key k{0, 0};
        for (std::size_t i = 0; i < rem.size(); ++i) {
            if (i < 8)
                k.lo |= static_cast<std::uint64_t>(rem[i]) << (8 * i);
            else
                k.hi |= static_cast<std::uint64_t>(rem[i]) << (8 * (i - 8));
        }
        k.hi |= static_cast<std::uint64_t>(std::min(t, last_arrival)) << 40;
        return k;
    }

    int alive_cost(int t, const std::vector<int>& rem) const {
        int c = 0;
        for (int j = 0; j < n_jobs; ++j) {
            if (arrivals[j] > t) continue;
            for (int ti : tasks[j])
                if (rem[ti] > 0) { ++c; break; }
        }
        return c;
    }

    bool all_done(const std::vector<int>& rem) const {
        return std::all_of(rem.begin(), rem.end(), [](int r) { return r == 0; });
    }

    // eligible free tasks / forced (pinned) tasks at time t
    void classify(int t, const std::vector<int>& rem, std::vector<int>& forced,
                  std::vector<int>& optional, int& max_jobs_feasible) const {
        forced.clear();
        optional.clear();
        std::vector<char> job_pinned(n_jobs, 0);
        for (std::size_t i = 0; i < flat.size(); ++i) {
            const TaskRef& tr = flat[i];
            if (rem[i] <= 0 || arrivals[tr.job] > t) continue;
            if (!tr.preemptive && rem[i] < tr.size) {
                forced.push_back(static_cast<int>(i));
                job_pinned[tr.job] = 1;
            }
        }
        max_jobs_feasible = 0;
        std::vector<char> job_has(n_jobs, 0);
        for (std::size_t i = 0; i < flat.size(); ++i) {
            const TaskRef& tr = flat[i];
            if (rem[i] <= 0 || arrivals[tr.job] > t) continue;
            if (!job_has[tr.job]) {
                job_has[tr.job] = 1;
                ++max_jobs_feasible;
            }
            bool is_forced = !tr.preemptive && rem[i] < tr.size;
            if (is_forced) continue;
            if (!parallel && job_pinned[tr.job]) continue;
            optional.push_back(static_cast<int>(i));
        }
    }

    // enumerate allocations; calls fn(vector<int> of flat indices served)
    template <typename Fn>
    void allocations(int t, const std::vector<int>& rem, Fn&& fn) {
        std::vector<int> forced, optional;
        int max_jobs;
        classify(t, rem, forced, optional, max_jobs);
        if (static_cast<int>(forced.size()) > machines)
            throw std::logic_error("oracle: more pinned tasks than machines");
        int cap = machines - static_cast<int>(forced.size());
        int feasible = parallel ? static_cast<int>(forced.size() + optional.size())
                                : max_jobs;
        // past the last arrival idling never helps: take only maximal sets
        int min_total = (t >= last_arrival) ? std::min(machines, feasible) : 0;

        std::vector<int> chosen = forced;
        std::vector<char> job_used(n_jobs, 0);
        for (int i : forced) job_used[flat[i].job] = 1;

        auto rec = [&](auto&& self, std::size_t idx, int left) -> void {
            if (idx == optional.size() || left == 0) {
                if (static_cast<int>(chosen.size()) >= min_total) fn(chosen);
                return;
            }
            int ti = optional[idx];
            bool blocked = !parallel && job_used[flat[ti].job];
            if (!blocked) {
                chosen.push_back(ti);
                job_used[flat[ti].job] = 1;
                self(self, idx + 1, left - 1);
                job_used[flat[ti].job] = 0;
                chosen.pop_back();
            }
            self(self, idx + 1, left);
        };
        rec(rec, 0, cap);
    }

    double solve(int t, std::vector<int>& rem) {
        if (all_done(rem)) return 0.0;
        if (++nodes > NODE_CAP)
            throw std::runtime_error("instance too large for oracle");
        Key k = make_key(t, rem);
        auto it = memo.find(k);
        if (it != memo.end()) return it->second;
        double cost = alive_cost(t, rem);
        double best = INF;
        allocations(t, rem, [&](const std::vector<int>& served) {
            for (int i : served) --rem[i];
            best = std::min(best, cost + solve(t + 1, rem));
            for (int i : served) ++rem[i];
        });
        memo[k] = best;
        return best;
    }
};

} // namespace

BruteResult brute_force_optimal(const Instance& inst, double quantum) {
    validate_instance(inst);
    if (!(quantum > 0.0)) throw std::invalid_argument("oracle: quantum must be positive");
    if (inst.jobs.size() > 4)
        throw std::runtime_error("instance too large for oracle");

    Solver sv;
    sv.n_jobs = static_cast<int>(inst.jobs.size());
    sv.machines = inst.machines;
    sv.parallel = inst.parallel_tasks;
    sv.tasks.resize(sv.n_jobs);

    auto to_units = [&](double v, const char* what) {
        double q = v / quantum;
        long long u = std::llround(q);
        if (std::abs(q - u) > 1e-9)
            throw std::runtime_error(std::string("oracle: ") + what +
                                     " is not a multiple of the quantum");
        return u;
    };

    // sort jobs by (arrival, id) so the key layout is canonical
    std::vector<const Job*> jobs;
    for (const Job& j : inst.jobs) jobs.push_back(&j);
    std::stable_sort(jobs.begin(), jobs.end(), [](const Job* a, const Job* b) {
        if (a->arrival != b->arrival) return a->arrival < b->arrival;
        return a->id < b->id;
    });

    std::vector<int> rem;
    for (int j = 0; j < sv.n_jobs; ++j) {
        const Job& job = *jobs[j];
        if (job.tasks.size() > 3)
            throw std::runtime_error("instance too large for oracle");
        long long arr = to_units(job.arrival, "arrival");
        if (arr > 1000) throw std::runtime_error("instance too large for oracle");
        sv.arrivals.push_back(static_cast<int>(arr));
        sv.last_arrival = std::max(sv.last_arrival, static_cast<int>(arr));
        for (const Task& t : job.tasks) {
            long long sz = to_units(t.size, "task size");
            if (sz < 1 || sz > 255)
                throw std::runtime_error("instance too large for oracle");
            sv.tasks[j].push_back(static_cast<int>(sv.flat.size()));
            sv.flat.push_back({j, t.id, static_cast<int>(sz), t.preemptive});
            rem.push_back(static_cast<int>(sz));
        }
    }
    if (sv.flat.size() > 12) throw std::runtime_error("instance too large for oracle");

    double opt = sv.solve(0, rem);

    // replay to reconstruct one optimal schedule
    BruteResult res;
    res.quantum = quantum;
    res.total_flow = opt * quantum;
    int t = 0;
    double value = opt;
    while (!sv.all_done(rem)) {
        double cost = sv.alive_cost(t, rem);
        std::vector<int> pick;
        bool found = false;
        sv.allocations(t, rem, [&](const std::vector<int>& served) {
            if (found) return;
            for (int i : served) --rem[i];
            double tail = sv.all_done(rem) ? 0.0 : sv.solve(t + 1, rem);
            if (cost + tail <= value + 1e-9) {
                pick = served;
                found = true;
            }
            for (int i : served) ++rem[i];
        });
        if (!found) throw std::logic_error("oracle: replay failed");
        std::vector<MachineSlot> slots(inst.machines);
        for (std::size_t m = 0; m < pick.size(); ++m) {
            const TaskRef& tr = sv.flat[pick[m]];
            slots[m] = {jobs[tr.job]->id, tr.task};
            --rem[pick[m]];
        }
        res.schedule.push_back(std::move(slots));
        value -= cost;
        ++t;
        if (t > 100000) throw std::logic_error("oracle: runaway replay");
    }
    return res;
}

} // namespace msched
