#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace msched {

// Relative tolerance for completion detection: a task counts as finished
// when remaining <= COMPLETION_EPS * size.
inline constexpr double COMPLETION_EPS = 1e-12;
// Absolute tolerance for merging coincident event times.
inline constexpr double EVENT_MERGE_EPS = 1e-12;

struct Task {
    int id = 0;             // index within the job
    double size = 0.0;      // units of work, > 0
    bool preemptive = true;
    double remaining = 0.0; // in [0, size]

    bool done() const { return remaining <= COMPLETION_EPS * size; }
};

struct Job {
    int id = 0;
    double arrival = 0.0;
    std::vector<Task> tasks;
    double total_size = 0.0; // sum of task sizes
    double remaining = 0.0;  // sum of task remainings
    double completion = -1.0; // < 0 while unfinished

    bool completed() const { return completion >= 0.0; }
    double flow() const { return completion - arrival; }
};

struct Instance {
    int machines = 1;
    bool parallel_tasks = false;
    std::vector<Job> jobs;
};

struct InstanceParams {
    double alpha = 1.0; // p_max / p_min
    double beta = 0.0;  // eta / p_min
    double eta = 0.0;   // largest non-preemptive task, 0 if all preemptive
    double p_min = 0.0;
    double p_max = 0.0;
};

// Unique k with 2^(k-1) < w <= 2^k.
inline int class_index(double w) {
    if (!(w > 0.0))
        throw std::domain_error("class_index: workload must be positive");
    int k = static_cast<int>(std::ceil(std::log2(w)));
    // guard against log2 rounding near exact powers of two
    while (std::exp2(k - 1) >= w) --k;
    while (std::exp2(k) < w) ++k;
    return k;
}

// Workload split into geometric classes (2^(k-1), 2^k], plus prefix sums.
struct ClassDecomposition {
    std::map<int, double> per_class_work;  // k -> W^(k)
    std::map<int, double> prefix_work;     // k -> W^[k]

    double prefix(int k) const {
        auto it = prefix_work.upper_bound(k);
        if (it == prefix_work.begin()) return 0.0;
        return std::prev(it)->second;
    }
};

ClassDecomposition decompose(const std::vector<std::pair<int, double>>& jobs);

Job make_job(int id, double arrival, std::vector<Task> tasks);

void validate_instance(const Instance& inst);

InstanceParams instance_params(const Instance& inst);

} // namespace msched
