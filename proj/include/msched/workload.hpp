#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "msched/dist.hpp"
#include "msched/model.hpp"

namespace msched {

enum class SplitMode { Single, FixedK, Geometric };

// How a sampled job size is cut into tasks.
struct TaskSplit {
    SplitMode mode = SplitMode::Single;
    int fixed_k = 1;            // FixedK: number of tasks
    double geometric_q = 0.5;   // Geometric: P(n)=q(1-q)^(n-1), mean 1/q
    double nonpreemptive_fraction = 0.0;
    std::optional<double> eta_cap; // max non-preemptive task size

    // "single", "fixed:k=3", "geom:q=0.5"
    static TaskSplit parse(const std::string& spec, double np_frac,
                           std::optional<double> eta_cap);
    std::string spec() const;
};

// Tasks for one job of size `p`, fully determined by (seed, job_index).
std::vector<Task> split_job(double p, const TaskSplit& split,
                            std::uint64_t seed, std::uint64_t job_index);

// M/GI instance: Poisson(lambda) arrivals, i.i.d. sizes, per-job task split.
Instance sample_instance(const SizeDistribution& dist, const TaskSplit& split,
                         double lambda, int n_jobs, int machines,
                         std::uint64_t seed, bool parallel_tasks = false);

// traffic intensity lambda * E[p] / N
double rho(const SizeDistribution& dist, double lambda, int machines);

// load from jobs of size at most y: lambda * int_0^y t f(t) dt
double rho_of_y(const SizeDistribution& dist, double lambda, double y);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

} // namespace msched
