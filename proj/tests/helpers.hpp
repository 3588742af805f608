#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "msched/model.hpp"
#include "msched/rng.hpp"

namespace test_helpers {

// quick instance builder: jobs given as (arrival, [(size, preemptive)...])
inline msched::Instance mk(
    int machines, bool parallel,
    std::vector<std::pair<double, std::vector<std::pair<double, bool>>>> jobs) {
    msched::Instance inst;
    inst.machines = machines;
    inst.parallel_tasks = parallel;
    int id = 0;
    for (auto& [arr, ts] : jobs) {
        std::vector<msched::Task> tasks;
        int tid = 0;
        for (auto& [sz, pre] : ts) tasks.push_back({tid++, sz, pre, sz});
        inst.jobs.push_back(msched::make_job(id++, arr, std::move(tasks)));
    }
    return inst;
}

// random mixed instance with integer-ish sizes, for property tests
inline msched::Instance random_instance(std::uint64_t seed, int n_jobs, int machines,
                                        bool parallel = false,
                                        double np_frac = 0.4) {
    msched::RandomStream rs(seed, 0);
    msched::Instance inst;
    inst.machines = machines;
    inst.parallel_tasks = parallel;
    std::uint64_t ctr = 0;
    double t = 0.0;
    for (int i = 0; i < n_jobs; ++i) {
        t += 2.0 * rs.uniform(ctr++);
        int n_tasks = 1 + static_cast<int>(rs.uniform(ctr++) * 3.0);
        std::vector<msched::Task> tasks;
        for (int k = 0; k < n_tasks; ++k) {
            double sz = 0.1 + 2.0 * rs.uniform(ctr++);
            bool pre = rs.uniform(ctr++) >= np_frac;
            tasks.push_back({k, sz, pre, sz});
        }
        inst.jobs.push_back(msched::make_job(i, t, std::move(tasks)));
    }
    return inst;
}

} // namespace test_helpers
