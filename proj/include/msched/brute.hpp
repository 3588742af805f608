#pragma once

#include <vector>

#include "msched/model.hpp"
#include "msched/policy.hpp"

namespace msched {

struct BruteResult {
    double total_flow;
    double quantum;
    // schedule[q] = machine slots during [q*quantum, (q+1)*quantum)
    std::vector<std::vector<MachineSlot>> schedule;
};

// Exhaustive offline optimum for tiny integer instances: enumerates all
// per-quantum machine->task allocations (memoized), respecting the rule that
// a started non-preemptive task runs every quantum until done. Exact when all
// arrivals and sizes are multiples of `quantum`.
// Throws std::runtime_error("instance too large for oracle") past ~1e7 nodes.
BruteResult brute_force_optimal(const Instance& inst, double quantum = 1.0);

} // namespace msched
