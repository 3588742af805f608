#pragma once

#include <string>
#include <vector>

namespace msched {

class SimState;

enum class PolicyKind { MSrpt, MChiSrpt, Srpt1N, Psjf1N, Fcfs, BruteOpt };

struct PolicySpec {
    PolicyKind kind = PolicyKind::MSrpt;
    double chi = 0.0; // only for MChiSrpt

    // "m-srpt" | "m-chi-srpt:<chi>" | "srpt1n" | "psjf1n" | "fcfs" | "brute"
    static PolicySpec parse(const std::string& s);
    std::string name() const;

    // benchmark policies run on one logical machine of speed N
    bool single_fast() const {
        return kind == PolicyKind::Srpt1N || kind == PolicyKind::Psjf1N;
    }
};

struct MachineSlot {
    int job = -1;  // job id, -1 when idle
    int task = -1; // task id within job
    bool idle() const { return job < 0; }
};

struct Assignment {
    std::vector<MachineSlot> slots;
    double rate = 1.0; // speed contributed by each busy machine
};

Assignment decide_m_srpt(const SimState& state);
Assignment decide_m_chi_srpt(const SimState& state, double chi);
Assignment decide_srpt_single_fast(const SimState& state);
Assignment decide_psjf_single_fast(const SimState& state);
Assignment decide_fcfs(const SimState& state);

Assignment decide(const SimState& state, const PolicySpec& policy);

// throws std::logic_error on pinning, uniqueness or work-conservation breaches
void validate_assignment(const SimState& state, const Assignment& asg);

} // namespace msched
