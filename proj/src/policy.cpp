#include "msched/policy.hpp"

#include <algorithm>
#include <stdexcept>

#include "msched/sim.hpp"

namespace msched {

PolicySpec PolicySpec::parse(const std::string& s) {
    PolicySpec p;
    if (s == "m-srpt") {
        p.kind = PolicyKind::MSrpt;
    } else if (s.rfind("m-chi-srpt:", 0) == 0) {
        p.kind = PolicyKind::MChiSrpt;
        p.chi = std::stod(s.substr(11));
        if (!(p.chi > 0.0))
            throw std::invalid_argument("m-chi-srpt: chi must be positive");
    } else if (s == "srpt1n") {
        p.kind = PolicyKind::Srpt1N;
    } else if (s == "psjf1n") {
        p.kind = PolicyKind::Psjf1N;
    } else if (s == "fcfs") {
        p.kind = PolicyKind::Fcfs;
    } else if (s == "brute") {
        p.kind = PolicyKind::BruteOpt;
    } else {
        throw std::invalid_argument("unknown policy '" + s + "'");
    }
    return p;
}

std::string PolicySpec::name() const {
    switch (kind) {
    case PolicyKind::MSrpt: return "m-srpt";
    case PolicyKind::MChiSrpt: return "m-chi-srpt:" + std::to_string(chi);
    case PolicyKind::Srpt1N: return "srpt1n";
    case PolicyKind::Psjf1N: return "psjf1n";
    case PolicyKind::Fcfs: return "fcfs";
    case PolicyKind::BruteOpt: return "brute";
    }
    return "?";
}

namespace {

struct Builder {
    const SimState& st;
    Assignment asg;
    std::vector<int> served_jobs;          // job ids with at least one machine
    std::vector<std::pair<int, int>> used; // assigned (job, task) pairs
    std::vector<int> free_slots;

    explicit Builder(const SimState& s) : st(s) {
        asg.slots.resize(s.machines());
        asg.rate = s.speed();
    }

    bool job_served(int id) const {
        return std::find(served_jobs.begin(), served_jobs.end(), id) != served_jobs.end();
    }
    bool task_used(int j, int t) const {
        return std::find(used.begin(), used.end(), std::make_pair(j, t)) != used.end();
    }

    void place(int slot, int job, int task) {
        asg.slots[slot] = {job, task};
        if (!job_served(job)) served_jobs.push_back(job);
        used.emplace_back(job, task);
    }

    // keep alive pinned non-preemptive tasks on their machines
    void apply_pins() {
        for (int m = 0; m < st.machines(); ++m) {
            const auto& pin = st.pins()[m];
            if (pin) {
                place(m, pin->first, pin->second);
            } else {
                free_slots.push_back(m);
            }
        }
    }

    // offer free machines to unserved alive jobs in `order`; one machine and
    // the job's shortest alive task each
    template <typename Set>
    void fill_one_per_job(const Set& order) {
        auto it = order.begin();
        std::size_t next = 0;
        while (next < free_slots.size() && it != order.end()) {
            int id = it->second;
            ++it;
            if (job_served(id)) continue;
            int task = st.shortest_alive_task(id);
            if (task < 0) continue;
            place(free_slots[next++], id, task);
        }
        free_slots.erase(free_slots.begin(), free_slots.begin() + next);
    }

    // parallel-task mode: hand remaining machines to further alive tasks,
    // jobs visited in SRPT order
    void fill_parallel_extras() {
        if (!st.parallel_tasks() || free_slots.empty()) return;
        std::size_t next = 0;
        for (const auto& [rem, id] : st.by_remaining()) {
            (void)rem;
            const Job& j = st.job(id);
            for (const Task& t : j.tasks) {
                if (next >= free_slots.size()) break;
                if (t.done() || task_used(id, t.id)) continue;
                place(free_slots[next++], id, t.id);
            }
            if (next >= free_slots.size()) break;
        }
        free_slots.erase(free_slots.begin(), free_slots.begin() + next);
    }
};

} // namespace

Assignment decide_m_srpt(const SimState& st) {
    Builder b(st);
    b.apply_pins();
    b.fill_one_per_job(st.by_remaining());
    b.fill_parallel_extras();
    return b.asg;
}

Assignment decide_m_chi_srpt(const SimState& st, double chi) {
    if (!(chi > 0.0)) throw std::invalid_argument("m-chi-srpt: chi must be positive");
    Builder b(st);
    b.apply_pins();

    // candidate set: the first |free| unserved alive jobs in SRPT order;
    // candidates inside the chi pool reserve machines that are then handed
    // out FIFO by arrival within the pool
    std::vector<int> big_candidates;
    int n_chi = 0;
    {
        std::size_t want = b.free_slots.size();
        for (const auto& [rem, id] : st.by_remaining()) {
            if (big_candidates.size() + n_chi >= want) break;
            if (b.job_served(id)) continue;
            if (rem <= chi)
                ++n_chi;
            else
                big_candidates.push_back(id);
        }
    }
    std::size_t next = 0;
    for (int id : big_candidates) {
        int task = st.shortest_alive_task(id);
        if (task >= 0) b.place(b.free_slots[next++], id, task);
    }
    for (const auto& [arr, id] : st.chi_pool()) {
        (void)arr;
        if (n_chi == 0) break;
        if (b.job_served(id)) continue;
        int task = st.shortest_alive_task(id);
        if (task < 0) continue;
        b.place(b.free_slots[next++], id, task);
        --n_chi;
    }
    b.free_slots.erase(b.free_slots.begin(), b.free_slots.begin() + next);
    // leftover machines filled work-conservingly from either pool
    b.fill_one_per_job(st.by_remaining());
    b.fill_parallel_extras();
    return b.asg;
}

namespace {

Assignment decide_single_fast(const SimState& st, const SimState::OrderedSet& order) {
    Assignment asg;
    asg.slots.resize(1);
    asg.rate = st.speed();
    if (!order.empty()) {
        int id = order.begin()->second;
        asg.slots[0] = {id, st.first_alive_task(id)};
    }
    return asg;
}

} // namespace

Assignment decide_srpt_single_fast(const SimState& st) {
    return decide_single_fast(st, st.by_remaining());
}

Assignment decide_psjf_single_fast(const SimState& st) {
    return decide_single_fast(st, st.by_size());
}

Assignment decide_fcfs(const SimState& st) {
    Builder b(st);
    b.apply_pins();
    // arrival order, one machine per job, tasks in index order
    auto it = st.by_arrival().begin();
    std::size_t next = 0;
    while (next < b.free_slots.size() && it != st.by_arrival().end()) {
        int id = it->second;
        ++it;
        if (b.job_served(id)) continue;
        int task = st.first_alive_task(id);
        if (task < 0) continue;
        b.place(b.free_slots[next++], id, task);
    }
    b.free_slots.erase(b.free_slots.begin(), b.free_slots.begin() + next);
    return b.asg;
}

Assignment decide(const SimState& st, const PolicySpec& policy) {
    switch (policy.kind) {
    case PolicyKind::MSrpt: return decide_m_srpt(st);
    case PolicyKind::MChiSrpt: return decide_m_chi_srpt(st, policy.chi);
    case PolicyKind::Srpt1N: return decide_srpt_single_fast(st);
    case PolicyKind::Psjf1N: return decide_psjf_single_fast(st);
    case PolicyKind::Fcfs: return decide_fcfs(st);
    case PolicyKind::BruteOpt:
        throw std::invalid_argument("brute is an offline oracle, not a decision rule");
    }
    throw std::logic_error("unreachable");
}

void validate_assignment(const SimState& st, const Assignment& asg) {
    if (static_cast<int>(asg.slots.size()) != st.machines())
        throw std::logic_error("assignment: wrong machine count");
    std::vector<std::pair<int, int>> seen;
    std::vector<int> jobs_seen;
    int busy = 0;
    for (int m = 0; m < st.machines(); ++m) {
        const MachineSlot& s = asg.slots[m];
        const auto& pin = st.pins()[m];
        if (pin && !(s.job == pin->first && s.task == pin->second))
            throw std::logic_error("assignment: pinned task moved off its machine");
        if (s.idle()) continue;
        ++busy;
        if (std::find(seen.begin(), seen.end(), std::make_pair(s.job, s.task)) != seen.end())
            throw std::logic_error("assignment: task on two machines");
        seen.emplace_back(s.job, s.task);
        bool job_repeat =
            std::find(jobs_seen.begin(), jobs_seen.end(), s.job) != jobs_seen.end();
        if (job_repeat && !st.parallel_tasks())
            throw std::logic_error("assignment: job on two machines without parallel tasks");
        jobs_seen.push_back(s.job);
        const Job& j = st.job(s.job);
        bool found = false;
        for (const Task& t : j.tasks)
            if (t.id == s.task && !t.done()) found = true;
        if (!found)
            throw std::logic_error("assignment: serving a finished or unknown task");
    }
    // work conservation: every policy can serve at least one task per alive
    // job (parallel extras beyond that are policy-specific, not enforced here)
    if (busy < std::min(st.alive_count(), st.machines()))
        throw std::logic_error("assignment: idle machine with feasible work");
}

} // namespace msched
