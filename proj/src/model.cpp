#include "msched/model.hpp"

#include <algorithm>
#include <set>

namespace msched {

ClassDecomposition decompose(const std::vector<std::pair<int, double>>& jobs) {
    ClassDecomposition d;
    for (const auto& [id, w] : jobs) {
        (void)id;
        if (w < 0.0)
            throw std::domain_error("decompose: negative remaining work");
        if (w == 0.0) continue;
        d.per_class_work[class_index(w)] += w;
    }
    double acc = 0.0;
    for (const auto& [k, w] : d.per_class_work) {
        acc += w;
        d.prefix_work[k] = acc;
    }
    return d;
}

Job make_job(int id, double arrival, std::vector<Task> tasks) {
    Job j;
    j.id = id;
    j.arrival = arrival;
    j.tasks = std::move(tasks);
    for (std::size_t t = 0; t < j.tasks.size(); ++t) {
        j.tasks[t].id = static_cast<int>(t);
        j.tasks[t].remaining = j.tasks[t].size;
        j.total_size += j.tasks[t].size;
    }
    j.remaining = j.total_size;
    return j;
}

void validate_instance(const Instance& inst) {
    if (inst.machines < 1)
        throw std::invalid_argument("instance: machine count must be positive");
    if (inst.jobs.empty())
        throw std::invalid_argument("instance: at least one job required");
    std::set<int> ids;
    for (const Job& j : inst.jobs) {
        if (!ids.insert(j.id).second)
            throw std::invalid_argument("instance: duplicate job id " + std::to_string(j.id));
        if (j.arrival < 0.0)
            throw std::invalid_argument("instance: job " + std::to_string(j.id) + " has negative arrival");
        if (j.tasks.empty())
            throw std::invalid_argument("instance: job " + std::to_string(j.id) + " has no tasks");
        for (const Task& t : j.tasks)
            if (!(t.size > 0.0))
                throw std::invalid_argument("instance: job " + std::to_string(j.id) +
                                            " task " + std::to_string(t.id) + " has nonpositive size");
    }
}

InstanceParams instance_params(const Instance& inst) {
    validate_instance(inst);
    InstanceParams p;
    p.p_min = p.p_max = inst.jobs.front().total_size;
    for (const Job& j : inst.jobs) {
        p.p_min = std::min(p.p_min, j.total_size);
        p.p_max = std::max(p.p_max, j.total_size);
        for (const Task& t : j.tasks)
            if (!t.preemptive) p.eta = std::max(p.eta, t.size);
    }
    p.alpha = p.p_max / p.p_min;
    p.beta = p.eta / p.p_min; // eta over an empty set is 0, so beta is 0 too
    return p;
}

} // namespace msched
