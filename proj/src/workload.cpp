#include "msched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "msched/rng.hpp"
#include <json.hpp>

namespace msched {

namespace {

// counter layout within a job's stream
constexpr std::uint64_t CTR_INTERARRIVAL = 0;
constexpr std::uint64_t CTR_SIZE = 1;
constexpr std::uint64_t CTR_TASK_COUNT = 2;
constexpr std::uint64_t CTR_PROPORTION = 100; // + task index
constexpr std::uint64_t CTR_NP_FLAG = 10000;  // + task index

constexpr int MAX_GEOMETRIC_TASKS = 64;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

TaskSplit TaskSplit::parse(const std::string& spec, double np_frac,
                           std::optional<double> eta_cap) {
    TaskSplit s;
    s.nonpreemptive_fraction = np_frac;
    s.eta_cap = eta_cap;
    if (np_frac < 0.0 || np_frac > 1.0)
        throw std::invalid_argument("task split: np fraction must lie in [0,1]");
    if (eta_cap && !(*eta_cap > 0.0))
        throw std::invalid_argument("task split: eta cap must be positive");
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    if (name == "single") {
        s.mode = SplitMode::Single;
    } else if (name == "fixed") {
        s.mode = SplitMode::FixedK;
        if (colon == std::string::npos || spec.substr(colon + 1, 2) != "k=")
            throw std::invalid_argument("task split: expected fixed:k=<n>");
        s.fixed_k = std::stoi(spec.substr(colon + 3));
        if (s.fixed_k < 1) throw std::invalid_argument("task split: k must be >= 1");
    } else if (name == "geom") {
        s.mode = SplitMode::Geometric;
        if (colon == std::string::npos || spec.substr(colon + 1, 2) != "q=")
            throw std::invalid_argument("task split: expected geom:q=<q>");
        s.geometric_q = std::stod(spec.substr(colon + 3));
        if (!(s.geometric_q > 0.0 && s.geometric_q <= 1.0))
            throw std::invalid_argument("task split: q must lie in (0,1]");
    } else {
        throw std::invalid_argument("unknown task split '" + name + "'");
    }
    return s;
}

std::string TaskSplit::spec() const {
    switch (mode) {
    case SplitMode::Single: return "single";
    case SplitMode::FixedK: return "fixed:k=" + std::to_string(fixed_k);
    case SplitMode::Geometric: {
        std::ostringstream os;
        os << "geom:q=" << geometric_q;
        return os.str();
    }
    }
    return "single";
}

std::vector<Task> split_job(double p, const TaskSplit& split,
                            std::uint64_t seed, std::uint64_t job_index) {
    RandomStream rs(seed, job_index);
    int n = 1;
    switch (split.mode) {
    case SplitMode::Single: n = 1; break;
    case SplitMode::FixedK: n = split.fixed_k; break;
    case SplitMode::Geometric: {
        double u = rs.uniform(CTR_TASK_COUNT);
        if (split.geometric_q >= 1.0) {
            n = 1;
        } else {
            n = 1 + static_cast<int>(std::log1p(-u) / std::log1p(-split.geometric_q));
            n = std::min(n, MAX_GEOMETRIC_TASKS);
        }
        break;
    }
    }

    // stick-breaking proportions; last task absorbs the float residue so
    // the sizes sum to p exactly
    std::vector<double> sizes(n);
    if (n == 1) {
        sizes[0] = p;
    } else {
        double total = 0.0;
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) {
            w[i] = rs.uniform(CTR_PROPORTION + i);
            total += w[i];
        }
        double acc = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            sizes[i] = p * (w[i] / total);
            acc += sizes[i];
        }
        sizes[n - 1] = p - acc;
    }

    std::vector<Task> tasks;
    for (int i = 0; i < n; ++i) {
        bool np = rs.uniform(CTR_NP_FLAG + i) < split.nonpreemptive_fraction;
        if (np && split.eta_cap && sizes[i] > *split.eta_cap) {
            int m = static_cast<int>(std::ceil(sizes[i] / *split.eta_cap));
            double piece = sizes[i] / m;
            double acc = 0.0;
            for (int j = 0; j + 1 < m; ++j) {
                tasks.push_back({0, piece, false, piece});
                acc += piece;
            }
            tasks.push_back({0, sizes[i] - acc, false, sizes[i] - acc});
        } else {
            tasks.push_back({0, sizes[i], !np, sizes[i]});
        }
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i].id = static_cast<int>(i);
    return tasks;
}

Instance sample_instance(const SizeDistribution& dist, const TaskSplit& split,
                         double lambda, int n_jobs, int machines,
                         std::uint64_t seed, bool parallel_tasks) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_instance: lambda must be positive");
    if (n_jobs < 1) throw std::invalid_argument("sample_instance: need at least one job");
    Instance inst;
    inst.machines = machines;
    inst.parallel_tasks = parallel_tasks;
    double t = 0.0;
    for (int i = 0; i < n_jobs; ++i) {
        RandomStream rs(seed, static_cast<std::uint64_t>(i));
        t += -std::log1p(-rs.uniform(CTR_INTERARRIVAL)) / lambda;
        double p = dist.sample(rs.uniform(CTR_SIZE));
        inst.jobs.push_back(make_job(i, t, split_job(p, split, seed, i)));
    }
    return inst;
}

double rho(const SizeDistribution& dist, double lambda, int machines) {
    return lambda * dist.mean() / machines;
}

double rho_of_y(const SizeDistribution& dist, double lambda, double y) {
    return lambda * dist.partial_first_moment(y);
}

std::string instance_to_json(const Instance& inst) {
    std::ostringstream os;
    os << "{\"machines\": " << inst.machines
       << ", \"parallel_tasks\": " << (inst.parallel_tasks ? "true" : "false")
       << ", \"jobs\": [";
    for (std::size_t i = 0; i < inst.jobs.size(); ++i) {
        const Job& j = inst.jobs[i];
        if (i) os << ", ";
        os << "{\"id\": " << j.id << ", \"arrival\": " << fmt17(j.arrival)
           << ", \"tasks\": [";
        for (std::size_t t = 0; t < j.tasks.size(); ++t) {
            if (t) os << ", ";
            os << "{\"size\": " << fmt17(j.tasks[t].size)
               << ", \"preemptive\": " << (j.tasks[t].preemptive ? "true" : "false") << "}";
        }
        os << "]}";
    }
    os << "]}";
    return os.str();
}

Instance instance_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("instance: malformed JSON: ") + e.what());
    }
    Instance inst;
    try {
        inst.machines = doc.at("machines").get<int>();
        inst.parallel_tasks = doc.value("parallel_tasks", false);
        for (const auto& jj : doc.at("jobs")) {
            int id = jj.at("id").get<int>();
            double arrival = jj.at("arrival").get<double>();
            std::vector<Task> tasks;
            int tid = 0;
            for (const auto& tt : jj.at("tasks")) {
                double size = tt.at("size").get<double>();
                if (!(size > 0.0))
                    throw std::runtime_error("instance: job " + std::to_string(id) +
                                             " task " + std::to_string(tid) +
                                             " has nonpositive size");
                tasks.push_back({tid, size, tt.value("preemptive", true), size});
                ++tid;
            }
            inst.jobs.push_back(make_job(id, arrival, std::move(tasks)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("instance: bad schema: ") + e.what());
    }
    validate_instance(inst);
    // stable sort by (arrival, id); arrivals in the file need not be ordered
    std::stable_sort(inst.jobs.begin(), inst.jobs.end(), [](const Job& a, const Job& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.id < b.id;
    });
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << instance_to_json(inst) << "\n";
}

} // namespace msched
