#include <doctest.h>

#include <cmath>
#include <fstream>

#include "msched/workload.hpp"
#include "helpers.hpp"

using namespace msched;
using test_helpers::mk;

TEST_CASE("task split conserves the job size exactly") {
    for (auto spec : {"single", "fixed:k=3", "geom:q=0.5"}) {
        TaskSplit split = TaskSplit::parse(spec, 0.3, std::nullopt);
        for (std::uint64_t j = 0; j < 200; ++j) {
            auto tasks = split_job(4.0, split, 11, j);
            double sum = 0.0;
            for (const Task& t : tasks) sum += t.size;
            CHECK(sum == 4.0); // exact, last task absorbs the residue
        }
    }
}

TEST_CASE("eta cap clips every non-preemptive task") {
    TaskSplit split = TaskSplit::parse("fixed:k=2", 1.0, 0.5);
    for (std::uint64_t j = 0; j < 100; ++j) {
        auto tasks = split_job(3.0, split, 17, j);
        double sum = 0.0;
        for (const Task& t : tasks) {
            if (!t.preemptive) CHECK(t.size <= 0.5 + 1e-12);
            sum += t.size;
        }
        CHECK(sum == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    auto dist = SizeDistribution::exponential(1.0);
    TaskSplit split = TaskSplit::parse("geom:q=0.4", 0.5, 1.0);
    Instance a = sample_instance(dist, split, 0.7, 500, 2, 42);
    Instance b = sample_instance(dist, split, 0.7, 500, 2, 42);
    REQUIRE(a.jobs.size() == b.jobs.size());
    for (std::size_t i = 0; i < a.jobs.size(); ++i) {
        CHECK(a.jobs[i].arrival == b.jobs[i].arrival);
        CHECK(a.jobs[i].total_size == b.jobs[i].total_size);
    }
    Instance c = sample_instance(dist, split, 0.7, 500, 2, 43);
    CHECK(a.jobs[0].arrival != c.jobs[0].arrival);
}

TEST_CASE("mean interarrival sanity") {
    auto dist = SizeDistribution::deterministic(1.0);
    TaskSplit split = TaskSplit::parse("single", 0.0, std::nullopt);
    Instance inst = sample_instance(dist, split, 0.5, 1000, 1, 1);
    double mean = inst.jobs.back().arrival / 1000.0;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("rho formulas") {
    auto e2 = SizeDistribution::exponential(2.0);
    CHECK(rho(e2, 1.0, 1) == doctest::Approx(0.5));
    auto d = SizeDistribution::deterministic(2.0);
    CHECK(rho(d, 1.0, 4) == doctest::Approx(0.5));

    auto e1 = SizeDistribution::exponential(1.0);
    CHECK(rho_of_y(e1, 0.5, 0.0) == 0.0);
    CHECK(rho_of_y(e1, 0.5, 1.0)
          == doctest::Approx(0.5 * (1.0 - 2.0 / std::exp(1.0))).epsilon(1e-6));
    CHECK(rho_of_y(e1, 0.5, 1e6) == doctest::Approx(0.5).epsilon(1e-6));
    // nondecreasing in y
    double prev = 0.0;
    for (double y = 0.0; y < 5.0; y += 0.25) {
        double v = rho_of_y(e1, 0.5, y);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("instance JSON roundtrip") {
    auto inst = mk(2, true, {{0.0, {{1.5, true}, {0.25, false}}}, {3.7, {{2.0, false}}}});
    Instance back = instance_from_json(instance_to_json(inst));
    REQUIRE(back.jobs.size() == inst.jobs.size());
    CHECK(back.machines == 2);
    CHECK(back.parallel_tasks);
    for (std::size_t i = 0; i < inst.jobs.size(); ++i) {
        CHECK(back.jobs[i].id == inst.jobs[i].id);
        CHECK(back.jobs[i].arrival == inst.jobs[i].arrival); // bit-exact
        REQUIRE(back.jobs[i].tasks.size() == inst.jobs[i].tasks.size());
        for (std::size_t t = 0; t < inst.jobs[i].tasks.size(); ++t) {
            CHECK(back.jobs[i].tasks[t].size == inst.jobs[i].tasks[t].size);
            CHECK(back.jobs[i].tasks[t].preemptive == inst.jobs[i].tasks[t].preemptive);
        }
    }
}

TEST_CASE("loader sorts by arrival and rejects bad input") {
    std::string unsorted = R"({"machines": 1, "parallel_tasks": false, "jobs": [
        {"id": 5, "arrival": 2.0, "tasks": [{"size": 1.0, "preemptive": true}]},
        {"id": 1, "arrival": 0.5, "tasks": [{"size": 1.0, "preemptive": true}]}]})";
    Instance inst = instance_from_json(unsorted);
    CHECK(inst.jobs[0].id == 1);
    CHECK(inst.jobs[1].id == 5);

    CHECK_THROWS_WITH_AS(
        instance_from_json(R"({"machines": 1, "jobs": [
            {"id": 3, "arrival": 0, "tasks": [{"size": -1, "preemptive": true}]}]})"),
        doctest::Contains("job 3"), std::runtime_error);
    CHECK_THROWS(instance_from_json(R"({"machines": 1, "jobs": []})"));
    CHECK_THROWS(instance_from_json("not json"));
}
