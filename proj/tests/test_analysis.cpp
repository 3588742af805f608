#include <doctest.h>

#include <cmath>

#include "msched/analysis.hpp"
#include "msched/brute.hpp"
#include "helpers.hpp"

using namespace msched;
using test_helpers::mk;
using test_helpers::random_instance;

TEST_CASE("competitive-ratio bound formula") {
    CHECK(cr_upper_bound(1.0, 0.0) == doctest::Approx(8.0));
    CHECK(cr_upper_bound(8.0, 2.0) == doctest::Approx(4.0 * 3.0 + 4.0 + 8.0));
    CHECK(cr_upper_bound(2.0, 1.0) == doctest::Approx(14.0));
    CHECK_THROWS_AS(cr_upper_bound(0.5, 0.0), std::domain_error); // alpha >= 1
    CHECK_THROWS_AS(cr_upper_bound(2.0, -1.0), std::domain_error);
}

TEST_CASE("busy-period mean is additive in the initial work") {
    CHECK(busy_period_mean(1.0, 0.5) == doctest::Approx(2.0));
    CHECK(busy_period_mean(3.0, 0.9) == doctest::Approx(30.0));
    CHECK(busy_period_mean(2.0, 0.5)
          == doctest::Approx(busy_period_mean(1.0, 0.5) + busy_period_mean(1.0, 0.5)));
    CHECK_THROWS(busy_period_mean(1.0, 1.0));
    CHECK_THROWS(busy_period_mean(1.0, 1.5));
}

TEST_CASE("m/m/1 srpt mean-flow sandwich constants") {
    double mu = 1.0;
    double r = 1.0 - 1.0 / std::exp(1.0); // makes mu(1-rho)ln(1/(1-rho)) = 1/e
    auto [lo, hi] = mm1_srpt_bounds(mu, r);
    CHECK(lo == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(7.0 * std::exp(1.0)).epsilon(1e-12));
    CHECK(lo < hi);
    // scaling: doubling mu halves both ends
    auto [lo2, hi2] = mm1_srpt_bounds(2.0 * mu, r);
    CHECK(lo2 == doctest::Approx(lo / 2.0));
    CHECK(hi2 == doctest::Approx(hi / 2.0));
}

TEST_CASE("expected maximum of iid exponentials") {
    CHECK(exp_max_expectation(1, 1.0) == doctest::Approx(1.0));
    CHECK(exp_max_expectation(2, 1.0) == doctest::Approx(1.5));
    CHECK(exp_max_expectation(4, 2.0) == doctest::Approx(25.0 / 24.0));
    CHECK_THROWS(exp_max_expectation(0, 1.0));
}

TEST_CASE("psjf workload closed form") {
    auto e1 = SizeDistribution::exponential(1.0);
    CHECK(psjf_workload_form(e1, 0.8, 0.0) == 0.0);
    CHECK(psjf_workload_form(e1, 0.8, 1.0)
          == doctest::Approx(0.08146149987564837).epsilon(1e-12));
    // monotone in x
    CHECK(psjf_workload_form(e1, 0.8, 0.5) < psjf_workload_form(e1, 0.8, 1.0));
    CHECK(psjf_workload_form(e1, 0.8, 1.0) < psjf_workload_form(e1, 0.8, 2.0));
}

TEST_CASE("eta mgf bound") {
    // E[n] = e, exp(1) task sizes: known optimum near s* ~ 0.682
    auto exp_mgf = [](double s) {
        return s < 1.0 ? 1.0 / (1.0 - s) : std::numeric_limits<double>::infinity();
    };
    CHECK(eta_mgf_bound(std::exp(1.0), exp_mgf)
          == doctest::Approx(3.146193220622703).epsilon(1e-6));

    // point mass at c: bound tends to c as s grows, optimum <= c + small
    auto det_mgf = [](double s) { return std::exp(2.0 * s); };
    CHECK(eta_mgf_bound(1.0, det_mgf) == doctest::Approx(2.0).epsilon(1e-3));

    // monotone in the task-count mean
    CHECK(eta_mgf_bound(2.0, exp_mgf) < eta_mgf_bound(5.0, exp_mgf));
}

TEST_CASE("srpt growth rate blows up like 1/(1-rho) for bounded sizes") {
    auto u = SizeDistribution::bounded_uniform(1.0, 2.0);
    double prev = 0.0;
    for (double r : {0.9, 0.99, 0.999}) {
        double g = srpt_growth(u, r);
        CHECK(g > prev);
        prev = g;
        // (1-rho) * growth = 1/G_inv(rho), pinned to the bounded support
        double scaled = (1.0 - r) * g;
        CHECK(scaled >= 1.0 / 2.0 - 1e-9);
        CHECK(scaled <= 1.0 / 1.0 + 1e-9);
    }
}

TEST_CASE("srpt growth under pareto(4): log-log slope is (alpha-2)/(alpha-1)") {
    auto p = SizeDistribution::pareto(1.0, 4.0);
    std::vector<double> xs, ys;
    for (double r : {0.99, 0.995, 0.999, 0.9995, 0.9999}) {
        xs.push_back(std::log(1.0 / (1.0 - r)));
        ys.push_back(std::log(srpt_growth(p, r)));
    }
    CHECK(ols_slope(xs, ys) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("workload lemma audit passes on coupled runs") {
    auto inst = random_instance(5, 60, 2);
    auto [a, b] = coupled_run(inst, PolicySpec::parse("m-srpt"), PolicySpec::parse("srpt1n"));
    double eta = instance_params(inst).eta;
    auto reports = audit_workload_lemma(a, b, 2, eta, {0.5, 1.0, 2.0, 4.0});
    REQUIRE_FALSE(reports.empty());
    for (const auto& r : reports) {
        INFO(r.name, " bound ", r.bound_value, " observed ", *r.observed_value);
        CHECK(*r.satisfied);
    }
}

TEST_CASE("workload lemma audit refuses mismatched traces") {
    auto i1 = random_instance(5, 10, 2);
    auto i2 = random_instance(6, 10, 2);
    auto [a, _] = coupled_run(i1, PolicySpec::parse("m-srpt"), PolicySpec::parse("srpt1n"));
    auto [__, b] = coupled_run(i2, PolicySpec::parse("m-srpt"), PolicySpec::parse("srpt1n"));
    CHECK_THROWS(audit_workload_lemma(a, b, 2, 1.0, {1.0}));
}

TEST_CASE("charging audit holds on random m-srpt traces") {
    for (std::uint64_t seed : {13u, 14u}) {
        auto inst = random_instance(seed, 40, 2);
        TraceConfig cfg;
        cfg.record_snapshots = true;
        Trace tr = run(inst, PolicySpec::parse("m-srpt"), cfg);
        for (const auto& r : audit_charging_bounds(tr, inst)) {
            INFO(r.name, " bound ", r.bound_value, " observed ", *r.observed_value);
            CHECK(*r.satisfied);
        }
    }
}

TEST_CASE("competitive_ratio_check on a tiny instance") {
    auto inst = mk(1, false, {{0.0, {{3.0, true}}}, {0.0, {{1.0, true}}}});
    auto rep = competitive_ratio_check(inst);
    CHECK(*rep.observed_value == doctest::Approx(1.0));
    CHECK(*rep.satisfied);
    CHECK(rep.bound_value >= 8.0);
}

TEST_CASE("ols slope on an exact line") {
    CHECK(ols_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
    CHECK_THROWS(ols_slope({1.0}, {1.0}));
}

TEST_CASE("bootstrap percentile ci brackets the mean and is deterministic") {
    std::vector<double> v;
    RandomStream rs(3, 9);
    for (int i = 0; i < 400; ++i) v.push_back(rs.uniform(i));
    auto [lo, hi] = bootstrap_percentile_ci(v);
    auto [lo2, hi2] = bootstrap_percentile_ci(v);
    CHECK(lo == lo2);
    CHECK(hi == hi2);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    CHECK(lo < mean);
    CHECK(mean < hi);
    CHECK(hi - lo < 0.1);
}

TEST_CASE("heavy-traffic curve shape at small scale") {
    auto u = SizeDistribution::bounded_uniform(1.0, 2.0);
    TaskSplit split = TaskSplit::parse("single", 0.0, std::nullopt);
    auto pts = heavy_traffic_ratio_curve(u, split, 2, {0.7, 0.9}, 10, 3000, 99);
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) {
        CHECK(p.ratio >= 1.0 - (p.ratio_ci_hi - p.ratio_ci_lo));
        CHECK(p.ratio_ci_lo <= p.ratio);
        CHECK(p.ratio <= p.ratio_ci_hi);
    }
    CHECK(pts[1].ratio < pts[0].ratio); // the policies converge as rho -> 1
}
