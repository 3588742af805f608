#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace msched {

enum class DistKind {
    BoundedUniform,
    Deterministic,
    Exponential,
    Weibull,
    Pareto,
    BoundedPareto,
};

// Job-size law with density, CDF, partial moments and the normalized
// partial-load function G used in SRPT heavy-traffic growth rates.
class SizeDistribution {
public:
    static SizeDistribution bounded_uniform(double a, double b);
    static SizeDistribution deterministic(double c);
    static SizeDistribution exponential(double mu);       // rate mu, mean 1/mu
    static SizeDistribution weibull(double mu, double alpha); // F(x)=1-exp(-mu x^alpha)
    static SizeDistribution pareto(double x_min, double alpha);
    static SizeDistribution bounded_pareto(double x_min, double x_max, double alpha);

    // "exp:mu=1", "pareto:xmin=1,alpha=4", ...
    static SizeDistribution parse(const std::string& spec);

    DistKind kind() const { return kind_; }
    std::string spec() const;

    double pdf(double x) const;
    double cdf(double x) const;
    double mean() const { return mean_; }
    bool is_point_mass() const { return kind_ == DistKind::Deterministic; }

    // integral of t f(t) over [0, y]
    double partial_first_moment(double y) const;
    // integral of t^2 f(t) over [0, y]
    double partial_second_moment(double y) const;

    // inverse-CDF sampling from u in (0,1)
    double sample(double u) const;

    // G(x) = partial_first_moment(x) / mean, monotone from 0 to 1;
    // G_inv is the left-continuous generalized inverse (bisection, 1e-10 rel).
    double G(double x) const;
    double G_inv(double u) const;

    // upper end of the support, +inf for unbounded laws
    double support_max() const;

    double p1 = 0, p2 = 0, p3 = 0; // raw parameters, meaning depends on kind

private:
    SizeDistribution(DistKind k, double a, double b, double c);
    DistKind kind_;
    double mean_ = 0;
};

} // namespace msched
