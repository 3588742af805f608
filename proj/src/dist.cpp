#include "msched/dist.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace msched {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b) {
    double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = simpson(f, a, m);
    double right = simpson(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10) {
    if (b <= a) return 0.0;
    return adaptive_simpson(f, a, b, simpson(f, a, b), tol, 48);
}

} // namespace

SizeDistribution::SizeDistribution(DistKind k, double a, double b, double c)
    : p1(a), p2(b), p3(c), kind_(k) {
    switch (kind_) {
    case DistKind::BoundedUniform:
        if (!(0 < p1 && p1 < p2))
            throw std::invalid_argument("uniform: need 0 < a < b");
        mean_ = 0.5 * (p1 + p2);
        break;
    case DistKind::Deterministic:
        if (!(p1 > 0)) throw std::invalid_argument("deterministic: need c > 0");
        mean_ = p1;
        break;
    case DistKind::Exponential:
        if (!(p1 > 0)) throw std::invalid_argument("exponential: need mu > 0");
        mean_ = 1.0 / p1;
        break;
    case DistKind::Weibull:
        if (!(p1 > 0 && p2 > 0))
            throw std::invalid_argument("weibull: need mu > 0 and alpha > 0");
        mean_ = std::tgamma(1.0 + 1.0 / p2) * std::pow(p1, -1.0 / p2);
        break;
    case DistKind::Pareto:
        if (!(p1 > 0)) throw std::invalid_argument("pareto: need xmin > 0");
        if (!(p2 >= 4.0)) throw std::invalid_argument("pareto: need alpha >= 4");
        mean_ = p2 * p1 / (p2 - 1.0);
        break;
    case DistKind::BoundedPareto:
        if (!(0 < p1 && p1 < p2))
            throw std::invalid_argument("bounded pareto: need 0 < xmin < xmax");
        if (!(p3 > 0) || p3 == 1.0 || p3 == 2.0)
            throw std::invalid_argument("bounded pareto: need alpha > 0, alpha != 1, 2");
        {
            double a = p3, L = p1, H = p2;
            double norm = 1.0 - std::pow(L / H, a);
            mean_ = a * std::pow(L, a) / (a - 1.0) *
                    (std::pow(L, 1.0 - a) - std::pow(H, 1.0 - a)) / norm;
        }
        break;
    }
}

SizeDistribution SizeDistribution::bounded_uniform(double a, double b) {
    return {DistKind::BoundedUniform, a, b, 0};
}
SizeDistribution SizeDistribution::deterministic(double c) {
    return {DistKind::Deterministic, c, 0, 0};
}
SizeDistribution SizeDistribution::exponential(double mu) {
    return {DistKind::Exponential, mu, 0, 0};
}
SizeDistribution SizeDistribution::weibull(double mu, double alpha) {
    return {DistKind::Weibull, mu, alpha, 0};
}
SizeDistribution SizeDistribution::pareto(double x_min, double alpha) {
    return {DistKind::Pareto, x_min, alpha, 0};
}
SizeDistribution SizeDistribution::bounded_pareto(double x_min, double x_max, double alpha) {
    return {DistKind::BoundedPareto, x_min, x_max, alpha};
}

double SizeDistribution::pdf(double x) const {
    switch (kind_) {
    case DistKind::BoundedUniform:
        return (x >= p1 && x <= p2) ? 1.0 / (p2 - p1) : 0.0;
    case DistKind::Deterministic:
        return 0.0; // point mass, no density
    case DistKind::Exponential:
        return x >= 0 ? p1 * std::exp(-p1 * x) : 0.0;
    case DistKind::Weibull:
        return x > 0 ? p1 * p2 * std::pow(x, p2 - 1.0) * std::exp(-p1 * std::pow(x, p2)) : 0.0;
    case DistKind::Pareto:
        return x >= p1 ? p2 * std::pow(p1, p2) * std::pow(x, -p2 - 1.0) : 0.0;
    case DistKind::BoundedPareto: {
        if (x < p1 || x > p2) return 0.0;
        double norm = 1.0 - std::pow(p1 / p2, p3);
        return p3 * std::pow(p1, p3) * std::pow(x, -p3 - 1.0) / norm;
    }
    }
    return 0.0;
}

double SizeDistribution::cdf(double x) const {
    switch (kind_) {
    case DistKind::BoundedUniform:
        if (x < p1) return 0.0;
        if (x >= p2) return 1.0;
        return (x - p1) / (p2 - p1);
    case DistKind::Deterministic:
        return x >= p1 ? 1.0 : 0.0;
    case DistKind::Exponential:
        return x > 0 ? 1.0 - std::exp(-p1 * x) : 0.0;
    case DistKind::Weibull:
        return x > 0 ? 1.0 - std::exp(-p1 * std::pow(x, p2)) : 0.0;
    case DistKind::Pareto:
        return x >= p1 ? 1.0 - std::pow(p1 / x, p2) : 0.0;
    case DistKind::BoundedPareto:
        if (x < p1) return 0.0;
        if (x >= p2) return 1.0;
        return (1.0 - std::pow(p1 / x, p3)) / (1.0 - std::pow(p1 / p2, p3));
    }
    return 0.0;
}

double SizeDistribution::partial_first_moment(double y) const {
    if (y <= 0) return 0.0;
    switch (kind_) {
    case DistKind::BoundedUniform: {
        if (y <= p1) return 0.0;
        double hi = std::min(y, p2);
        return (hi * hi - p1 * p1) / (2.0 * (p2 - p1));
    }
    case DistKind::Deterministic:
        return y >= p1 ? p1 : 0.0;
    case DistKind::Exponential:
        return 1.0 / p1 - std::exp(-p1 * y) * (y + 1.0 / p1);
    case DistKind::Weibull: {
        // past the 1e-16 tail the integrand is numerically zero and would
        // fool the adaptive rule into sampling nothing but zeros
        double cut = std::pow(37.0 / p1, 1.0 / p2);
        return integrate([this](double t) { return t * pdf(t); }, 0.0,
                         std::min(y, cut));
    }
    case DistKind::Pareto:
        if (y <= p1) return 0.0;
        return mean_ * (1.0 - std::pow(p1 / y, p2 - 1.0));
    case DistKind::BoundedPareto: {
        if (y <= p1) return 0.0;
        double hi = std::min(y, p2);
        double a = p3, L = p1;
        double norm = 1.0 - std::pow(L / p2, a);
        return a * std::pow(L, a) / (a - 1.0) *
               (std::pow(L, 1.0 - a) - std::pow(hi, 1.0 - a)) / norm;
    }
    }
    return 0.0;
}

double SizeDistribution::partial_second_moment(double y) const {
    if (y <= 0) return 0.0;
    switch (kind_) {
    case DistKind::BoundedUniform: {
        if (y <= p1) return 0.0;
        double hi = std::min(y, p2);
        return (hi * hi * hi - p1 * p1 * p1) / (3.0 * (p2 - p1));
    }
    case DistKind::Deterministic:
        return y >= p1 ? p1 * p1 : 0.0;
    case DistKind::Exponential: {
        double mu = p1;
        return 2.0 / (mu * mu) -
               std::exp(-mu * y) * (y * y + 2.0 * y / mu + 2.0 / (mu * mu));
    }
    case DistKind::Weibull: {
        double cut = std::pow(37.0 / p1, 1.0 / p2);
        return integrate([this](double t) { return t * t * pdf(t); }, 0.0,
                         std::min(y, cut));
    }
    case DistKind::Pareto:
        if (y <= p1) return 0.0;
        return p2 * p1 * p1 / (p2 - 2.0) * (1.0 - std::pow(p1 / y, p2 - 2.0));
    case DistKind::BoundedPareto: {
        if (y <= p1) return 0.0;
        double hi = std::min(y, p2);
        double a = p3, L = p1;
        double norm = 1.0 - std::pow(L / p2, a);
        return a * std::pow(L, a) / (a - 2.0) *
               (std::pow(L, 2.0 - a) - std::pow(hi, 2.0 - a)) / norm;
    }
    }
    return 0.0;
}

double SizeDistribution::sample(double u) const {
    switch (kind_) {
    case DistKind::BoundedUniform:
        return p1 + u * (p2 - p1);
    case DistKind::Deterministic:
        return p1;
    case DistKind::Exponential:
        return -std::log1p(-u) / p1;
    case DistKind::Weibull:
        return std::pow(-std::log1p(-u) / p1, 1.0 / p2);
    case DistKind::Pareto:
        return p1 * std::pow(1.0 - u, -1.0 / p2);
    case DistKind::BoundedPareto: {
        double norm = 1.0 - std::pow(p1 / p2, p3);
        return p1 * std::pow(1.0 - u * norm, -1.0 / p3);
    }
    }
    return 0.0;
}

double SizeDistribution::G(double x) const {
    return partial_first_moment(x) / mean_;
}

double SizeDistribution::G_inv(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("G_inv: argument must lie in (0,1)");
    if (kind_ == DistKind::Deterministic) return p1;
    double lo = 0.0;
    double hi = support_max();
    if (!std::isfinite(hi)) {
        hi = std::max(1.0, mean_);
        while (G(hi) < u) hi *= 2.0;
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * std::max(1.0, hi); ++it) {
        double m = 0.5 * (lo + hi);
        (G(m) < u ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

double SizeDistribution::support_max() const {
    switch (kind_) {
    case DistKind::BoundedUniform: return p2;
    case DistKind::Deterministic: return p1;
    case DistKind::BoundedPareto: return p2;
    default: return std::numeric_limits<double>::infinity();
    }
}

std::string SizeDistribution::spec() const {
    std::ostringstream os;
    switch (kind_) {
    case DistKind::BoundedUniform: os << "uniform:a=" << p1 << ",b=" << p2; break;
    case DistKind::Deterministic: os << "det:c=" << p1; break;
    case DistKind::Exponential: os << "exp:mu=" << p1; break;
    case DistKind::Weibull: os << "weibull:mu=" << p1 << ",alpha=" << p2; break;
    case DistKind::Pareto: os << "pareto:xmin=" << p1 << ",alpha=" << p2; break;
    case DistKind::BoundedPareto:
        os << "bpareto:xmin=" << p1 << ",xmax=" << p2 << ",alpha=" << p3;
        break;
    }
    return os.str();
}

SizeDistribution SizeDistribution::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
        std::istringstream rest(spec.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("distribution spec: expected key=value in '" + item + "'");
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
    }
    auto need = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end())
            throw std::invalid_argument("distribution spec '" + spec + "': missing parameter " + k);
        return it->second;
    };
    if (name == "uniform") return bounded_uniform(need("a"), need("b"));
    if (name == "det") return deterministic(need("c"));
    if (name == "exp") return exponential(need("mu"));
    if (name == "weibull") return weibull(need("mu"), need("alpha"));
    if (name == "pareto") return pareto(need("xmin"), need("alpha"));
    if (name == "bpareto") return bounded_pareto(need("xmin"), need("xmax"), need("alpha"));
    throw std::invalid_argument("unknown distribution '" + name + "'");
}

} // namespace msched
