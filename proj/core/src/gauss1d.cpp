#include "gspq/gauss1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "gspq/error.hpp"
#include "gspq/normal.hpp"
#include "gspq/parallel.hpp"

namespace gspq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStallFloor = 1e-9;

double lower_edge(std::span<const double> a, std::size_t i) {
    return i == 0 ? -kInf : 0.5 * (a[i - 1] + a[i]);
}

double upper_edge(std::span<const double> a, std::size_t i) {
    return i + 1 == a.size() ? kInf : 0.5 * (a[i] + a[i + 1]);
}

// ∫_lo^hi z f(z) dz
double first_moment(double lo, double hi) { return normal::pdf(lo) - normal::pdf(hi); }

// ∫_lo^hi (z - a)² f(z) dz. Narrow cells are integrated by Gauss-Legendre to
// avoid the cancellation of the antiderivative form; f is entire so 20 nodes
// are exact to rounding on widths below one.
double cell_distortion(double lo, double hi, double a) {
    if (std::isfinite(lo) && std::isfinite(hi) && hi - lo < 1.0) {
        auto g = [a](double z) { return (z - a) * (z - a) * normal::pdf(z); };
        return boost::math::quadrature::gauss<double, 20>::integrate(g, lo, hi);
    }
    const double p = normal::interval_probability(lo, hi);
    const double lo_term = std::isfinite(lo) ? normal::pdf(lo) * (lo - 2.0 * a) : 0.0;
    const double hi_term = std::isfinite(hi) ? normal::pdf(hi) * (2.0 * a - hi) : 0.0;
    return (1.0 + a * a) * p + lo_term + hi_term;
}

// Antiderivative form, cheap; good enough to compare trial steps.
double rough_distortion(std::span<const double> a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double lo = lower_edge(a, i), hi = upper_edge(a, i);
        const double p = normal::interval_probability(lo, hi);
        sum += a[i] * a[i] * p - 2.0 * a[i] * first_moment(lo, hi);
    }
    return 1.0 + sum;
}

bool strictly_increasing(std::span<const double> a) {
    return std::adjacent_find(a.begin(), a.end(), std::greater_equal<>()) == a.end();
}

void symmetrize(std::vector<double>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double m = 0.5 * (a[n - 1 - i] - a[i]);
        a[i] = -m;
        a[n - 1 - i] = m;
    }
    if (n % 2 == 1) a[n / 2] = 0.0;
}

// Newton step for the stationarity system a_i p_i - m_i = 0. The Jacobian is
// tridiagonal; solved by the Thomas algorithm.
std::vector<double> newton_step(std::span<const double> a) {
    const std::size_t n = a.size();
    std::vector<double> diag(n), off(n > 0 ? n - 1 : 0), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = lower_edge(a, i), hi = upper_edge(a, i);
        const double p = normal::interval_probability(lo, hi);
        rhs[i] = -(a[i] * p - first_moment(lo, hi));
        double d = p;
        if (i + 1 < n) {
            const double c = -0.25 * normal::pdf(hi) * (a[i + 1] - a[i]);
            d += c;
            off[i] = c;
        }
        if (i > 0) d -= 0.25 * normal::pdf(lo) * (a[i] - a[i - 1]);
        diag[i] = d;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> step(n);
    for (std::size_t i = n; i-- > 0;) {
        const double carry = i + 1 < n ? off[i] * step[i + 1] : 0.0;
        step[i] = (rhs[i] - carry) / diag[i];
    }
    return step;
}

ScalarQuantizer finish(std::vector<double> a, int iterations) {
    ScalarQuantizer q;
    q.n = static_cast<int>(a.size());
    q.iterations = iterations;
    q.boundaries.reserve(a.size() - 1);
    for (std::size_t i = 0; i + 1 < a.size(); ++i) q.boundaries.push_back(0.5 * (a[i] + a[i + 1]));
    q.distortion = distortion(a);
    q.points = std::move(a);
    return q;
}

}  // namespace

std::vector<double> centroids(std::span<const double> points) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double lo = lower_edge(points, i), hi = upper_edge(points, i);
        out[i] = first_moment(lo, hi) / normal::interval_probability(lo, hi);
    }
    return out;
}

std::vector<double> cell_probabilities(std::span<const double> points) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = normal::interval_probability(lower_edge(points, i), upper_edge(points, i));
    }
    return out;
}

double distortion(std::span<const double> points) {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum += cell_distortion(lower_edge(points, i), upper_edge(points, i), points[i]);
    }
    return sum;
}

ScalarQuantizer optimize(int n, const QuantizerOptions& opts) {
    if (n < 1) throw DomainError("quantizer level count must be >= 1, got " + std::to_string(n));
    if (n == 1) return finish({0.0}, 0);

    // Companded start: quantiles of N(0, 3), the point density f^{1/3}
    // normalised, which is already close to the optimum for every n.
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) {
        a[i] = std::numbers::sqrt3 * normal::quantile((2.0 * i + 1.0) / (2.0 * n));
    }
    symmetrize(a);

    double last_step = kInf;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const std::vector<double> step = newton_step(a);
        const double current = rough_distortion(a);

        double step_norm = 0.0;
        for (double s : step) step_norm = std::max(step_norm, std::abs(s));

        std::vector<double> trial(a.size());
        bool accepted = false;
        for (double scale = 1.0; scale > 1e-4; scale *= 0.5) {
            for (std::size_t i = 0; i < a.size(); ++i) trial[i] = a[i] + scale * step[i];
            if (!strictly_increasing(trial)) continue;
            // near the fixed point the distortion change drowns in rounding
            if (step_norm < 1e-6 || rough_distortion(trial) <= current) {
                accepted = true;
                break;
            }
        }
        if (!accepted) trial = centroids(a);  // Lloyd fallback, always descends
        symmetrize(trial);

        const double previous = last_step;
        last_step = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            last_step = std::max(last_step, std::abs(trial[i] - a[i]));
        }
        a = std::move(trial);
        if (last_step <= opts.tol) return finish(std::move(a), it);
        // Quadratic convergence has hit the rounding floor of the (ill-conditioned
        // for large n) Newton system: the step stopped shrinking.
        if (last_step <= kStallFloor && last_step > 0.5 * previous) return finish(std::move(a), it);
    }
    throw ConvergenceError("scalar quantizer n=" + std::to_string(n) + " did not converge",
                           0.0, last_step);
}

DistortionTable::DistortionTable(int max_n) {
    if (max_n < 1) throw DomainError("distortion table size must be >= 1");
    quantizers_.resize(static_cast<std::size_t>(max_n));
    parallel_for(quantizers_.size(),
                 [&](std::size_t i) { quantizers_[i] = optimize(static_cast<int>(i) + 1); });
}

double DistortionTable::operator()(int n) const { return quantizer(n).distortion; }

const ScalarQuantizer& DistortionTable::quantizer(int n) const {
    if (n < 1 || n > max_n()) {
        throw DomainError("level count " + std::to_string(n) + " outside table 1.." +
                          std::to_string(max_n()));
    }
    return quantizers_[static_cast<std::size_t>(n - 1)];
}

std::vector<std::pair<int, double>> DistortionTable::rows() const {
    std::vector<std::pair<int, double>> out;
    out.reserve(quantizers_.size());
    for (const auto& q : quantizers_) out.emplace_back(q.n, q.distortion);
    return out;
}

double zador_limit(int r, int d) {
    if (r != 2 || d != 1) {
        throw DomainError("zador_limit: only r = 2, d = 1 is supported (J_{r,d} unknown or unused)");
    }
    // J_{2,1} = 1/12; ‖f‖_{1/3} = (∫ f^{1/3})³ = ((2π)^{-1/6} √(6π))³
    return std::numbers::pi * std::numbers::sqrt3 / 2.0;
}

}  // namespace gspq
