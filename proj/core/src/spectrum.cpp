#include "gspq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/trigamma.hpp>

#include "gspq/error.hpp"
#include "gspq/parallel.hpp"

namespace gspq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_index(int ell) {
    if (ell < 1) throw DomainError("eigen index must be >= 1, got " + std::to_string(ell));
}

// cot(u) - slope * (offset + u) and its derivative, for u in (0, π/2].
struct Reduced {
    double slope;
    double offset;

    double value(double u) const { return std::cos(u) / std::sin(u) - slope * (offset + u); }
    double derivative(double u) const {
        const double s = std::sin(u);
        return -1.0 / (s * s) - slope;
    }
};

double solve_phase(const ProcessParams& p, int ell, double tol) {
    const double slope = p.slope();
    const double offset = bracket_lower(ell);
    const Reduced f{slope, offset};

    double hi = kHalfPi;
    if (f.value(hi) >= 0.0) return hi;  // slope below resolution: root sits at π/2

    double lo = 8.0 * kEps * ell * kPi;
    while (f.value(lo) <= 0.0) {
        lo *= 0.5;
        if (lo < std::numeric_limits<double>::min() || (ell > 1 && offset + lo == offset)) {
            throw ConvergenceError("root of index " + std::to_string(ell) +
                                       " is below the resolvable bracket",
                                   offset, offset + lo);
        }
    }

    // Far from the origin the root is close to 1/(slope * offset); start there,
    // otherwise at the bracket midpoint.
    double u = 0.5 * (lo + hi);
    if (ell > 1 && slope * offset > 4.0) u = std::clamp(1.0 / (slope * offset), lo, hi);

    for (int it = 0; it < kRootIterationBudget; ++it) {
        const double fu = f.value(u);
        if (fu == 0.0) return u;
        if (fu > 0.0) {
            lo = u;
        } else {
            hi = u;
        }

        const double newton = u - fu / f.derivative(u);
        // A step this small comes from a point already converged quadratically;
        // taking it lands within rounding of the root.
        if (std::abs(newton - u) <= tol * u) return std::clamp(newton, lo, hi);

        u = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
        if (hi - lo <= 2.0 * kEps * u) return u;
    }
    throw ConvergenceError("root solve for index " + std::to_string(ell) + " did not converge",
                           offset + lo, offset + hi);
}

}  // namespace

double bracket_lower(int ell) noexcept { return (ell - 1) * kPi; }

double bracket_upper(int ell) noexcept { return (2 * ell - 1) * kHalfPi; }

double solve_root(const ProcessParams& p, int ell, double tol) {
    return eigen_pair(p, ell, tol).x;
}

double eigenvalue(const ProcessParams& p, int ell, double tol) {
    return eigen_pair(p, ell, tol).lambda;
}

EigenPair eigen_pair(const ProcessParams& p, int ell, double tol) {
    require_index(ell);
    if (!(tol > 0.0)) throw DomainError("root tolerance must be > 0");

    EigenPair e;
    e.ell = ell;
    if (p.k() == 0.0) {
        e.phase = kHalfPi;
        e.x = bracket_upper(ell);
    } else {
        e.phase = solve_phase(p, ell, tol);
        e.x = std::min(bracket_lower(ell) + e.phase, bracket_upper(ell));
    }
    e.lambda = (p.T() / e.x) * (p.T() / e.x);

    // ∫₀ᵀ (sin ωt + a cos ωt)² dt with ω = x/T, a = kω; sin 2x and sin² x taken
    // from the phase since 2(ell-1)π is a whole number of periods.
    const double omega = e.x / p.T();
    const double a = p.k() * omega;
    const double s = std::sin(e.phase);
    const double integral = 0.5 * (1.0 + a * a) * p.T() +
                            (a * a - 1.0) * std::sin(2.0 * e.phase) / (4.0 * omega) +
                            a * s * s / omega;
    e.norm = 1.0 / std::sqrt(integral);
    return e;
}

double eigenfunction(const EigenPair& pair, const ProcessParams& p, double t) {
    if (!(t >= 0.0 && t <= p.T())) throw DomainError("eigenfunction: t outside [0, T]");
    const double omega = pair.x / p.T();
    const double arg = omega * t;
    return pair.norm * (std::sin(arg) + p.k() * omega * std::cos(arg));
}

double root_residual(const ProcessParams& p, const EigenPair& pair) noexcept {
    return std::abs(std::cos(pair.phase) / std::sin(pair.phase) - p.slope() * pair.x);
}

double root_residual(const ProcessParams& p, double x) noexcept {
    const double u = x - std::floor(x / kPi) * kPi;
    return std::abs(std::cos(u) / std::sin(u) - p.slope() * x);
}

Spectrum spectrum_batch(const ProcessParams& p, std::size_t count, double tol) {
    if (count < 1) throw DomainError("spectrum_batch: count must be >= 1");
    Spectrum out{p, std::vector<EigenPair>(count)};
    parallel_for(count, [&](std::size_t i) {
        const int ell = static_cast<int>(i) + 1;
        try {
            out.pairs[i] = eigen_pair(p, ell, tol);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("index " + std::to_string(ell) + ": " + e.what(), e.lo(),
                                   e.hi());
        }
    });
    return out;
}

std::vector<CSeqEntry> c_sequence(const Spectrum& s) {
    std::vector<CSeqEntry> out;
    out.reserve(s.size());
    for (const auto& e : s.pairs) {
        const double r = bracket_upper(e.ell) / e.x;
        out.push_back({e.ell, r * r});
    }
    return out;
}

std::vector<CSeqEntry> c_sequence(const ProcessParams& p, std::size_t count) {
    return c_sequence(spectrum_batch(p, count));
}

TailBounds tail_bounds(const ProcessParams& p, std::size_t after) {
    if (after == 0) {
        const double tr = trace(p);
        return {tr, tr};
    }
    const double scale = p.T() * p.T() / (kPi * kPi);
    const double L = static_cast<double>(after);
    return {scale * boost::math::trigamma(L + 0.5), scale * boost::math::trigamma(L)};
}

NewtonOutcome newton_unbracketed(const ProcessParams& p, int ell, double start_offset, double tol,
                                 int max_iter) {
    require_index(ell);
    const double slope = p.slope();
    NewtonOutcome out;
    double x = bracket_lower(ell) + start_offset;
    for (int it = 1; it <= max_iter; ++it) {
        const double s = std::sin(x);
        const double g = std::cos(x) / s - slope * x;
        const double dg = -1.0 / (s * s) - slope;
        const double next = x - g / dg;
        out.iterations = it;
        if (!std::isfinite(next)) break;
        const double step = std::abs(next - x);
        x = next;
        if (step <= tol * std::abs(x)) {
            out.converged = true;
            break;
        }
    }
    out.x = x;
    // a few ulps of slack on the closed end: for k = 0 the root is exactly on it
    out.in_bracket = out.converged && x > bracket_lower(ell) &&
                     x <= bracket_upper(ell) * (1.0 + 4.0 * kEps);
    return out;
}

}  // namespace gspq
