#include "gspq/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "gspq/error.hpp"

namespace gspq {

namespace {

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    double max_abs_res = 0.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("least squares: degenerate design (all abscissae equal)");
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    l.ss_tot = syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (l.intercept + l.slope * x[i]);
        l.ss_res += r * r;
        l.max_abs_res = std::max(l.max_abs_res, std::abs(r));
    }
    return l;
}

}  // namespace

SharpRate sharp_constant(const RegVarying& phi) {
    if (!(phi.b > 1.0)) throw DomainError("sharp_constant: index b must exceed 1");
    if (!(phi.c > 0.0)) throw DomainError("sharp_constant: scale c must be positive");
    const double b = phi.b;
    const double squared = phi.c * std::pow(b / 2.0, b - 1.0) * b / (b - 1.0);
    return {std::sqrt(squared), (b - 1.0) / 2.0, phi.a / 2.0};
}

ErrorBounds theta_bounds_log(const ProcessParams& p, double log_n) {
    if (!(log_n > 0.0)) throw DomainError("theta_bounds: ln n must be positive");
    const double base = p.T() / std::numbers::pi / std::sqrt(log_n);
    return {std::numbers::sqrt2 * base, std::numbers::sqrt3 * base};
}

ErrorBounds theta_bounds(const ProcessParams& p, double n) {
    if (!(n >= 2.0)) throw DomainError("theta_bounds: codebook size must be >= 2");
    return theta_bounds_log(p, std::log(n));
}

double remark_constant(double c_inf, double T) {
    if (!(c_inf >= 1.0)) throw DomainError("remark_constant: c_inf must be >= 1");
    return std::sqrt(2.0 * c_inf) * T / std::numbers::pi;
}

CInfEstimate estimate_c_inf(std::span<const CSeqEntry> cseq, double window) {
    if (cseq.size() < 100) throw DomainError("estimate_c_inf: need at least 100 entries");
    if (!(window > 0.0 && window <= 1.0)) throw DomainError("estimate_c_inf: window in (0, 1]");
    const auto keep = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(window * static_cast<double>(cseq.size()))));
    const auto tail = cseq.subspan(cseq.size() - keep);
    std::vector<double> x, y;
    for (const auto& e : tail) {
        x.push_back(1.0 / e.ell);
        y.push_back(e.c);
    }
    const Line l = least_squares(x, y);
    return {l.intercept, l.max_abs_res, l.slope};
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 4) throw DomainError("fit_rate: need at least 4 points");
    std::set<double> distinct;
    std::vector<double> x, y;
    for (const auto& [n, d] : points) {
        if (!(n >= 2.0)) throw DomainError("fit_rate: codebook sizes must be >= 2");
        if (!(d > 0.0)) throw DomainError("fit_rate: distortions must be positive");
        distinct.insert(n);
        x.push_back(std::log(std::log(n)));
        y.push_back(std::log(d));
    }
    if (distinct.size() != points.size()) throw DomainError("fit_rate: codebook sizes must be distinct");
    const Line l = least_squares(x, y);
    double r2 = l.ss_tot > 0.0 ? 1.0 - l.ss_res / l.ss_tot : 1.0;
    r2 = std::clamp(r2, 0.0, 1.0);
    return {std::exp(l.intercept), l.slope, r2};
}

}  // namespace gspq
